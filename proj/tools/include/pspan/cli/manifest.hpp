#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pspan/cli/config.hpp"

namespace pspan::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Config echo plus the hash of every input file and the list of outputs.
nlohmann::ordered_json make_manifest(const RunConfig& cfg, const std::vector<std::string>& inputs,
                                     const std::vector<std::string>& outputs);

}  // namespace pspan::cli
