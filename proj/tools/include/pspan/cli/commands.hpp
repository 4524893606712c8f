#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pspan/cli/config.hpp"

namespace pspan::cli {

/// What a command produced. Files are held in memory and written only
/// once the whole command has succeeded.
struct CommandOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  std::string table;                                       // for stdout
  std::vector<std::string> inputs;                         // paths read
};

CommandOutput cmd_span_test(const RunConfig& cfg);
CommandOutput cmd_backtest(const RunConfig& cfg);
CommandOutput cmd_mc(const RunConfig& cfg);
CommandOutput cmd_report(const RunConfig& cfg);

}  // namespace pspan::cli
