#include "pspan/cli/manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "pspan/errors.hpp"

namespace pspan::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("SHA-256 unavailable");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

nlohmann::ordered_json make_manifest(const RunConfig& cfg, const std::vector<std::string>& inputs,
                                     const std::vector<std::string>& outputs) {
  nlohmann::ordered_json m;
  m["tool"] = "pspan";
  m["config"] = to_json(cfg);
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& p : inputs) {
    files.push_back({{"path", p},
                     {"bytes", std::filesystem::file_size(p)},
                     {"sha256", sha256_file(p)}});
  }
  m["inputs"] = files;
  m["outputs"] = outputs;
  return m;
}

}  // namespace pspan::cli
