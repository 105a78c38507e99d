// Copyright 2026 The atrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "app/run_manifest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "atrisk/error.hpp"
#include "json.hpp"

namespace atrisk::app {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read '{}' for hashing", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 initialisation failed");
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string build_run_manifest(const std::filesystem::path& out, const std::vector<std::filesystem::path>& written,
                               const std::map<std::string, std::string>& settings) {
  std::vector<std::filesystem::path> files;
  for (const auto& path : written) files.push_back(std::filesystem::relative(path, out));
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.generic_string() < b.generic_string(); });
  files.erase(std::unique(files.begin(), files.end()), files.end());

  nlohmann::ordered_json doc;
  doc["format"] = "atrisk-run-manifest";
  doc["version"] = 1;
  doc["settings"] = settings;
  doc["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& rel : files) {
    doc["artifacts"].push_back({{"path", rel.generic_string()},
                                {"bytes", std::filesystem::file_size(out / rel)},
                                {"sha256", sha256_file(out / rel)}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace atrisk::app
