// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace awmcli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);

/// Collects the files a command writes into one output directory and records
/// them, with digests, in manifest.json.
class RunDir {
 public:
  explicit RunDir(std::filesystem::path dir);

  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path file(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& text);
  /// For files written by someone else (e.g. the library) into this directory.
  void adopt(const std::string& name);
  void input(const std::string& path);

  /// Writes manifest.json; `record` carries command, argv and parameters.
  void finish(nlohmann::ordered_json record, double wall_seconds);

  static nlohmann::ordered_json read_manifest(const std::filesystem::path& dir_or_file);

 private:
  std::filesystem::path dir_;
  std::vector<std::string> outputs_;
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
};

}  // namespace awmcli
