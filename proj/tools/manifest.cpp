// SPDX-License-Identifier: Apache-2.0
#include "manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "awm/awm.h"

namespace fs = std::filesystem;

namespace awmcli {

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const fs::path& p) { return sha256_hex(slurp(p)); }

RunDir::RunDir(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  // Drop what a previous run left here so the manifest lists the whole directory.
  fs::path old = dir_ / "manifest.json";
  if (fs::exists(old)) {
    try {
      auto m = nlohmann::json::parse(slurp(old));
      for (const auto& o : m.at("outputs")) fs::remove(dir_ / o.at("file").get<std::string>());
    } catch (const std::exception&) {
    }
    fs::remove(old);
  }
}

void RunDir::write(const std::string& name, const std::string& text) {
  fs::path p = dir_ / name;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
  outputs_.push_back(name);
}

void RunDir::adopt(const std::string& name) { outputs_.push_back(name); }

void RunDir::input(const std::string& path) {
  inputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}});
}

void RunDir::finish(nlohmann::ordered_json record, double wall_seconds) {
  record["tool"] = "awm";
  record["version"] = awm_version();
  record["schema"] = awm_schema_version();
  record["rng"] = awm_rng_algorithm();
  record["inputs"] = inputs_;
  auto outs = nlohmann::ordered_json::array();
  for (const auto& o : outputs_) outs.push_back({{"file", o}, {"sha256", sha256_file(dir_ / o)}});
  record["outputs"] = outs;
  record["wall_seconds"] = wall_seconds;
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out << record.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write manifest in " + dir_.string());
}

nlohmann::ordered_json RunDir::read_manifest(const fs::path& dir_or_file) {
  fs::path p = fs::is_directory(dir_or_file) ? dir_or_file / "manifest.json" : dir_or_file;
  return nlohmann::ordered_json::parse(slurp(p));
}

}  // namespace awmcli
