#include "manifest.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>
#include <openssl/evp.h>

#include "version.hpp"

namespace gaah::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for hashing");

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);

  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

Manifest::Manifest(std::string command, std::string config_text)
    : command_(std::move(command)), config_(std::move(config_text)) {}

void Manifest::add_file(const fs::path& root, const fs::path& file) {
  OutputFile f;
  f.path = fs::relative(file, root).generic_string();
  f.sha256 = sha256_file(file);
  f.bytes = fs::file_size(file);
  files_.push_back(std::move(f));
}

void Manifest::write(const fs::path& root) const {
  nlohmann::ordered_json j;
  j["tool"] = "gaah";
  j["version"] = kVersion;
  j["command"] = command_;
  j["config"] = config_;
  j["wall_clock_seconds"] = wall_clock_;
  j["tasks"] = nlohmann::json::array();
  for (const auto& t : tasks_) {
    j["tasks"].push_back({{"name", t.name}, {"status", t.status}, {"message", t.message}});
  }
  j["files"] = nlohmann::json::array();
  for (const auto& f : files_) {
    j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  write_atomic(root / "manifest.json", j.dump(2) + "\n");
}

void write_error_record(const fs::path& root, const std::string& command, const std::string& kind,
                        const std::string& module, const std::string& message,
                        const std::string& config_text) {
  nlohmann::ordered_json j;
  j["tool"] = "gaah";
  j["version"] = kVersion;
  j["command"] = command;
  j["error"] = {{"kind", kind}, {"module", module}, {"message", message}};
  j["config"] = config_text;
  std::error_code ec;
  fs::create_directories(root, ec);
  write_atomic(root / "error.json", j.dump(2) + "\n");
}

}  // namespace gaah::cli
