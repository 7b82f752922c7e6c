#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gaah::cli {

std::string sha256_file(const std::filesystem::path& path);

struct TaskStatus {
  std::string name;
  std::string status;  // ok | failed
  std::string message;
};

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

class Manifest {
 public:
  Manifest(std::string command, std::string config_text);

  void task(TaskStatus t) { tasks_.push_back(std::move(t)); }
  /// Records a file already written below `root`.
  void add_file(const std::filesystem::path& root, const std::filesystem::path& file);
  void set_wall_clock(double seconds) { wall_clock_ = seconds; }

  const std::vector<OutputFile>& files() const { return files_; }
  const std::vector<TaskStatus>& tasks() const { return tasks_; }

  /// Serializes to `root/manifest.json` via a temporary file and rename.
  void write(const std::filesystem::path& root) const;

 private:
  std::string command_;
  std::string config_;
  double wall_clock_ = 0.0;
  std::vector<TaskStatus> tasks_;
  std::vector<OutputFile> files_;
};

/// Machine-readable failure record, `root/error.json`.
void write_error_record(const std::filesystem::path& root, const std::string& command,
                        const std::string& kind, const std::string& module,
                        const std::string& message, const std::string& config_text);

/// Write-then-rename so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace gaah::cli
