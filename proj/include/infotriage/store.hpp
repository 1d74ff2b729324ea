#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "infotriage/errors.hpp"
#include "json.hpp"

namespace infotriage {

// Append-only JSON Lines write-ahead log. Every append is flushed to disk
// before returning; a torn final line left by a crash is dropped on replay.
class Journal {
 public:
  explicit Journal(std::filesystem::path path);
  ~Journal();
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  // Reads every complete record and truncates any torn tail. Call before append.
  std::vector<nlohmann::json> replay();
  void append(const nlohmann::json& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  int fd_ = -1;
};

// Writes `bytes` to `path` atomically: temp file, fsync, rename, fsync of the directory.
void write_file_durably(const std::filesystem::path& path, std::string_view bytes);

}  // namespace infotriage
