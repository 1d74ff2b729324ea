#include "infotriage/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>

#include "infotriage/corpus.hpp"

namespace infotriage {
namespace {

[[noreturn]] void fail(const std::string& what) { throw IoError(what + ": " + std::strerror(errno)); }

void write_all(int fd, std::string_view bytes, const std::string& what) {
  while (!bytes.empty()) {
    const ssize_t n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(what);
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const std::filesystem::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) fail("open " + dir.string());
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

Journal::Journal(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) fail("open " + path_.string());
}

Journal::~Journal() {
  if (fd_ >= 0) ::close(fd_);
}

std::vector<nlohmann::json> Journal::replay() {
  std::lock_guard lock(mutex_);
  const std::string bytes = read_file(path_);
  std::vector<nlohmann::json> records;
  std::size_t pos = 0;
  std::size_t good_end = 0;
  while (pos < bytes.size()) {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) break;  // unterminated: torn write
    const std::string_view line(bytes.data() + pos, nl - pos);
    if (!line.empty()) {
      try {
        records.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception&) {
        break;  // everything from a damaged record on is discarded
      }
    }
    pos = nl + 1;
    good_end = pos;
  }
  if (good_end < bytes.size()) {
    if (::ftruncate(fd_, static_cast<off_t>(good_end)) != 0) fail("truncate " + path_.string());
    ::fsync(fd_);
  }
  return records;
}

void Journal::append(const nlohmann::json& record) {
  const std::string line = record.dump() + '\n';
  std::lock_guard lock(mutex_);
  write_all(fd_, line, "append to " + path_.string());
  if (::fdatasync(fd_) != 0) fail("sync " + path_.string());
}

void write_file_durably(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  const auto dir = path.parent_path();
  std::filesystem::create_directories(dir);
  const auto tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()) + "-" +
                          std::to_string(counter++));
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) fail("open " + tmp.string());
  try {
    write_all(fd, bytes, "write " + tmp.string());
    if (::fsync(fd) != 0) fail("sync " + tmp.string());
  } catch (...) {
    ::close(fd);
    std::filesystem::remove(tmp);
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) fail("rename " + tmp.string());
  fsync_dir(dir);
}

}  // namespace infotriage
