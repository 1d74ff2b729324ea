#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "infotriage/classify.hpp"
#include "json.hpp"

namespace infotriage {

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

struct BackendConfig {
  std::string type = "lexicon";  // "lexicon" or "remote"
  unsigned capabilities = kSentiment | kAspects | kStance;
  // lexicon
  std::optional<std::filesystem::path> lexicon_path;
  LexiconOptions lexicon;
  // remote
  std::string endpoint;
  std::chrono::milliseconds deadline{30'000};
  std::size_t pool_size = 4;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path store_dir = "infotriage-store";
  std::size_t parallelism = 0;
  std::size_t search_workers = 2;
  std::uint64_t max_upload_bytes = 512ull * 1024 * 1024;
  std::chrono::milliseconds deadline{30'000};
  std::map<std::string, BackendConfig> backends;
};

// JSON config file:
//   {"host": "127.0.0.1", "port": 8080, "store_dir": "store", "parallelism": 0,
//    "max_upload_bytes": 536870912, "deadline_ms": 30000,
//    "backends": {"lexicon": {"type": "lexicon", "lexicon": "words.tsv", "theta_rel": 0.15, "window": 3},
//                 "bert": {"type": "remote", "endpoint": "http://127.0.0.1:9000",
//                          "capabilities": ["sentiment", "stance"], "pool_size": 4}}}
// Relative paths resolve against the config file's directory. Environment
// variables INFOTRIAGE_HOST, _PORT, _STORE_DIR, _PARALLELISM,
// _MAX_UPLOAD_BYTES and _DEADLINE_MS override the file.
ServiceConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ServiceConfig load_config(const std::optional<std::filesystem::path>& path);
void apply_env_overrides(ServiceConfig& config);

unsigned parse_capabilities(const nlohmann::json& list);

std::shared_ptr<const ClassifierBackend> make_backend(const std::string& name, const BackendConfig& config);

using BackendRegistry = std::map<std::string, std::shared_ptr<const ClassifierBackend>>;
// An empty backend table yields a single built-in lexicon backend named "lexicon".
BackendRegistry make_backends(const ServiceConfig& config);

}  // namespace infotriage
