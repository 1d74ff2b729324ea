#include "infotriage/config.hpp"

#include <cstdlib>

#include "infotriage/corpus.hpp"
#include "infotriage/remote_backend.hpp"

namespace infotriage {
namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::uint64_t env_number(const char* name, const char* value) {
  try {
    std::size_t used = 0;
    const auto n = std::stoull(value, &used);
    if (used != std::string_view(value).size()) throw std::invalid_argument(name);
    return n;
  } catch (const std::exception&) {
    throw ConfigError(std::string(name) + " must be a non-negative integer");
  }
}

}  // namespace

unsigned parse_capabilities(const nlohmann::json& list) {
  if (!list.is_array()) throw ConfigError("capabilities must be an array");
  unsigned caps = 0;
  for (const auto& c : list) {
    const std::string name = c.is_string() ? c.get<std::string>() : "";
    if (name == "sentiment") {
      caps |= kSentiment;
    } else if (name == "aspects") {
      caps |= kAspects;
    } else if (name == "stance") {
      caps |= kStance;
    } else {
      throw ConfigError("unknown capability '" + name + "'");
    }
  }
  return caps;
}

ServiceConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("top level must be an object");
  ServiceConfig c;
  c.host = get_or<std::string>(j, "host", c.host);
  c.port = get_or<int>(j, "port", c.port);
  if (j.contains("store_dir")) c.store_dir = resolve(base_dir, get_or<std::string>(j, "store_dir", ""));
  c.parallelism = get_or<std::size_t>(j, "parallelism", c.parallelism);
  c.search_workers = get_or<std::size_t>(j, "search_workers", c.search_workers);
  c.max_upload_bytes = get_or<std::uint64_t>(j, "max_upload_bytes", c.max_upload_bytes);
  c.deadline = std::chrono::milliseconds(get_or<std::int64_t>(j, "deadline_ms", c.deadline.count()));

  if (auto it = j.find("backends"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("backends must be an object");
    for (const auto& [name, b] : it->items()) {
      if (!b.is_object()) throw ConfigError("backend '" + name + "' must be an object");
      BackendConfig bc;
      bc.deadline = c.deadline;
      bc.type = get_or<std::string>(b, "type", "lexicon");
      if (b.contains("capabilities")) bc.capabilities = parse_capabilities(b["capabilities"]);
      if (bc.type == "lexicon") {
        if (b.contains("lexicon")) bc.lexicon_path = resolve(base_dir, get_or<std::string>(b, "lexicon", ""));
        bc.lexicon.relatedness_threshold = get_or<double>(b, "theta_rel", bc.lexicon.relatedness_threshold);
        bc.lexicon.window = get_or<std::size_t>(b, "window", bc.lexicon.window);
      } else if (bc.type == "remote") {
        bc.endpoint = get_or<std::string>(b, "endpoint", "");
        if (bc.endpoint.empty()) throw ConfigError("remote backend '" + name + "' needs an endpoint");
        bc.pool_size = get_or<std::size_t>(b, "pool_size", bc.pool_size);
        bc.deadline = std::chrono::milliseconds(get_or<std::int64_t>(b, "deadline_ms", bc.deadline.count()));
      } else {
        throw ConfigError("backend '" + name + "' has unknown type '" + bc.type + "'");
      }
      c.backends[name] = std::move(bc);
    }
  }
  return c;
}

void apply_env_overrides(ServiceConfig& c) {
  if (const char* v = std::getenv("INFOTRIAGE_HOST")) c.host = v;
  if (const char* v = std::getenv("INFOTRIAGE_PORT")) c.port = static_cast<int>(env_number("INFOTRIAGE_PORT", v));
  if (const char* v = std::getenv("INFOTRIAGE_STORE_DIR")) c.store_dir = v;
  if (const char* v = std::getenv("INFOTRIAGE_PARALLELISM")) c.parallelism = env_number("INFOTRIAGE_PARALLELISM", v);
  if (const char* v = std::getenv("INFOTRIAGE_MAX_UPLOAD_BYTES")) {
    c.max_upload_bytes = env_number("INFOTRIAGE_MAX_UPLOAD_BYTES", v);
  }
  if (const char* v = std::getenv("INFOTRIAGE_DEADLINE_MS")) {
    c.deadline = std::chrono::milliseconds(env_number("INFOTRIAGE_DEADLINE_MS", v));
    for (auto& [name, b] : c.backends) b.deadline = c.deadline;
  }
}

ServiceConfig load_config(const std::optional<std::filesystem::path>& path) {
  ServiceConfig c;
  if (path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(*path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("'" + path->string() + "' is not valid JSON: " + e.what());
    }
    c = parse_config(j, path->parent_path());
  }
  apply_env_overrides(c);
  return c;
}

std::shared_ptr<const ClassifierBackend> make_backend(const std::string& name, const BackendConfig& config) {
  if (config.type == "remote") {
    return std::make_shared<RemoteBackend>(name, config.endpoint,
                                           RemoteOptions{config.deadline, config.pool_size, config.capabilities});
  }
  auto lexicon = config.lexicon_path ? std::make_shared<const Lexicon>(Lexicon::load(*config.lexicon_path))
                                     : std::make_shared<const Lexicon>(Lexicon::builtin());
  return std::make_shared<LexiconBackend>(name, std::move(lexicon), config.lexicon, config.capabilities);
}

BackendRegistry make_backends(const ServiceConfig& config) {
  BackendRegistry out;
  if (config.backends.empty()) {
    out["lexicon"] = make_backend("lexicon", BackendConfig{});
    return out;
  }
  for (const auto& [name, b] : config.backends) out[name] = make_backend(name, b);
  return out;
}

}  // namespace infotriage
