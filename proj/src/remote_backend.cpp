#include "infotriage/remote_backend.hpp"

#include "httplib.h"

namespace infotriage {
namespace {

const nlohmann::json& require_object(const nlohmann::json& body) {
  if (!body.is_object()) throw ProtocolError("response body is not a JSON object");
  return body;
}

std::string require_label(const nlohmann::json& body) {
  auto it = require_object(body).find("label");
  if (it == body.end() || !it->is_string()) throw ProtocolError("response lacks a string 'label'");
  return it->get<std::string>();
}

void check_scores(const nlohmann::json& body, std::size_t expected) {
  auto it = body.find("scores");
  if (it == body.end() || it->is_null()) return;
  if (!it->is_array() || it->size() != expected) {
    throw ProtocolError("'scores' must be an array of " + std::to_string(expected) + " reals");
  }
  for (const auto& v : *it) {
    if (!v.is_number()) throw ProtocolError("'scores' entries must be numbers");
  }
}

}  // namespace

SentimentLabel decode_sentiment_response(const nlohmann::json& body) {
  const std::string label = require_label(body);
  auto parsed = parse_sentiment(label);
  if (!parsed) throw ProtocolError("unknown sentiment label '" + label + "'");
  check_scores(body, 3);
  return *parsed;
}

StanceLabel decode_stance_response(const nlohmann::json& body) {
  const std::string label = require_label(body);
  auto parsed = parse_stance(label);
  if (!parsed) throw ProtocolError("unknown stance label '" + label + "'");
  check_scores(body, 4);
  return *parsed;
}

std::vector<AspectTag> decode_aspects_response(const nlohmann::json& body, std::size_t token_count) {
  auto it = require_object(body).find("tags");
  if (it == body.end() || !it->is_array()) throw ProtocolError("response lacks a 'tags' array");
  if (it->size() != token_count) {
    throw ProtocolError("got " + std::to_string(it->size()) + " tags for " + std::to_string(token_count) + " tokens");
  }
  std::vector<AspectTag> tags;
  tags.reserve(token_count);
  for (const auto& t : *it) {
    if (!t.is_string()) throw ProtocolError("tag entries must be strings");
    auto tag = parse_aspect_tag(t.get<std::string>());
    if (!tag) throw ProtocolError("unknown aspect tag '" + t.get<std::string>() + "'");
    tags.push_back(*tag);
  }
  return tags;
}

RemoteBackend::RemoteBackend(std::string name, std::string endpoint, RemoteOptions options)
    : name_(std::move(name)), endpoint_(std::move(endpoint)), options_(options) {
  if (options_.pool_size == 0) throw Error("remote backend pool size must be positive");
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
}

RemoteBackend::~RemoteBackend() = default;

std::unique_ptr<httplib::Client> RemoteBackend::acquire() const {
  std::unique_lock lock(pool_mutex_);
  const bool ready = pool_cv_.wait_for(lock, options_.deadline,
                                       [&] { return !idle_.empty() || outstanding_ < options_.pool_size; });
  if (!ready) throw Timeout("no free connection to " + endpoint_);
  if (!idle_.empty()) {
    auto client = std::move(idle_.back());
    idle_.pop_back();
    return client;
  }
  ++outstanding_;
  lock.unlock();

  auto client = std::make_unique<httplib::Client>(endpoint_);
  if (!client->is_valid()) {
    std::lock_guard relock(pool_mutex_);
    --outstanding_;
    pool_cv_.notify_one();
    throw TransportError("invalid endpoint '" + endpoint_ + "'");
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.deadline);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.deadline - secs);
  client->set_connection_timeout(secs.count(), usecs.count());
  client->set_read_timeout(secs.count(), usecs.count());
  client->set_write_timeout(secs.count(), usecs.count());
  client->set_keep_alive(true);
  client->set_tcp_nodelay(true);
  return client;
}

void RemoteBackend::release(std::unique_ptr<httplib::Client> client) const {
  std::lock_guard lock(pool_mutex_);
  if (client) {
    idle_.push_back(std::move(client));
  } else {
    --outstanding_;
  }
  pool_cv_.notify_one();
}

nlohmann::json RemoteBackend::post(const char* path, const nlohmann::json& request) const {
  const auto started = std::chrono::steady_clock::now();
  auto client = acquire();
  auto result = client->Post(path, request.dump(), "application/json");
  const auto elapsed = std::chrono::steady_clock::now() - started;

  if (!result) {
    const auto err = result.error();
    release(nullptr);  // a failed connection is not reused
    if (err == httplib::Error::ConnectionTimeout || elapsed >= options_.deadline ||
        (err == httplib::Error::Read && elapsed >= options_.deadline * 9 / 10)) {
      throw Timeout(std::string(path) + " on " + endpoint_);
    }
    throw TransportError(std::string(path) + " on " + endpoint_ + ": " + httplib::to_string(err));
  }
  const int status = result->status;
  std::string body = result->body;
  release(std::move(client));

  if (status == 400) {
    std::string message = body;
    try {
      auto j = nlohmann::json::parse(body);
      if (j.is_object() && j.contains("error") && j["error"].is_string()) message = j["error"].get<std::string>();
    } catch (const nlohmann::json::exception&) {
    }
    throw BackendRejected(message);
  }
  if (status != 200) throw ProtocolError("unexpected HTTP status " + std::to_string(status) + " from " + path);
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError(std::string("malformed JSON from ") + path);
  }
}

SentimentLabel RemoteBackend::sentiment(std::string_view cleaned_text) const {
  if (!supports(kSentiment)) throw Unsupported(name_, "sentiment");
  return decode_sentiment_response(post("/v1/sentiment", {{"text", cleaned_text}}));
}

AspectTagging RemoteBackend::aspects(std::string_view cleaned_text) const {
  if (!supports(kAspects)) throw Unsupported(name_, "aspects");
  std::vector<TokenSpan> tokens = whitespace_tokens(cleaned_text);
  nlohmann::json token_texts = nlohmann::json::array();
  for (const auto& t : tokens) token_texts.push_back(cleaned_text.substr(t.start, t.end - t.start));
  auto tags = decode_aspects_response(post("/v1/aspects", {{"text", cleaned_text}, {"tokens", token_texts}}),
                                      tokens.size());
  return make_tagging(std::move(tokens), std::move(tags));
}

StanceLabel RemoteBackend::stance(std::string_view cleaned_claim, std::string_view cleaned_text) const {
  if (!supports(kStance)) throw Unsupported(name_, "stance");
  return decode_stance_response(post("/v1/stance", {{"claim", cleaned_claim}, {"text", cleaned_text}}));
}

}  // namespace infotriage
