#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "infotriage/classify.hpp"
#include "json.hpp"

namespace httplib {
class Client;
}

namespace infotriage {

struct RemoteOptions {
  std::chrono::milliseconds deadline{30'000};
  std::size_t pool_size = 4;
  unsigned capabilities = kSentiment | kAspects | kStance;
};

// Response decoders for the sidecar wire protocol. Exposed so the decoding
// rules can be exercised without a network round trip.
SentimentLabel decode_sentiment_response(const nlohmann::json& body);
StanceLabel decode_stance_response(const nlohmann::json& body);
std::vector<AspectTag> decode_aspects_response(const nlohmann::json& body, std::size_t token_count);

/// Classifier backend that forwards requests to an HTTP sidecar:
///   POST /v1/sentiment {"text"}            -> {"label", "scores"?}
///   POST /v1/aspects   {"text", "tokens"}  -> {"tags"}
///   POST /v1/stance    {"claim", "text"}   -> {"label", "scores"?}
/// Requests are multiplexed over a bounded pool of keep-alive connections.
class RemoteBackend : public ClassifierBackend {
 public:
  RemoteBackend(std::string name, std::string endpoint, RemoteOptions options = {});
  ~RemoteBackend() override;

  const std::string& name() const override { return name_; }
  unsigned capabilities() const override { return options_.capabilities; }
  const std::string& endpoint() const { return endpoint_; }

  SentimentLabel sentiment(std::string_view cleaned_text) const override;
  AspectTagging aspects(std::string_view cleaned_text) const override;
  StanceLabel stance(std::string_view cleaned_claim, std::string_view cleaned_text) const override;

 private:
  nlohmann::json post(const char* path, const nlohmann::json& request) const;
  std::unique_ptr<httplib::Client> acquire() const;
  void release(std::unique_ptr<httplib::Client> client) const;

  std::string name_;
  std::string endpoint_;
  RemoteOptions options_;

  mutable std::mutex pool_mutex_;
  mutable std::condition_variable pool_cv_;
  mutable std::vector<std::unique_ptr<httplib::Client>> idle_;
  mutable std::size_t outstanding_ = 0;
};

}  // namespace infotriage
