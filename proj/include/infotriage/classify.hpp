#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infotriage/corpus.hpp"
#include "infotriage/errors.hpp"
#include "infotriage/labels.hpp"
#include "infotriage/tokenizer.hpp"
#include "json.hpp"

namespace infotriage {

class EmptyVector : public Error {
 public:
  EmptyVector() : Error("softmax of an empty vector") {}
};

class NonFiniteInput : public Error {
 public:
  NonFiniteInput() : Error("softmax input contains a non-finite value") {}
};

class Unsupported : public Error {
 public:
  Unsupported(const std::string& backend, std::string_view capability)
      : Error("backend '" + backend + "' does not support " + std::string(capability)) {}
};

class Timeout : public Error {
 public:
  explicit Timeout(const std::string& what) : Error("timeout: " + what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error("protocol error: " + what) {}
};

// The sidecar answered 400 with an error message.
class BackendRejected : public Error {
 public:
  explicit BackendRejected(const std::string& what) : Error("backend rejected request: " + what) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error("transport error: " + what) {}
};

// Numerically stable (max-subtracted) softmax.
std::vector<double> softmax(std::span<const double> scores);

enum class HeadKind { SA, SD, ABSA };

std::string_view to_string(HeadKind kind);

struct HeadGeometry {
  HeadKind kind = HeadKind::SA;
  std::size_t input_dim = 0;
  std::size_t output_nodes = 0;
  std::size_t parameter_count = 0;
  bool shared_across_tokens = false;
};

/// Output-layer shape of each task head on top of the encoder.
/// Sequence heads read the whole flattened encoder output; the aspect head is
/// one per-token layer whose weights are shared across positions.
HeadGeometry head_geometry(HeadKind kind, const ModelGeometry& geometry = kDefaultGeometry);

struct TrainingRecipe {
  std::string optimizer = "adam";
  double learning_rate = 1e-5;
  std::map<std::string, int> epochs = {{"SA", 1}, {"SD", 1}, {"ABSA", 6}};
  int restarts = 5;
  std::string selection = "max categorical accuracy on validation";
  std::size_t max_tokens = kDefaultGeometry.max_tokens;
  std::size_t train_size = 25000;

  nlohmann::json to_json() const;
};

enum Capability : unsigned {
  kSentiment = 1u << 0,
  kAspects = 1u << 1,
  kStance = 1u << 2,
};

std::string capability_names(unsigned caps);

/// Pluggable realization of the three classifiers. Implementations must be
/// safe for concurrent calls.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;

  virtual const std::string& name() const = 0;
  virtual unsigned capabilities() const = 0;
  bool supports(Capability cap) const { return (capabilities() & cap) != 0; }

  virtual SentimentLabel sentiment(std::string_view cleaned_text) const;
  virtual AspectTagging aspects(std::string_view cleaned_text) const;
  virtual StanceLabel stance(std::string_view cleaned_claim, std::string_view cleaned_text) const;
};

// Fixed English function-word list used by the lexicon baseline.
inline constexpr std::string_view kStopwordsVersion = "1";
const std::vector<std::string_view>& stopwords();
bool is_stopword(std::string_view token);

class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::unordered_map<std::string, int> polarity);

  /// "word<TAB>+1|-1" per line; '#' lines are comments.
  static Lexicon parse(std::string_view contents);
  static Lexicon load(const std::filesystem::path& path);
  /// The bundled polarity list.
  static const Lexicon& builtin();

  /// Polarity of a token after trimming surrounding punctuation; 0 if absent.
  int polarity(std::string_view token) const;
  bool contains(std::string_view token) const { return polarity(token) != 0; }
  std::size_t size() const { return polarity_.size(); }
  Lexicon negated() const;

 private:
  std::unordered_map<std::string, int> polarity_;
};

SentimentLabel lexicon_sentiment(std::string_view cleaned_text, const Lexicon& lexicon);
AspectTagging lexicon_aspects(std::string_view cleaned_text, const Lexicon& lexicon, std::size_t window);
StanceLabel lexicon_stance(std::string_view cleaned_claim, std::string_view cleaned_text, const Lexicon& lexicon,
                           double relatedness_threshold, std::size_t window);

/// Jaccard overlap of non-stopword token sets.
double token_overlap(std::string_view a, std::string_view b);

struct LexiconOptions {
  double relatedness_threshold = 0.15;
  std::size_t window = 3;
};

class LexiconBackend : public ClassifierBackend {
 public:
  LexiconBackend(std::string name, std::shared_ptr<const Lexicon> lexicon, LexiconOptions options = {},
                 unsigned capabilities = kSentiment | kAspects | kStance);

  const std::string& name() const override { return name_; }
  unsigned capabilities() const override { return capabilities_; }

  SentimentLabel sentiment(std::string_view cleaned_text) const override;
  AspectTagging aspects(std::string_view cleaned_text) const override;
  StanceLabel stance(std::string_view cleaned_claim, std::string_view cleaned_text) const override;

 private:
  std::string name_;
  std::shared_ptr<const Lexicon> lexicon_;
  LexiconOptions options_;
  unsigned capabilities_;
};

}  // namespace infotriage
