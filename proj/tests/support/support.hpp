#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "infotriage/classify.hpp"
#include "infotriage/corpus.hpp"
#include "infotriage/evaluate.hpp"

namespace infotriage::testing {

// Seeded generator for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::size_t range(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  // Lowercase word over a small alphabet so collisions are common.
  std::string word(std::size_t max_len = 6, std::string_view alphabet = "abcde");
  // Arbitrary-ish raw text: mixed case, punctuation, URLs, emoji, hashtags.
  std::string messy_text(std::size_t max_words = 12);
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

std::shared_ptr<const Lexicon> tiny_lexicon();  // {good:+1, bad:-1}

// Wraps a backend and counts calls per capability.
class CountingBackend : public ClassifierBackend {
 public:
  explicit CountingBackend(std::shared_ptr<const ClassifierBackend> inner) : inner_(std::move(inner)) {}
  const std::string& name() const override { return inner_->name(); }
  unsigned capabilities() const override { return inner_->capabilities(); }
  SentimentLabel sentiment(std::string_view t) const override;
  AspectTagging aspects(std::string_view t) const override;
  StanceLabel stance(std::string_view c, std::string_view t) const override;
  std::size_t calls() const { return calls_.load(); }
  void reset() { calls_ = 0; }

 private:
  std::shared_ptr<const ClassifierBackend> inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

class TempDir {
 public:
  TempDir();
  ~TempDir();
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, std::string_view contents);

// Brute-force metric oracles written independently of the evaluate module:
// they walk documents (or gold entries) one at a time.
struct OracleScores {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0, recall = 0, f1 = 0;
};
OracleScores oracle_scores(const std::vector<std::string>& doc_ids, const std::vector<bool>& predicted,
                           const std::vector<bool>& relevant);
OracleScores oracle_absa(const std::vector<AspectTarget>& predicted, const std::vector<AspectTarget>& gold);

Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& docs);

}  // namespace infotriage::testing
