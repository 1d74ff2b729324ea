#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "infotriage/errors.hpp"
#include "infotriage/evaluate.hpp"
#include "infotriage/labels.hpp"
#include "json.hpp"

namespace infotriage {

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& what) : Error(what) {}
};

class InsufficientExamples : public Error {
 public:
  InsufficientExamples(std::string source, std::string label, std::size_t needed, std::size_t found)
      : Error(source + ": needed " + std::to_string(needed) + " '" + label + "' examples, found " +
              std::to_string(found)),
        source_(std::move(source)),
        label_(std::move(label)),
        needed_(needed),
        found_(found) {}
  const std::string& source() const { return source_; }
  const std::string& label() const { return label_; }
  std::size_t needed() const { return needed_; }
  std::size_t found() const { return found_; }

 private:
  std::string source_, label_;
  std::size_t needed_, found_;
};

class CountMismatch : public Error {
 public:
  CountMismatch(std::string source, std::size_t expected, std::size_t found)
      : Error(source + ": expected " + std::to_string(expected) + " items, found " + std::to_string(found)),
        source_(std::move(source)),
        expected_(expected),
        found_(found) {}
  const std::string& source() const { return source_; }
  std::size_t expected() const { return expected_; }
  std::size_t found() const { return found_; }

 private:
  std::string source_;
  std::size_t expected_, found_;
};

class EmptyNameList : public Error {
 public:
  EmptyNameList() : Error("placeholder replacement needs at least one name") {}
};

class SourceFormatError : public Error {
 public:
  SourceFormatError(const std::string& source, const std::string& what) : Error(source + ": " + what) {}
};

SentimentLabel map_stars(int stars);

enum class Sst5 { VeryNegative, Negative, Neutral, Positive, VeryPositive };
SentimentLabel collapse_sst(Sst5 label);

struct LabeledSentimentItem {
  std::string text;
  SentimentLabel label = SentimentLabel::Neutral;
  std::string origin;
};

struct LabeledAspectItem {
  std::string text;
  std::vector<AspectTarget> targets;  // byte offsets into text, sorted, non-overlapping
  std::string origin;
};

struct LabeledStancePair {
  std::string claim;
  std::string body;
  StanceLabel label = StanceLabel::Unrelated;
  std::string origin;
};

// Portable uniform draws: the same seed gives the same sequence on every
// standard library, unlike std::uniform_int_distribution.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Replaces every distinct LOCATIONn placeholder with one uniformly drawn
// name; draws happen in order of first appearance.
std::string replace_placeholders(std::string_view sentence, const std::vector<std::string>& names,
                                 std::uint64_t seed);
std::string replace_placeholders(std::string_view sentence, const std::vector<std::string>& names, SeededRng& rng);

// ---------------------------------------------------------------------------
// Source adapters. Every adapter keeps file order.

// Penn-treebank style trees, one per line: "(3 (2 it) (4 (4 works) (2 .)))".
std::vector<LabeledSentimentItem> read_sst(std::string_view text, const std::string& origin);
// Headerless CSV whose first column is a 1-5 star rating and whose remaining
// columns are joined into the text (Amazon and Yelp review dumps).
std::vector<LabeledSentimentItem> read_star_csv(std::string_view text, const std::string& origin);

struct RawAspectSentence {
  std::string text;
  struct Term {
    std::size_t from = 0;  // codepoint offsets into text
    std::size_t to = 0;
    std::string polarity;
  };
  std::vector<Term> terms;
};
// SemEval-2014 / MAMS XML: <sentence><text/><aspectTerms><aspectTerm from to polarity/>...
std::vector<RawAspectSentence> read_aspect_xml(const std::string& text, const std::string& origin);
// {"text", "targets": [{"start", "end", "polarity"}]} per line, codepoint offsets.
std::vector<RawAspectSentence> read_aspect_jsonl(std::string_view text, const std::string& origin);
// Sentihood: JSON array of {"text", "opinions": [{"target_entity", "sentiment"}]}.
std::vector<RawAspectSentence> read_sentihood(std::string_view text, const std::string& origin,
                                              const std::vector<std::string>& names, SeededRng& rng);
// Cleans text and moves spans onto the cleaned text; terms with an unknown
// polarity, that clean to nothing, or that overlap an earlier term are dropped.
LabeledAspectItem clean_aspect_sentence(const RawAspectSentence& raw, const std::string& origin);

// FNC-1 style pair of CSVs: stances (Headline, Body ID, Stance) and bodies (Body ID, articleBody).
std::vector<LabeledStancePair> read_fnc(std::string_view stances_csv, std::string_view bodies_csv,
                                        const std::string& origin);
// {"claim", "body", "label"} per line.
std::vector<LabeledStancePair> read_stance_jsonl(std::string_view text, const std::string& origin);

// ---------------------------------------------------------------------------
// Builders

struct SaSources {
  std::vector<LabeledSentimentItem> sst, amazon_test, amazon_train, yelp_test, yelp_train;
};
struct AbsaSources {
  std::vector<RawAspectSentence> semeval14, negation, mams, twitter, yaso;
  std::vector<RawAspectSentence> sentihood_train, sentihood_dev, sentihood_test;
};
struct SdSources {
  std::vector<LabeledStancePair> fnc_train, fnc_test, arc, perspectrum;
};

template <typename Item>
struct Dataset {
  std::vector<Item> train;
  std::vector<Item> validation;
  nlohmann::json manifest;  // per-origin counts
};

Dataset<LabeledSentimentItem> build_sa_dataset(const SaSources& sources);
Dataset<LabeledAspectItem> build_absa_dataset(const AbsaSources& sources);
Dataset<LabeledStancePair> build_sd_dataset(const SdSources& sources);

nlohmann::json to_json(const LabeledSentimentItem& item);
nlohmann::json to_json(const LabeledAspectItem& item);
nlohmann::json to_json(const LabeledStancePair& item);

enum class DatasetTask { SA, ABSA, SD };
DatasetTask parse_dataset_task(std::string_view name);

// Reads a source manifest (JSON object of source name -> path, paths relative
// to the manifest), builds the dataset and writes train.jsonl,
// validation.jsonl and manifest.json into out_dir. Returns the manifest.
nlohmann::json build_dataset_from_manifest(DatasetTask task, const std::filesystem::path& sources_manifest,
                                           const std::filesystem::path& out_dir, std::uint64_t seed);

}  // namespace infotriage
