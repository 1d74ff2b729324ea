#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "infotriage/errors.hpp"
#include "infotriage/labels.hpp"
#include "infotriage/query.hpp"

namespace infotriage {

class UnknownDocId : public Error {
 public:
  explicit UnknownDocId(const std::string& id) : Error("document '" + id + "' has no gold label") {}
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("length mismatch: " + std::to_string(a) + " predictions, " + std::to_string(b) + " gold labels") {}
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("no labels to score") {}
};

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::optional<std::size_t> tn;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricRow {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// doc_id -> relevant?
using GoldRelevance = std::map<std::string, bool>;

ConfusionCounts confusion(const std::vector<std::string>& predicted, const GoldRelevance& gold);

// All three scores are 0.0 whenever tp == 0.
MetricRow prf(const ConfusionCounts& counts, std::string label = {});

template <typename T>
double categorical_accuracy(const std::vector<T>& predictions, const std::vector<T>& golds) {
  if (predictions.size() != golds.size()) throw LengthMismatch(predictions.size(), golds.size());
  if (predictions.empty()) throw EmptyInput();
  std::size_t equal = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) equal += predictions[i] == golds[i] ? 1 : 0;
  return static_cast<double>(equal) / static_cast<double>(predictions.size());
}

struct AspectTarget {
  std::size_t start = 0;
  std::size_t end = 0;
  SentimentLabel polarity = SentimentLabel::Neutral;
  friend auto operator<=>(const AspectTarget&, const AspectTarget&) = default;
};

// Entity-level exact match: boundaries and polarity must both agree.
ConfusionCounts exact_match_absa(const std::vector<AspectTarget>& predicted, const std::vector<AspectTarget>& gold);
std::vector<AspectTarget> targets_of(const AspectTagging& tagging);

// Gold files are JSON Lines of {"doc_id", "relevant": bool} or
// {"doc_id", "stance": label}. Stance records need `target`: a record is
// relevant iff its stance equals the target.
GoldRelevance parse_gold(std::string_view jsonl, std::optional<StanceLabel> target = std::nullopt);
GoldRelevance load_gold(const std::filesystem::path& path, std::optional<StanceLabel> target = std::nullopt);

struct ReportRow {
  std::string label;
  Query query;
};

struct ReportLine {
  std::string label;
  ConfusionCounts counts;
  MetricRow metrics;
  std::size_t skipped = 0;
  std::optional<std::string> error;  // set when the row's search failed
};

struct Report {
  std::vector<ReportLine> lines;
};

Report emit_report(const std::vector<ReportRow>& rows, const Corpus& corpus, const GoldRelevance& gold,
                   const ClassifierBackend* backend, const SearchOptions& options = {});

// Scores an existing result set against gold.
ReportLine score_row(std::string label, const std::vector<std::string>& predicted, const GoldRelevance& gold,
                     std::size_t skipped = 0);

std::string format_report_text(const Report& report);
std::string format_report_csv(const Report& report);
nlohmann::json report_to_json(const Report& report);

// Suite files list report rows:
//   {"rows": [{"label": "K", "query": {...} | "path/to/query.json"},
//             {"label": "SD", "claims": {...} | "path/to/claims.json", "negate": false,
//              "target_stance": "agree", "keywords"?: [...]}]}
// A claims row expands into "SD 1", "SD 2", ... in claim order. Relative
// paths resolve against base_dir.
std::vector<ReportRow> suite_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
std::vector<ReportRow> load_suite(const std::filesystem::path& path);

}  // namespace infotriage
