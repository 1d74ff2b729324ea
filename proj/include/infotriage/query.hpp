#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infotriage/classify.hpp"
#include "infotriage/corpus.hpp"
#include "infotriage/errors.hpp"
#include "infotriage/labels.hpp"

namespace infotriage {

class InvalidQuery : public Error {
 public:
  explicit InvalidQuery(const std::string& what) : Error("invalid query: " + what) {}
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(std::string name) : Error("unbound template variable '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// A classifier call for one document failed.
class DocumentError : public Error {
 public:
  DocumentError(std::string doc_id, const std::string& cause)
      : Error("document '" + doc_id + "': " + cause), doc_id_(std::move(doc_id)) {}
  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

class SearchFailed : public Error {
 public:
  SearchFailed(std::size_t failed, std::size_t calls, const std::string& first_cause)
      : Error(std::to_string(failed) + " of " + std::to_string(calls) + " classifier calls failed (first: " +
              first_cause + ")"),
        failed_(failed),
        calls_(calls) {}
  std::size_t failed() const { return failed_; }
  std::size_t calls() const { return calls_; }

 private:
  std::size_t failed_;
  std::size_t calls_;
};

class UnknownSession : public Error {
 public:
  explicit UnknownSession(const std::string& id) : Error("unknown session '" + id + "'") {}
};

// ---------------------------------------------------------------------------
// Keywords

enum class MatchMode { Substring, Token };

std::string_view to_string(MatchMode mode);

struct Keyword {
  std::string pattern;
  MatchMode mode = MatchMode::Substring;

  /// Validates: non-empty and already a clean_text fixed point.
  Keyword(std::string pattern, MatchMode mode = MatchMode::Substring);
  friend bool operator==(const Keyword&, const Keyword&) = default;
};

/// AND over groups, OR within a group. No groups matches everything.
struct KeywordExpr {
  std::vector<std::vector<Keyword>> groups;

  void validate() const;
  bool empty() const { return groups.empty(); }
  friend bool operator==(const KeywordExpr&, const KeywordExpr&) = default;
};

struct KeywordSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string pattern;
  friend bool operator==(const KeywordSpan&, const KeywordSpan&) = default;
};

struct KeywordMatch {
  bool matched = false;
  std::vector<KeywordSpan> spans;  // every occurrence of every keyword found
};

/// All occurrences of one keyword in cleaned text.
std::vector<KeywordSpan> find_keyword(const Keyword& keyword, std::string_view text);

KeywordMatch matches_keywords(const KeywordExpr& expr, std::string_view cleaned_text);

// ---------------------------------------------------------------------------
// Claim templates

inline constexpr std::string_view kDefaultNegationPrefix = "It is not the case that";

/// Pattern with variables written ⟨name⟩; expands to the cross product of
/// its bindings, variables ordered by first appearance.
struct ClaimTemplate {
  std::string pattern;
  std::map<std::string, std::vector<std::string>> bindings;
  std::string negation_prefix = std::string(kDefaultNegationPrefix);
};

std::vector<std::string> expand_claims(const ClaimTemplate& tmpl, bool negate);
std::vector<std::string> expand_claims(const std::vector<ClaimTemplate>& templates, bool negate);
std::string negate_claim(std::string_view claim, std::string_view prefix = kDefaultNegationPrefix);

// ---------------------------------------------------------------------------
// Queries

enum class QueryKind { KeywordOnly, Sentiment, Aspect, Stance };

std::string_view to_string(QueryKind kind);

struct AspectRequirement {
  std::vector<Keyword> any_of;
  std::optional<AspectTag> required_tag;  // nullopt = Any
  friend bool operator==(const AspectRequirement&, const AspectRequirement&) = default;
};

struct Query {
  QueryKind kind = QueryKind::KeywordOnly;
  std::optional<KeywordExpr> keywords;
  SentimentLabel target_sentiment = SentimentLabel::Positive;
  std::vector<AspectRequirement> aspect_requirements;
  std::string claim;
  StanceLabel target_stance = StanceLabel::Agree;

  /// Throws InvalidQuery when kind-specific fields are missing or contradictory.
  void validate() const;
  /// Backend capability this query needs, or 0 for keyword-only.
  unsigned required_capability() const;
  friend bool operator==(const Query&, const Query&) = default;
};

struct MatchRationale {
  std::string doc_id;
  std::vector<KeywordSpan> matched_spans;
  std::string classifier_output;
  std::string rule_fired;
};

struct MatchOutcome {
  bool matched = false;
  MatchRationale rationale;
  std::size_t classifier_calls = 0;
};

MatchOutcome match_keyword_only(const Query& query, const CleanDocument& doc);
MatchOutcome match_sa(const Query& query, const CleanDocument& doc, const ClassifierBackend& backend);
MatchOutcome match_absa(const Query& query, const CleanDocument& doc, const ClassifierBackend& backend);
/// `cleaned_claim` is the query claim after clean_text.
MatchOutcome match_sd(const Query& query, std::string_view cleaned_claim, const CleanDocument& doc,
                      const ClassifierBackend& backend);

/// Dispatches on query kind. The backend may be null for keyword-only queries.
MatchOutcome match_document(const Query& query, const CleanDocument& doc, const ClassifierBackend* backend);

struct SkippedDocument {
  std::string doc_id;
  std::string error;
};

struct SearchResult {
  std::vector<std::string> doc_ids;
  std::vector<MatchRationale> rationales;  // parallel to doc_ids
  std::vector<SkippedDocument> skipped;
  std::size_t classifier_calls = 0;
};

struct SearchOptions {
  std::size_t parallelism = 0;  // 0 = hardware concurrency
  double max_failure_fraction = 0.10;
};

/// Runs the query over the corpus. Hits come back in corpus order whatever
/// the parallelism. Throws SearchFailed when more than max_failure_fraction of
/// classifier calls fail; fewer failures are reported in `skipped`.
SearchResult run_search(const Query& query, const Corpus& corpus, const ClassifierBackend* backend,
                        const SearchOptions& options = {});

}  // namespace infotriage
