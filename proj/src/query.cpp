#include "infotriage/query.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <optional>
#include <thread>

namespace infotriage {

std::string_view to_string(MatchMode mode) { return mode == MatchMode::Token ? "token" : "substring"; }

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::KeywordOnly: return "keyword";
    case QueryKind::Sentiment: return "sentiment";
    case QueryKind::Aspect: return "aspect";
    case QueryKind::Stance: return "stance";
  }
  return "?";
}

Keyword::Keyword(std::string p, MatchMode m) : pattern(std::move(p)), mode(m) {
  if (pattern.empty()) throw InvalidQuery("keyword pattern must be non-empty");
  if (clean_text(pattern).text != pattern) {
    throw InvalidQuery("keyword pattern '" + pattern + "' is not in cleaned (lowercase) form");
  }
}

void KeywordExpr::validate() const {
  for (const auto& group : groups) {
    if (group.empty()) throw InvalidQuery("keyword expression contains an empty OR-group");
  }
}

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void sort_spans(std::vector<KeywordSpan>& spans) {
  std::sort(spans.begin(), spans.end(), [](const KeywordSpan& a, const KeywordSpan& b) {
    return std::tie(a.start, a.end, a.pattern) < std::tie(b.start, b.end, b.pattern);
  });
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
}

// Occurrences of any keyword in the group.
std::vector<KeywordSpan> find_any(const std::vector<Keyword>& group, std::string_view text) {
  std::vector<KeywordSpan> out;
  for (const auto& kw : group) {
    auto found = find_keyword(kw, text);
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

MatchOutcome keyword_miss(const CleanDocument& doc, KeywordMatch km) {
  MatchOutcome out;
  out.rationale.doc_id = doc.id;
  out.rationale.matched_spans = std::move(km.spans);
  out.rationale.rule_fired = "keyword expression not satisfied";
  return out;
}

template <typename Fn>
auto call_backend(const CleanDocument& doc, Fn&& fn) {
  try {
    return fn();
  } catch (const DocumentError&) {
    throw;
  } catch (const std::exception& e) {
    throw DocumentError(doc.id, e.what());
  }
}

std::string summarize_tagging(const AspectTagging& tagging, std::string_view text) {
  if (tagging.spans.empty()) return "no aspect targets";
  std::string out;
  for (const auto& s : tagging.spans) {
    if (!out.empty()) out += "; ";
    out += std::string(text.substr(s.char_start, s.char_end - s.char_start));
    out += "=";
    out += to_string(s.polarity);
  }
  return out;
}

}  // namespace

std::vector<KeywordSpan> find_keyword(const Keyword& keyword, std::string_view text) {
  std::vector<KeywordSpan> out;
  const std::string& p = keyword.pattern;
  for (std::size_t pos = text.find(p); pos != std::string_view::npos; pos = text.find(p, pos + 1)) {
    const std::size_t end = pos + p.size();
    if (keyword.mode == MatchMode::Token) {
      const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
      const bool right_ok = end == text.size() || !is_word_char(text[end]);
      if (!left_ok || !right_ok) continue;
    }
    out.push_back({pos, end, p});
  }
  return out;
}

KeywordMatch matches_keywords(const KeywordExpr& expr, std::string_view cleaned_text) {
  KeywordMatch result;
  result.matched = true;
  for (const auto& group : expr.groups) {
    auto found = find_any(group, cleaned_text);
    if (found.empty()) result.matched = false;
    result.spans.insert(result.spans.end(), found.begin(), found.end());
  }
  sort_spans(result.spans);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kVarOpen = "⟨";
constexpr std::string_view kVarClose = "⟩";

struct Segment {
  bool is_variable = false;
  std::string text;
};

std::vector<Segment> parse_pattern(std::string_view pattern) {
  std::vector<Segment> segments;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    std::size_t open = pattern.find(kVarOpen, pos);
    if (open == std::string_view::npos) {
      segments.push_back({false, std::string(pattern.substr(pos))});
      break;
    }
    if (open > pos) segments.push_back({false, std::string(pattern.substr(pos, open - pos))});
    std::size_t name_start = open + kVarOpen.size();
    std::size_t close = pattern.find(kVarClose, name_start);
    if (close == std::string_view::npos) throw InvalidQuery("unterminated variable in claim template");
    std::string name(pattern.substr(name_start, close - name_start));
    if (name.empty()) throw InvalidQuery("empty variable name in claim template");
    segments.push_back({true, std::move(name)});
    pos = close + kVarClose.size();
  }
  return segments;
}

}  // namespace

std::string negate_claim(std::string_view claim, std::string_view prefix) {
  std::string body(claim);
  if (!body.empty()) body[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(body[0])));
  std::string out(prefix);
  out.push_back(' ');
  out += body;
  return out;
}

std::vector<std::string> expand_claims(const ClaimTemplate& tmpl, bool negate) {
  const auto segments = parse_pattern(tmpl.pattern);
  std::vector<std::string> variables;
  for (const auto& s : segments) {
    if (s.is_variable && std::find(variables.begin(), variables.end(), s.text) == variables.end()) {
      variables.push_back(s.text);
    }
  }
  std::vector<const std::vector<std::string>*> values;
  for (const auto& v : variables) {
    auto it = tmpl.bindings.find(v);
    if (it == tmpl.bindings.end()) throw UnboundVariable(v);
    values.push_back(&it->second);
  }

  std::vector<std::string> claims;
  for (const auto* list : values) {
    if (list->empty()) return claims;
  }
  // Odometer over the bindings; the first variable varies slowest.
  std::vector<std::size_t> choice(variables.size(), 0);
  while (true) {
    std::string claim;
    for (const auto& s : segments) {
      if (!s.is_variable) {
        claim += s.text;
        continue;
      }
      auto idx = static_cast<std::size_t>(std::find(variables.begin(), variables.end(), s.text) - variables.begin());
      claim += (*values[idx])[choice[idx]];
    }
    claims.push_back(negate ? negate_claim(claim, tmpl.negation_prefix) : claim);

    std::size_t k = variables.size();
    while (k > 0) {
      --k;
      if (++choice[k] < values[k]->size()) break;
      choice[k] = 0;
      if (k == 0) return claims;
    }
    if (variables.empty()) return claims;
  }
}

std::vector<std::string> expand_claims(const std::vector<ClaimTemplate>& templates, bool negate) {
  std::vector<std::string> out;
  for (const auto& t : templates) {
    auto claims = expand_claims(t, negate);
    out.insert(out.end(), claims.begin(), claims.end());
  }
  return out;
}

// ---------------------------------------------------------------------------

void Query::validate() const {
  if (kind != QueryKind::Stance && !keywords) {
    throw InvalidQuery(std::string(to_string(kind)) + " queries require a keyword expression");
  }
  if (keywords) keywords->validate();
  switch (kind) {
    case QueryKind::KeywordOnly:
    case QueryKind::Sentiment:
      break;
    case QueryKind::Aspect: {
      if (aspect_requirements.empty()) throw InvalidQuery("aspect queries require at least one aspect requirement");
      bool any_tagged = false;
      for (const auto& r : aspect_requirements) {
        if (r.any_of.empty()) throw InvalidQuery("aspect requirement has no keywords");
        any_tagged = any_tagged || r.required_tag.has_value();
      }
      if (!any_tagged) throw InvalidQuery("at least one aspect requirement must name a tag other than any");
      break;
    }
    case QueryKind::Stance:
      if (clean_text(claim).text.empty()) throw InvalidQuery("stance queries require a non-empty claim");
      if (target_stance != StanceLabel::Agree && target_stance != StanceLabel::Disagree) {
        throw InvalidQuery("stance target must be agree or disagree");
      }
      break;
  }
}

unsigned Query::required_capability() const {
  switch (kind) {
    case QueryKind::KeywordOnly: return 0;
    case QueryKind::Sentiment: return kSentiment;
    case QueryKind::Aspect: return kAspects;
    case QueryKind::Stance: return kStance;
  }
  return 0;
}

MatchOutcome match_keyword_only(const Query& query, const CleanDocument& doc) {
  KeywordMatch km = query.keywords ? matches_keywords(*query.keywords, doc.text) : KeywordMatch{true, {}};
  if (!km.matched) return keyword_miss(doc, std::move(km));
  MatchOutcome out;
  out.matched = true;
  out.rationale.doc_id = doc.id;
  out.rationale.matched_spans = std::move(km.spans);
  out.rationale.rule_fired = "keyword expression satisfied";
  return out;
}

MatchOutcome match_sa(const Query& query, const CleanDocument& doc, const ClassifierBackend& backend) {
  KeywordMatch km = matches_keywords(query.keywords.value_or(KeywordExpr{}), doc.text);
  if (!km.matched) return keyword_miss(doc, std::move(km));

  const SentimentLabel label = call_backend(doc, [&] { return backend.sentiment(doc.text); });
  MatchOutcome out;
  out.classifier_calls = 1;
  out.matched = label == query.target_sentiment;
  out.rationale.doc_id = doc.id;
  out.rationale.matched_spans = std::move(km.spans);
  out.rationale.classifier_output = std::string(to_string(label));
  out.rationale.rule_fired = out.matched ? "keywords present and sentiment is " + std::string(to_string(label))
                                         : "sentiment " + std::string(to_string(label)) + " is not " +
                                               std::string(to_string(query.target_sentiment));
  return out;
}

MatchOutcome match_absa(const Query& query, const CleanDocument& doc, const ClassifierBackend& backend) {
  KeywordMatch km = matches_keywords(query.keywords.value_or(KeywordExpr{}), doc.text);
  if (!km.matched) return keyword_miss(doc, std::move(km));

  std::vector<std::vector<KeywordSpan>> occurrences;
  for (const auto& req : query.aspect_requirements) {
    occurrences.push_back(find_any(req.any_of, doc.text));
    km.spans.insert(km.spans.end(), occurrences.back().begin(), occurrences.back().end());
  }
  sort_spans(km.spans);
  for (const auto& occ : occurrences) {
    if (occ.empty()) {
      MatchOutcome miss = keyword_miss(doc, std::move(km));
      miss.rationale.rule_fired = "aspect keyword absent";
      return miss;
    }
  }

  const AspectTagging tagging = call_backend(doc, [&] { return backend.aspects(doc.text); });
  MatchOutcome out;
  out.classifier_calls = 1;
  out.matched = true;
  std::string failed_requirement;
  for (std::size_t r = 0; r < query.aspect_requirements.size(); ++r) {
    const auto& req = query.aspect_requirements[r];
    if (!req.required_tag) continue;
    bool satisfied = false;
    for (const auto& occ : occurrences[r]) {
      for (std::size_t t = 0; t < tagging.tokens.size() && !satisfied; ++t) {
        const auto& tok = tagging.tokens[t];
        const bool overlaps = tok.start < occ.end && occ.start < tok.end;
        satisfied = overlaps && tagging.tags[t] == *req.required_tag;
      }
      if (satisfied) break;
    }
    if (!satisfied) {
      out.matched = false;
      failed_requirement = req.any_of.front().pattern + " not tagged " + std::string(to_string(*req.required_tag));
      break;
    }
  }
  out.rationale.doc_id = doc.id;
  out.rationale.matched_spans = std::move(km.spans);
  out.rationale.classifier_output = summarize_tagging(tagging, doc.text);
  out.rationale.rule_fired = out.matched ? "all aspect requirements tagged as required" : failed_requirement;
  return out;
}

MatchOutcome match_sd(const Query& query, std::string_view cleaned_claim, const CleanDocument& doc,
                      const ClassifierBackend& backend) {
  KeywordMatch km{true, {}};
  if (query.keywords) {
    km = matches_keywords(*query.keywords, doc.text);
    if (!km.matched) return keyword_miss(doc, std::move(km));
  }
  const StanceLabel label = call_backend(doc, [&] { return backend.stance(cleaned_claim, doc.text); });
  MatchOutcome out;
  out.classifier_calls = 1;
  out.matched = label == query.target_stance;
  out.rationale.doc_id = doc.id;
  out.rationale.matched_spans = std::move(km.spans);
  out.rationale.classifier_output = std::string(to_string(label));
  out.rationale.rule_fired = out.matched ? "stance toward claim is " + std::string(to_string(label))
                                         : "stance " + std::string(to_string(label)) + " is not " +
                                               std::string(to_string(query.target_stance));
  return out;
}

MatchOutcome match_document(const Query& query, const CleanDocument& doc, const ClassifierBackend* backend) {
  if (query.kind == QueryKind::KeywordOnly) return match_keyword_only(query, doc);
  if (backend == nullptr) throw InvalidQuery(std::string(to_string(query.kind)) + " queries need a backend");
  switch (query.kind) {
    case QueryKind::Sentiment: return match_sa(query, doc, *backend);
    case QueryKind::Aspect: return match_absa(query, doc, *backend);
    case QueryKind::Stance: return match_sd(query, clean_text(query.claim).text, doc, *backend);
    case QueryKind::KeywordOnly: break;
  }
  return match_keyword_only(query, doc);
}

SearchResult run_search(const Query& query, const Corpus& corpus, const ClassifierBackend* backend,
                        const SearchOptions& options) {
  query.validate();
  const unsigned needed = query.required_capability();
  if (needed != 0) {
    if (backend == nullptr) throw InvalidQuery(std::string(to_string(query.kind)) + " queries need a backend");
    if (!backend->supports(static_cast<Capability>(needed))) throw Unsupported(backend->name(), capability_names(needed));
  }
  const std::string cleaned_claim = clean_text(query.claim).text;

  const auto& docs = corpus.documents();
  std::vector<std::optional<MatchOutcome>> outcomes(docs.size());
  std::vector<std::string> failures(docs.size());

  auto evaluate = [&](std::size_t i) {
    try {
      if (query.kind == QueryKind::Stance) {
        outcomes[i] = match_sd(query, cleaned_claim, docs[i], *backend);
      } else {
        outcomes[i] = match_document(query, docs[i], backend);
      }
    } catch (const DocumentError& e) {
      failures[i] = e.what();
    }
  };

  std::size_t workers = options.parallelism == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                                 : options.parallelism;
  workers = std::min(workers, std::max<std::size_t>(docs.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < docs.size(); i = next.fetch_add(1)) evaluate(i);
      });
    }
  }

  SearchResult result;
  std::size_t failed = 0;
  std::string first_failure;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!outcomes[i]) {
      ++failed;
      if (first_failure.empty()) first_failure = failures[i];
      result.skipped.push_back({docs[i].id, failures[i]});
      continue;
    }
    result.classifier_calls += outcomes[i]->classifier_calls;
    if (outcomes[i]->matched) {
      result.doc_ids.push_back(docs[i].id);
      result.rationales.push_back(std::move(outcomes[i]->rationale));
    }
  }
  result.classifier_calls += failed;
  if (failed > 0 &&
      static_cast<double>(failed) > options.max_failure_fraction * static_cast<double>(result.classifier_calls)) {
    throw SearchFailed(failed, result.classifier_calls, first_failure);
  }
  return result;
}

}  // namespace infotriage
