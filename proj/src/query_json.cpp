#include "infotriage/query_json.hpp"

namespace infotriage {
namespace {

const nlohmann::json& field(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InvalidQuery(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const nlohmann::json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_string()) throw InvalidQuery(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Keyword keyword_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    return Keyword(clean_text(j.get<std::string>()).text, MatchMode::Substring);
  }
  if (!j.is_object()) throw InvalidQuery("keyword must be a string or an object");
  MatchMode mode = MatchMode::Substring;
  if (auto it = j.find("mode"); it != j.end()) {
    if (*it == "token") {
      mode = MatchMode::Token;
    } else if (*it != "substring") {
      throw InvalidQuery("keyword mode must be 'substring' or 'token'");
    }
  }
  return Keyword(clean_text(string_field(j, "pattern")).text, mode);
}

nlohmann::json keyword_to_json(const Keyword& kw) {
  if (kw.mode == MatchMode::Substring) return kw.pattern;
  return {{"pattern", kw.pattern}, {"mode", "token"}};
}

std::vector<Keyword> keyword_list_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidQuery("keyword group must be an array");
  std::vector<Keyword> out;
  for (const auto& k : j) out.push_back(keyword_from_json(k));
  return out;
}

nlohmann::json keyword_list_to_json(const std::vector<Keyword>& list) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& k : list) out.push_back(keyword_to_json(k));
  return out;
}

QueryKind parse_kind(const std::string& s) {
  if (s == "keyword") return QueryKind::KeywordOnly;
  if (s == "sentiment") return QueryKind::Sentiment;
  if (s == "aspect") return QueryKind::Aspect;
  if (s == "stance") return QueryKind::Stance;
  throw InvalidQuery("unknown query kind '" + s + "'");
}

}  // namespace

KeywordExpr keyword_expr_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidQuery("keywords must be an array of OR-groups");
  KeywordExpr expr;
  for (const auto& g : j) expr.groups.push_back(keyword_list_from_json(g));
  expr.validate();
  return expr;
}

nlohmann::json keyword_expr_to_json(const KeywordExpr& expr) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : expr.groups) out.push_back(keyword_list_to_json(g));
  return out;
}

Query query_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidQuery("query spec must be a JSON object");
  Query q;
  q.kind = parse_kind(string_field(j, "kind"));
  if (auto it = j.find("keywords"); it != j.end() && !it->is_null()) q.keywords = keyword_expr_from_json(*it);

  switch (q.kind) {
    case QueryKind::KeywordOnly:
      break;
    case QueryKind::Sentiment: {
      auto label = parse_sentiment(string_field(j, "target_sentiment"));
      if (!label) throw InvalidQuery("target_sentiment must be positive, neutral or negative");
      q.target_sentiment = *label;
      break;
    }
    case QueryKind::Aspect: {
      const auto& reqs = field(j, "aspect_requirements");
      if (!reqs.is_array()) throw InvalidQuery("aspect_requirements must be an array");
      for (const auto& r : reqs) {
        if (!r.is_object()) throw InvalidQuery("aspect requirement must be an object");
        AspectRequirement req;
        req.any_of = keyword_list_from_json(field(r, "any_of"));
        std::string tag = r.contains("tag") ? string_field(r, "tag") : "any";
        if (tag != "any") {
          auto parsed = parse_aspect_tag(tag);
          if (!parsed) throw InvalidQuery("unknown aspect tag '" + tag + "'");
          req.required_tag = *parsed;
        }
        q.aspect_requirements.push_back(std::move(req));
      }
      break;
    }
    case QueryKind::Stance: {
      q.claim = string_field(j, "claim");
      auto label = parse_stance(string_field(j, "target_stance"));
      if (!label) throw InvalidQuery("unknown target_stance");
      q.target_stance = *label;
      break;
    }
  }
  q.validate();
  return q;
}

nlohmann::json query_to_json(const Query& q) {
  nlohmann::json j;
  j["kind"] = to_string(q.kind);
  if (q.keywords) j["keywords"] = keyword_expr_to_json(*q.keywords);
  switch (q.kind) {
    case QueryKind::KeywordOnly:
      break;
    case QueryKind::Sentiment:
      j["target_sentiment"] = to_string(q.target_sentiment);
      break;
    case QueryKind::Aspect: {
      nlohmann::json reqs = nlohmann::json::array();
      for (const auto& r : q.aspect_requirements) {
        reqs.push_back({{"any_of", keyword_list_to_json(r.any_of)},
                        {"tag", r.required_tag ? std::string(to_string(*r.required_tag)) : std::string("any")}});
      }
      j["aspect_requirements"] = std::move(reqs);
      break;
    }
    case QueryKind::Stance:
      j["claim"] = q.claim;
      j["target_stance"] = to_string(q.target_stance);
      break;
  }
  return j;
}

std::vector<ClaimTemplate> claim_templates_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidQuery("claim template file must be a JSON object");
  std::string prefix(kDefaultNegationPrefix);
  if (auto it = j.find("negation_prefix"); it != j.end()) {
    if (!it->is_string()) throw InvalidQuery("negation_prefix must be a string");
    prefix = it->get<std::string>();
  }
  const auto& list = field(j, "templates");
  if (!list.is_array()) throw InvalidQuery("templates must be an array");
  std::vector<ClaimTemplate> out;
  for (const auto& t : list) {
    ClaimTemplate tmpl;
    tmpl.pattern = string_field(t, "pattern");
    tmpl.negation_prefix = prefix;
    if (auto b = t.find("bindings"); b != t.end()) {
      if (!b->is_object()) throw InvalidQuery("bindings must be an object");
      for (auto& [name, values] : b->items()) {
        if (!values.is_array()) throw InvalidQuery("binding '" + name + "' must be an array of strings");
        auto& slot = tmpl.bindings[name];
        for (const auto& v : values) {
          if (!v.is_string()) throw InvalidQuery("binding '" + name + "' must be an array of strings");
          slot.push_back(v.get<std::string>());
        }
      }
    }
    out.push_back(std::move(tmpl));
  }
  return out;
}

nlohmann::json claim_templates_to_json(const std::vector<ClaimTemplate>& templates) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : templates) {
    nlohmann::json entry{{"pattern", t.pattern}};
    if (!t.bindings.empty()) entry["bindings"] = t.bindings;
    list.push_back(std::move(entry));
  }
  nlohmann::json j{{"templates", list}};
  if (!templates.empty() && templates.front().negation_prefix != kDefaultNegationPrefix) {
    j["negation_prefix"] = templates.front().negation_prefix;
  }
  return j;
}

nlohmann::json rationale_to_json(const MatchRationale& r) {
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& s : r.matched_spans) spans.push_back({{"start", s.start}, {"end", s.end}, {"pattern", s.pattern}});
  return {{"doc_id", r.doc_id},
          {"matched_spans", spans},
          {"classifier_output", r.classifier_output},
          {"rule_fired", r.rule_fired}};
}

MatchRationale rationale_from_json(const nlohmann::json& j) {
  MatchRationale r;
  r.doc_id = j.at("doc_id").get<std::string>();
  for (const auto& s : j.at("matched_spans")) {
    r.matched_spans.push_back(
        {s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>(), s.at("pattern").get<std::string>()});
  }
  r.classifier_output = j.value("classifier_output", "");
  r.rule_fired = j.value("rule_fired", "");
  return r;
}

nlohmann::json search_result_to_json(const SearchResult& result) {
  nlohmann::json rationales = nlohmann::json::array();
  for (const auto& r : result.rationales) rationales.push_back(rationale_to_json(r));
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : result.skipped) skipped.push_back({{"doc_id", s.doc_id}, {"error", s.error}});
  return {{"doc_ids", result.doc_ids},
          {"rationales", rationales},
          {"skipped", skipped},
          {"classifier_calls", result.classifier_calls}};
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace infotriage
