#pragma once

#include <filesystem>
#include <vector>

#include "infotriage/query.hpp"
#include "json.hpp"

namespace infotriage {

// Query specification files. Keywords are written either as a bare string
// (substring mode) or as {"pattern": ..., "mode": "substring"|"token"};
// patterns are normalized through clean_text on parse.
//
//   {"kind": "sentiment", "keywords": [["covid", "coronavirus"], ["cold"]],
//    "target_sentiment": "negative"}
//   {"kind": "aspect", "keywords": [...],
//    "aspect_requirements": [{"any_of": ["water"], "tag": "positive"},
//                            {"any_of": ["covid", "coronavirus"], "tag": "any"}]}
//   {"kind": "stance", "claim": "...", "target_stance": "agree", "keywords"?: [...]}
//   {"kind": "keyword", "keywords": [...]}
Query query_from_json(const nlohmann::json& j);
nlohmann::json query_to_json(const Query& query);

KeywordExpr keyword_expr_from_json(const nlohmann::json& j);
nlohmann::json keyword_expr_to_json(const KeywordExpr& expr);

// Claim template files: {"negation_prefix"?: str,
//   "templates": [{"pattern": "⟨x⟩ is a cure for ⟨c⟩", "bindings": {"x": [...], "c": [...]}}]}
std::vector<ClaimTemplate> claim_templates_from_json(const nlohmann::json& j);
nlohmann::json claim_templates_to_json(const std::vector<ClaimTemplate>& templates);

nlohmann::json rationale_to_json(const MatchRationale& r);
MatchRationale rationale_from_json(const nlohmann::json& j);
nlohmann::json search_result_to_json(const SearchResult& result);

nlohmann::json load_json_file(const std::filesystem::path& path);

}  // namespace infotriage
