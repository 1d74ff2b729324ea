#include "infotriage/evaluate.hpp"

#include <cstdio>
#include <sstream>

#include "infotriage/query_json.hpp"

namespace infotriage {

ConfusionCounts confusion(const std::vector<std::string>& predicted, const GoldRelevance& gold) {
  std::set<std::string_view> seen;
  ConfusionCounts c;
  for (const auto& id : predicted) {
    auto it = gold.find(id);
    if (it == gold.end()) throw UnknownDocId(id);
    if (!seen.insert(id).second) continue;
    if (it->second) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  std::size_t relevant = 0;
  for (const auto& [id, rel] : gold) relevant += rel ? 1 : 0;
  c.fn = relevant - c.tp;
  c.tn = gold.size() - c.tp - c.fp - c.fn;
  return c;
}

MetricRow prf(const ConfusionCounts& counts, std::string label) {
  MetricRow row{std::move(label), 0.0, 0.0, 0.0};
  if (counts.tp == 0) return row;
  const double tp = static_cast<double>(counts.tp);
  row.precision = tp / (tp + static_cast<double>(counts.fp));
  row.recall = tp / (tp + static_cast<double>(counts.fn));
  row.f1 = 2.0 * row.precision * row.recall / (row.precision + row.recall);
  return row;
}

ConfusionCounts exact_match_absa(const std::vector<AspectTarget>& predicted, const std::vector<AspectTarget>& gold) {
  std::multiset<AspectTarget> remaining(gold.begin(), gold.end());
  ConfusionCounts c;
  for (const auto& p : predicted) {
    auto it = remaining.find(p);
    if (it != remaining.end()) {
      remaining.erase(it);
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = remaining.size();
  return c;
}

std::vector<AspectTarget> targets_of(const AspectTagging& tagging) {
  std::vector<AspectTarget> out;
  for (const auto& s : tagging.spans) out.push_back({s.char_start, s.char_end, s.polarity});
  return out;
}

GoldRelevance parse_gold(std::string_view jsonl, std::optional<StanceLabel> target) {
  GoldRelevance gold;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    const std::size_t nl = jsonl.find('\n', pos);
    std::string_view line = jsonl.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? jsonl.size() + 1 : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw MalformedRecord(line_no, "not valid JSON");
    }
    if (!rec.is_object() || !rec.contains("doc_id") || !rec["doc_id"].is_string()) {
      throw MalformedRecord(line_no, "expected an object with a string 'doc_id'");
    }
    const std::string id = rec["doc_id"].get<std::string>();
    bool relevant = false;
    if (rec.contains("relevant")) {
      if (!rec["relevant"].is_boolean()) throw MalformedRecord(line_no, "'relevant' must be a boolean");
      relevant = rec["relevant"].get<bool>();
    } else if (rec.contains("stance")) {
      if (!target) throw MalformedRecord(line_no, "stance gold needs a target stance");
      auto stance = rec["stance"].is_string() ? parse_stance(rec["stance"].get<std::string>()) : std::nullopt;
      if (!stance) throw MalformedRecord(line_no, "unknown stance label");
      relevant = *stance == *target;
    } else {
      throw MalformedRecord(line_no, "expected 'relevant' or 'stance'");
    }
    if (!gold.emplace(id, relevant).second) throw DuplicateId(id);
  }
  return gold;
}

GoldRelevance load_gold(const std::filesystem::path& path, std::optional<StanceLabel> target) {
  return parse_gold(read_file(path), target);
}

ReportLine score_row(std::string label, const std::vector<std::string>& predicted, const GoldRelevance& gold,
                     std::size_t skipped) {
  ReportLine line;
  line.counts = confusion(predicted, gold);
  line.metrics = prf(line.counts, label);
  line.label = std::move(label);
  line.skipped = skipped;
  return line;
}

Report emit_report(const std::vector<ReportRow>& rows, const Corpus& corpus, const GoldRelevance& gold,
                   const ClassifierBackend* backend, const SearchOptions& options) {
  for (const auto& doc : corpus.documents()) {
    if (!gold.count(doc.id)) throw UnknownDocId(doc.id);
  }
  Report report;
  for (const auto& row : rows) {
    try {
      auto result = run_search(row.query, corpus, backend, options);
      report.lines.push_back(score_row(row.label, result.doc_ids, gold, result.skipped.size()));
    } catch (const Error& e) {
      ReportLine failed;
      failed.label = row.label;
      failed.metrics.label = row.label;
      failed.error = e.what();
      report.lines.push_back(std::move(failed));
    }
  }
  return report;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string two_dp(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_report_text(const Report& report) {
  std::size_t width = 5;
  for (const auto& l : report.lines) width = std::max(width, l.label.size());
  std::ostringstream out;
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  out << pad("label") << "  precision  recall  f1    tp    fp    fn    skipped\n";
  for (const auto& l : report.lines) {
    out << pad(l.label) << "  ";
    if (l.error) {
      out << "failed: " << *l.error << '\n';
      continue;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-9s  %-6s  %-4s  %-4zu  %-4zu  %-4zu  %zu\n", two_dp(l.metrics.precision).c_str(),
                  two_dp(l.metrics.recall).c_str(), two_dp(l.metrics.f1).c_str(), l.counts.tp, l.counts.fp, l.counts.fn,
                  l.skipped);
    out << buf;
  }
  return out.str();
}

std::string format_report_csv(const Report& report) {
  std::string out = "label,precision,recall,f1,tp,fp,fn,skipped\n";
  for (const auto& l : report.lines) {
    out += csv_field(l.label);
    if (l.error) {
      out += ",failed,failed,failed,,,,\n";
      continue;
    }
    out += ',' + full_precision(l.metrics.precision) + ',' + full_precision(l.metrics.recall) + ',' +
           full_precision(l.metrics.f1) + ',' + std::to_string(l.counts.tp) + ',' + std::to_string(l.counts.fp) + ',' +
           std::to_string(l.counts.fn) + ',' + std::to_string(l.skipped) + '\n';
  }
  return out;
}

nlohmann::json report_to_json(const Report& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& l : report.lines) {
    nlohmann::json r{{"label", l.label}};
    if (l.error) {
      r["status"] = "failed";
      r["error"] = *l.error;
    } else {
      r["status"] = "done";
      r["precision"] = l.metrics.precision;
      r["recall"] = l.metrics.recall;
      r["f1"] = l.metrics.f1;
      r["tp"] = l.counts.tp;
      r["fp"] = l.counts.fp;
      r["fn"] = l.counts.fn;
      r["skipped"] = l.skipped;
    }
    rows.push_back(std::move(r));
  }
  return {{"rows", rows}};
}

namespace {

nlohmann::json inline_or_file(const nlohmann::json& v, const std::filesystem::path& base_dir) {
  if (!v.is_string()) return v;
  std::filesystem::path p(v.get<std::string>());
  return load_json_file(p.is_absolute() ? p : base_dir / p);
}

}  // namespace

std::vector<ReportRow> load_suite(const std::filesystem::path& path) {
  return suite_from_json(load_json_file(path), path.parent_path());
}

std::vector<ReportRow> suite_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array()) {
    throw InvalidQuery("suite must be an object with a 'rows' array");
  }
  std::vector<ReportRow> rows;
  for (const auto& r : j["rows"]) {
    if (!r.is_object() || !r.contains("label") || !r["label"].is_string()) {
      throw InvalidQuery("every suite row needs a string 'label'");
    }
    const std::string label = r["label"].get<std::string>();
    if (r.contains("query")) {
      rows.push_back({label, query_from_json(inline_or_file(r["query"], base_dir))});
      continue;
    }
    if (!r.contains("claims")) throw InvalidQuery("suite row '" + label + "' needs 'query' or 'claims'");
    const auto templates = claim_templates_from_json(inline_or_file(r["claims"], base_dir));
    const bool negate = r.value("negate", false);
    auto target = r.contains("target_stance") && r["target_stance"].is_string()
                      ? parse_stance(r["target_stance"].get<std::string>())
                      : std::optional<StanceLabel>(StanceLabel::Agree);
    if (!target) throw InvalidQuery("suite row '" + label + "' has an unknown target_stance");
    std::optional<KeywordExpr> keywords;
    if (r.contains("keywords")) keywords = keyword_expr_from_json(r["keywords"]);

    const auto claims = expand_claims(templates, negate);
    for (std::size_t i = 0; i < claims.size(); ++i) {
      Query q;
      q.kind = QueryKind::Stance;
      q.claim = claims[i];
      q.target_stance = *target;
      q.keywords = keywords;
      q.validate();
      rows.push_back({label + " " + std::to_string(i + 1), std::move(q)});
    }
  }
  return rows;
}

}  // namespace infotriage
