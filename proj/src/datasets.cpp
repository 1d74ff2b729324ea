#include "infotriage/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "infotriage/corpus.hpp"

namespace infotriage {

SentimentLabel map_stars(int stars) {
  if (stars == 1 || stars == 2) return SentimentLabel::Negative;
  if (stars == 3) return SentimentLabel::Neutral;
  if (stars == 4 || stars == 5) return SentimentLabel::Positive;
  throw OutOfRange("star rating " + std::to_string(stars) + " is outside 1..5");
}

SentimentLabel collapse_sst(Sst5 label) {
  switch (label) {
    case Sst5::VeryPositive:
    case Sst5::Positive:
      return SentimentLabel::Positive;
    case Sst5::Neutral:
      return SentimentLabel::Neutral;
    case Sst5::Negative:
    case Sst5::VeryNegative:
      break;
  }
  return SentimentLabel::Negative;
}

std::size_t SeededRng::below(std::size_t n) {
  if (n == 0) throw Error("cannot draw from an empty range");
  const std::uint64_t bound = n;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return static_cast<std::size_t>(r % bound);
  }
}

namespace {

struct Placeholder {
  std::size_t start;  // byte offsets in the source sentence
  std::size_t end;
  std::string name;
};

std::vector<Placeholder> find_placeholders(std::string_view s) {
  static constexpr std::string_view kWord = "LOCATION";
  std::vector<Placeholder> out;
  std::size_t pos = 0;
  while ((pos = s.find(kWord, pos)) != std::string_view::npos) {
    std::size_t end = pos + kWord.size();
    while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
    if (end > pos + kWord.size()) {
      out.push_back({pos, end, std::string(s.substr(pos, end - pos))});
      pos = end;
    } else {
      pos += kWord.size();
    }
  }
  return out;
}

struct Replaced {
  std::string text;
  // placeholder name -> byte spans in `text`
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> spans;
};

Replaced replace_with_spans(std::string_view sentence, const std::vector<std::string>& names, SeededRng& rng) {
  if (names.empty()) throw EmptyNameList();
  const auto found = find_placeholders(sentence);
  std::unordered_map<std::string, std::string> chosen;
  for (const auto& p : found) {
    if (!chosen.count(p.name)) chosen[p.name] = names[rng.below(names.size())];
  }
  Replaced out;
  std::size_t last = 0;
  for (const auto& p : found) {
    out.text.append(sentence.substr(last, p.start - last));
    const std::string& name = chosen[p.name];
    out.spans[p.name].push_back({out.text.size(), out.text.size() + name.size()});
    out.text += name;
    last = p.end;
  }
  out.text.append(sentence.substr(last));
  return out;
}

std::size_t codepoints_before(std::string_view s, std::size_t byte) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < byte && i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r") == std::string_view::npos; }

std::string cleaned(std::string_view s) { return clean_text(s).text; }

std::string sst_leaf(std::string_view token) {
  if (token == "-LRB-") return "(";
  if (token == "-RRB-") return ")";
  return std::string(token);
}

}  // namespace

std::string replace_placeholders(std::string_view sentence, const std::vector<std::string>& names, SeededRng& rng) {
  return replace_with_spans(sentence, names, rng).text;
}

std::string replace_placeholders(std::string_view sentence, const std::vector<std::string>& names,
                                 std::uint64_t seed) {
  SeededRng rng(seed);
  return replace_placeholders(sentence, names, rng);
}

std::vector<LabeledSentimentItem> read_sst(std::string_view text, const std::string& origin) {
  std::vector<LabeledSentimentItem> out;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (blank(line)) continue;
    std::size_t i = line.find_first_not_of(" \t");
    if (line[i] != '(' || i + 1 >= line.size() || line[i + 1] < '0' || line[i + 1] > '4') {
      throw SourceFormatError(origin, "line " + std::to_string(line_no) + " is not a labelled tree");
    }
    const auto root = static_cast<Sst5>(line[i + 1] - '0');
    std::vector<std::string> leaves;
    int depth = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (c == '(') {
        ++depth;
        ++i;
        while (i < line.size() && line[i] != ' ' && line[i] != '(' && line[i] != ')') ++i;  // node label
      } else if (c == ')') {
        --depth;
        ++i;
      } else if (c == ' ' || c == '\t') {
        ++i;
      } else {
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != ')' && line[i] != '(') ++i;
        leaves.push_back(sst_leaf(line.substr(start, i - start)));
      }
    }
    if (depth != 0) throw SourceFormatError(origin, "line " + std::to_string(line_no) + " has unbalanced brackets");
    std::string sentence;
    for (const auto& leaf : leaves) {
      if (!sentence.empty()) sentence += ' ';
      sentence += leaf;
    }
    out.push_back({cleaned(sentence), collapse_sst(root), origin});
  }
  return out;
}

std::vector<LabeledSentimentItem> read_star_csv(std::string_view text, const std::string& origin) {
  std::vector<LabeledSentimentItem> out;
  for (const auto& row : parse_csv_rows(text)) {
    if (row.fields.size() < 2) throw SourceFormatError(origin, "line " + std::to_string(row.line_no) + " has no text");
    int stars = 0;
    try {
      std::size_t used = 0;
      stars = std::stoi(row.fields[0], &used);
      if (used != row.fields[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw SourceFormatError(origin, "line " + std::to_string(row.line_no) + " does not start with a star rating");
    }
    std::string body;
    for (std::size_t f = 1; f < row.fields.size(); ++f) {
      if (!body.empty()) body += ' ';
      body += row.fields[f];
    }
    out.push_back({cleaned(body), map_stars(stars), origin});
  }
  return out;
}

std::vector<RawAspectSentence> read_aspect_xml(const std::string& text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw SourceFormatError(origin, std::string("bad XML: ") + e.what());
  }
  std::vector<RawAspectSentence> out;
  const auto sentences = tree.get_child_optional("sentences");
  if (!sentences) throw SourceFormatError(origin, "missing <sentences> root");
  for (const auto& [tag, node] : *sentences) {
    if (tag != "sentence") continue;
    RawAspectSentence s;
    s.text = node.get<std::string>("text", "");
    if (auto terms = node.get_child_optional("aspectTerms")) {
      for (const auto& [ttag, term] : *terms) {
        if (ttag != "aspectTerm") continue;
        try {
          s.terms.push_back({term.get<std::size_t>("<xmlattr>.from"), term.get<std::size_t>("<xmlattr>.to"),
                             term.get<std::string>("<xmlattr>.polarity")});
        } catch (const pt::ptree_error&) {
          throw SourceFormatError(origin, "aspectTerm lacks from/to/polarity");
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<RawAspectSentence> read_aspect_jsonl(std::string_view text, const std::string& origin) {
  std::vector<RawAspectSentence> out;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      RawAspectSentence s;
      s.text = j.at("text").get<std::string>();
      for (const auto& t : j.value("targets", nlohmann::json::array())) {
        s.terms.push_back(
            {t.at("start").get<std::size_t>(), t.at("end").get<std::size_t>(), t.at("polarity").get<std::string>()});
      }
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw SourceFormatError(origin, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RawAspectSentence> read_sentihood(std::string_view text, const std::string& origin,
                                              const std::vector<std::string>& names, SeededRng& rng) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SourceFormatError(origin, std::string("bad JSON: ") + e.what());
  }
  if (!doc.is_array()) throw SourceFormatError(origin, "expected a JSON array of sentences");
  std::vector<RawAspectSentence> out;
  for (const auto& entry : doc) {
    try {
      const std::string sentence = entry.at("text").get<std::string>();
      // Polarity per placeholder: majority over its opinions, ties neutral.
      std::map<std::string, int> balance;
      for (const auto& op : entry.value("opinions", nlohmann::json::array())) {
        const std::string sentiment = op.at("sentiment").get<std::string>();
        int& b = balance[op.at("target_entity").get<std::string>()];
        if (sentiment == "Positive" || sentiment == "positive") ++b;
        if (sentiment == "Negative" || sentiment == "negative") --b;
      }
      Replaced r = replace_with_spans(sentence, names, rng);
      RawAspectSentence s;
      for (const auto& [placeholder, spans] : r.spans) {
        auto it = balance.find(placeholder);
        if (it == balance.end()) continue;
        const char* polarity = it->second > 0 ? "positive" : it->second < 0 ? "negative" : "neutral";
        for (const auto& [b, e] : spans) {
          s.terms.push_back({codepoints_before(r.text, b), codepoints_before(r.text, e), polarity});
        }
      }
      s.text = std::move(r.text);
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw SourceFormatError(origin, e.what());
    }
  }
  return out;
}

LabeledAspectItem clean_aspect_sentence(const RawAspectSentence& raw, const std::string& origin) {
  const CleanedText c = clean_text(raw.text);
  LabeledAspectItem item{c.text, {}, origin};
  for (const auto& term : raw.terms) {
    auto polarity = parse_sentiment(term.polarity);
    if (!polarity || term.to <= term.from) continue;
    std::size_t lo = c.char_map.size();
    std::size_t hi = 0;
    for (std::size_t i = 0; i < c.char_map.size(); ++i) {
      if (c.char_map[i] >= term.from && c.char_map[i] < term.to) {
        lo = std::min(lo, i);
        hi = i + 1;
      }
    }
    while (lo < hi && c.text[lo] == ' ') ++lo;
    while (hi > lo && c.text[hi - 1] == ' ') --hi;
    if (lo >= hi) continue;
    item.targets.push_back({lo, hi, *polarity});
  }
  std::sort(item.targets.begin(), item.targets.end());
  std::vector<AspectTarget> kept;
  for (const auto& t : item.targets) {
    if (!kept.empty() && t.start < kept.back().end) continue;
    kept.push_back(t);
  }
  item.targets = std::move(kept);
  return item;
}

namespace {

StanceLabel stance_or_throw(const std::string& label, const std::string& origin) {
  auto s = parse_stance(label);
  if (!s) throw SourceFormatError(origin, "unknown stance label '" + label + "'");
  return *s;
}

}  // namespace

std::vector<LabeledStancePair> read_fnc(std::string_view stances_csv, std::string_view bodies_csv,
                                        const std::string& origin) {
  auto find_column = [&](const CsvRow& header, std::string_view name) {
    for (std::size_t i = 0; i < header.fields.size(); ++i) {
      if (header.fields[i] == name) return i;
    }
    throw SourceFormatError(origin, "missing column '" + std::string(name) + "'");
  };

  const auto body_rows = parse_csv_rows(bodies_csv);
  if (body_rows.empty()) throw SourceFormatError(origin, "empty bodies file");
  const std::size_t b_id = find_column(body_rows[0], "Body ID");
  const std::size_t b_text = find_column(body_rows[0], "articleBody");
  std::unordered_map<std::string, std::string> bodies;
  for (std::size_t r = 1; r < body_rows.size(); ++r) {
    const auto& f = body_rows[r].fields;
    if (f.size() <= std::max(b_id, b_text)) throw SourceFormatError(origin, "short row in bodies file");
    bodies[f[b_id]] = cleaned(f[b_text]);
  }

  const auto rows = parse_csv_rows(stances_csv);
  if (rows.empty()) throw SourceFormatError(origin, "empty stances file");
  const std::size_t s_head = find_column(rows[0], "Headline");
  const std::size_t s_body = find_column(rows[0], "Body ID");
  const std::size_t s_label = find_column(rows[0], "Stance");
  std::vector<LabeledStancePair> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() <= std::max({s_head, s_body, s_label})) throw SourceFormatError(origin, "short row in stances file");
    auto body = bodies.find(f[s_body]);
    if (body == bodies.end()) throw SourceFormatError(origin, "unknown Body ID '" + f[s_body] + "'");
    out.push_back({cleaned(f[s_head]), body->second, stance_or_throw(f[s_label], origin), origin});
  }
  return out;
}

std::vector<LabeledStancePair> read_stance_jsonl(std::string_view text, const std::string& origin) {
  std::vector<LabeledStancePair> out;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({cleaned(j.at("claim").get<std::string>()), cleaned(j.at("body").get<std::string>()),
                     stance_or_throw(j.at("label").get<std::string>(), origin), origin});
    } catch (const nlohmann::json::exception& e) {
      throw SourceFormatError(origin, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Label>
struct Take {
  Label label;
  std::size_t count;
  bool all;  // the source must hold exactly `count` of this label
};

template <typename Item, typename Label>
std::vector<Item> take(const std::vector<Item>& items, const std::string& source,
                       const std::vector<Take<Label>>& takes) {
  std::map<Label, std::size_t> wanted, available, taken;
  for (const auto& t : takes) wanted[t.label] = t.count;
  for (const auto& item : items) ++available[item.label];
  for (const auto& t : takes) {
    const std::size_t have = available[t.label];
    const std::string label(to_string(t.label));
    if (t.all && have != t.count) throw CountMismatch(source + "/" + label, t.count, have);
    if (have < t.count) throw InsufficientExamples(source, label, t.count, have);
  }
  std::vector<Item> out;
  for (const auto& item : items) {
    auto it = wanted.find(item.label);
    if (it == wanted.end() || taken[item.label] == it->second) continue;
    ++taken[item.label];
    out.push_back(item);
  }
  return out;
}

template <typename Item>
void append(std::vector<Item>& to, const std::vector<Item>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

void expect_count(const std::string& source, std::size_t expected, std::size_t found) {
  if (expected != found) throw CountMismatch(source, expected, found);
}

template <typename Item>
nlohmann::json split_summary(const std::vector<Item>& items) {
  nlohmann::json by_origin = nlohmann::json::object();
  nlohmann::json by_label = nlohmann::json::object();
  for (const auto& item : items) {
    if constexpr (requires { item.label; }) {
      const std::string label(to_string(item.label));
      auto& origin = by_origin[item.origin];
      if (origin.is_null()) origin = nlohmann::json::object();
      origin[label] = origin.value(label, 0) + 1;
      by_label[label] = by_label.value(label, 0) + 1;
    } else {
      by_origin[item.origin] = by_origin.value(item.origin, 0) + 1;
    }
  }
  nlohmann::json j{{"total", items.size()}, {"by_origin", by_origin}};
  if (!by_label.empty()) j["by_label"] = by_label;
  return j;
}

template <typename Item, typename Label>
void check_class_totals(const std::vector<Item>& items, const std::string& split,
                        const std::vector<std::pair<Label, std::size_t>>& expected) {
  std::map<Label, std::size_t> counts;
  for (const auto& item : items) ++counts[item.label];
  for (const auto& [label, n] : expected) {
    expect_count(split + "/" + std::string(to_string(label)), n, counts[label]);
  }
}

using SL = SentimentLabel;
using ST = StanceLabel;

}  // namespace

Dataset<LabeledSentimentItem> build_sa_dataset(const SaSources& s) {
  Dataset<LabeledSentimentItem> d;
  expect_count("sst", 11855, s.sst.size());
  append(d.train, s.sst);
  append(d.train, take<LabeledSentimentItem, SL>(
                      s.amazon_test, "amazon_test",
                      {{SL::Positive, 1676, false}, {SL::Neutral, 3054, false}, {SL::Negative, 1842, false}}));
  append(d.train, take<LabeledSentimentItem, SL>(
                      s.yelp_test, "yelp_test",
                      {{SL::Positive, 1677, false}, {SL::Neutral, 3054, false}, {SL::Negative, 1842, false}}));
  const std::vector<Take<SL>> val_takes{{SL::Positive, 333, false}, {SL::Negative, 333, false}, {SL::Neutral, 334, false}};
  append(d.validation, take<LabeledSentimentItem, SL>(s.amazon_train, "amazon_train", val_takes));
  append(d.validation, take<LabeledSentimentItem, SL>(s.yelp_train, "yelp_train", val_takes));

  check_class_totals<LabeledSentimentItem, SL>(d.train, "train",
                                               {{SL::Positive, 8333}, {SL::Neutral, 8334}, {SL::Negative, 8333}});
  expect_count("train", 25000, d.train.size());
  expect_count("validation", 2000, d.validation.size());
  d.manifest = {{"task", "sa"}, {"train", split_summary(d.train)}, {"validation", split_summary(d.validation)}};
  return d;
}

Dataset<LabeledAspectItem> build_absa_dataset(const AbsaSources& s) {
  const std::vector<std::tuple<std::string, const std::vector<RawAspectSentence>*, std::size_t>> parts{
      {"semeval14", &s.semeval14, 9880},
      {"negation", &s.negation, 2423},
      {"mams", &s.mams, 5297},
      {"twitter", &s.twitter, 2358},
      {"yaso", &s.yaso, 1989},
      {"sentihood_train", &s.sentihood_train, 2977},
      {"sentihood_dev", &s.sentihood_dev, 747},
      {"sentihood_test", &s.sentihood_test, 1491},
  };
  std::vector<LabeledAspectItem> all;
  for (const auto& [name, items, expected] : parts) {
    expect_count(name, expected, items->size());
    for (const auto& raw : *items) all.push_back(clean_aspect_sentence(raw, name));
  }
  expect_count("absa total", 27162, all.size());

  Dataset<LabeledAspectItem> d;
  d.train.assign(all.begin(), all.begin() + 25000);
  d.validation.assign(all.begin() + 25000, all.end());
  d.manifest = {{"task", "absa"}, {"train", split_summary(d.train)}, {"validation", split_summary(d.validation)}};
  return d;
}

Dataset<LabeledStancePair> build_sd_dataset(const SdSources& s) {
  Dataset<LabeledStancePair> d;
  append(d.train, take<LabeledStancePair, ST>(s.fnc_train, "fnc_train",
                                              {{ST::Disagree, 840, true},
                                               {ST::Agree, 3678, true},
                                               {ST::Discuss, 5346, false},
                                               {ST::Unrelated, 3125, false}}));
  append(d.train, take<LabeledStancePair, ST>(s.arc, "arc",
                                              {{ST::Agree, 1257, true},
                                               {ST::Disagree, 1402, true},
                                               {ST::Discuss, 904, true},
                                               {ST::Unrelated, 3125, false}}));
  append(d.train, take<LabeledStancePair, ST>(s.perspectrum, "perspectrum",
                                              {{ST::Agree, 1315, false}, {ST::Disagree, 4008, false}}));
  append(d.validation, take<LabeledStancePair, ST>(s.fnc_test, "fnc_test",
                                                   {{ST::Unrelated, 500, false},
                                                    {ST::Agree, 500, false},
                                                    {ST::Discuss, 500, false},
                                                    {ST::Disagree, 500, false}}));

  check_class_totals<LabeledStancePair, ST>(
      d.train, "train", {{ST::Unrelated, 6250}, {ST::Agree, 6250}, {ST::Discuss, 6250}, {ST::Disagree, 6250}});
  expect_count("train", 25000, d.train.size());
  expect_count("validation", 2000, d.validation.size());
  d.manifest = {{"task", "sd"}, {"train", split_summary(d.train)}, {"validation", split_summary(d.validation)}};
  return d;
}

nlohmann::json to_json(const LabeledSentimentItem& item) {
  return {{"text", item.text}, {"label", to_string(item.label)}, {"origin", item.origin}};
}

nlohmann::json to_json(const LabeledAspectItem& item) {
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : item.targets) {
    targets.push_back({{"start", t.start}, {"end", t.end}, {"polarity", to_string(t.polarity)}});
  }
  return {{"text", item.text}, {"targets", targets}, {"origin", item.origin}};
}

nlohmann::json to_json(const LabeledStancePair& item) {
  return {{"claim", item.claim}, {"body", item.body}, {"label", to_string(item.label)}, {"origin", item.origin}};
}

DatasetTask parse_dataset_task(std::string_view name) {
  if (name == "sa") return DatasetTask::SA;
  if (name == "absa") return DatasetTask::ABSA;
  if (name == "sd") return DatasetTask::SD;
  throw Error("unknown dataset task '" + std::string(name) + "' (expected sa, absa or sd)");
}

// ---------------------------------------------------------------------------

namespace {

class SourceManifest {
 public:
  explicit SourceManifest(const std::filesystem::path& path) : base_(path.parent_path()) {
    try {
      j_ = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw Error("source manifest '" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (!j_.is_object()) throw Error("source manifest must be a JSON object");
  }

  const nlohmann::json& entry(const std::string& key) const {
    auto it = j_.find(key);
    if (it == j_.end()) throw Error("source manifest lacks '" + key + "'");
    return *it;
  }

  // A source entry is a path or a list of paths read in order.
  std::vector<std::filesystem::path> paths(const std::string& key) const { return paths_of(entry(key), key); }

  std::filesystem::path path_field(const std::string& key, const std::string& field) const {
    const auto& e = entry(key);
    if (!e.is_object() || !e.contains(field) || !e[field].is_string()) {
      throw Error("source '" + key + "' needs a '" + field + "' path");
    }
    return resolve(e[field].get<std::string>());
  }

  bool has(const std::string& key) const { return j_.contains(key); }

 private:
  std::filesystem::path resolve(const std::string& p) const {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_ / path;
  }

  std::vector<std::filesystem::path> paths_of(const nlohmann::json& e, const std::string& key) const {
    std::vector<std::filesystem::path> out;
    if (e.is_string()) {
      out.push_back(resolve(e.get<std::string>()));
    } else if (e.is_array()) {
      for (const auto& p : e) {
        if (!p.is_string()) throw Error("source '" + key + "' must list paths");
        out.push_back(resolve(p.get<std::string>()));
      }
    } else {
      throw Error("source '" + key + "' must be a path or a list of paths");
    }
    return out;
  }

  std::filesystem::path base_;
  nlohmann::json j_;
};

bool is_jsonl(const std::filesystem::path& p) { return p.extension() == ".jsonl"; }

std::vector<LabeledSentimentItem> load_sentiment_jsonl(std::string_view text, const std::string& origin) {
  std::vector<LabeledSentimentItem> out;
  for (auto line : split_lines(text)) {
    if (blank(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      auto label = parse_sentiment(j.at("label").get<std::string>());
      if (!label) throw SourceFormatError(origin, "unknown sentiment label");
      out.push_back({cleaned(j.at("text").get<std::string>()), *label, origin});
    } catch (const nlohmann::json::exception& e) {
      throw SourceFormatError(origin, e.what());
    }
  }
  return out;
}

std::vector<LabeledSentimentItem> load_sa_source(const SourceManifest& m, const std::string& key, bool trees) {
  std::vector<LabeledSentimentItem> out;
  for (const auto& p : m.paths(key)) {
    const std::string text = read_file(p);
    if (is_jsonl(p)) {
      append(out, load_sentiment_jsonl(text, key));
    } else if (trees) {
      append(out, read_sst(text, key));
    } else {
      append(out, read_star_csv(text, key));
    }
  }
  return out;
}

std::vector<RawAspectSentence> load_absa_source(const SourceManifest& m, const std::string& key) {
  std::vector<RawAspectSentence> out;
  for (const auto& p : m.paths(key)) {
    const std::string text = read_file(p);
    append(out, p.extension() == ".xml" ? read_aspect_xml(text, key) : read_aspect_jsonl(text, key));
  }
  return out;
}

std::vector<std::string> load_names(const std::filesystem::path& path) {
  std::vector<std::string> names;
  const std::string text = read_file(path);
  for (auto line : split_lines(text)) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string_view::npos) continue;
    const auto e = line.find_last_not_of(" \t");
    names.emplace_back(line.substr(b, e - b + 1));
  }
  return names;
}

std::vector<LabeledStancePair> load_sd_source(const SourceManifest& m, const std::string& key) {
  const auto& e = m.entry(key);
  if (e.is_object()) return read_fnc(read_file(m.path_field(key, "stances")), read_file(m.path_field(key, "bodies")), key);
  std::vector<LabeledStancePair> out;
  for (const auto& p : m.paths(key)) append(out, read_stance_jsonl(read_file(p), key));
  return out;
}

template <typename Item>
void write_jsonl(const std::filesystem::path& path, const std::vector<Item>& items) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& item : items) out << to_json(item).dump() << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

template <typename Item>
nlohmann::json write_dataset(const Dataset<Item>& d, const std::filesystem::path& out_dir, std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  write_jsonl(out_dir / "train.jsonl", d.train);
  write_jsonl(out_dir / "validation.jsonl", d.validation);
  nlohmann::json manifest = d.manifest;
  manifest["seed"] = seed;
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("cannot write manifest in '" + out_dir.string() + "'");
  return manifest;
}

}  // namespace

nlohmann::json build_dataset_from_manifest(DatasetTask task, const std::filesystem::path& sources_manifest,
                                           const std::filesystem::path& out_dir, std::uint64_t seed) {
  const SourceManifest m(sources_manifest);
  switch (task) {
    case DatasetTask::SA: {
      SaSources s;
      s.sst = load_sa_source(m, "sst", true);
      s.amazon_test = load_sa_source(m, "amazon_test", false);
      s.amazon_train = load_sa_source(m, "amazon_train", false);
      s.yelp_test = load_sa_source(m, "yelp_test", false);
      s.yelp_train = load_sa_source(m, "yelp_train", false);
      return write_dataset(build_sa_dataset(s), out_dir, seed);
    }
    case DatasetTask::ABSA: {
      AbsaSources s;
      s.semeval14 = load_absa_source(m, "semeval14");
      s.negation = load_absa_source(m, "negation");
      s.mams = load_absa_source(m, "mams");
      s.twitter = load_absa_source(m, "twitter");
      s.yaso = load_absa_source(m, "yaso");
      const auto names = m.has("names") ? load_names(m.paths("names").at(0)) : std::vector<std::string>{};
      SeededRng rng(seed);
      auto senti = [&](const std::string& key) {
        std::vector<RawAspectSentence> out;
        for (const auto& p : m.paths(key)) {
          const std::string text = read_file(p);
          append(out, is_jsonl(p) ? read_aspect_jsonl(text, key) : read_sentihood(text, key, names, rng));
        }
        return out;
      };
      s.sentihood_train = senti("sentihood_train");
      s.sentihood_dev = senti("sentihood_dev");
      s.sentihood_test = senti("sentihood_test");
      return write_dataset(build_absa_dataset(s), out_dir, seed);
    }
    case DatasetTask::SD: {
      SdSources s;
      s.fnc_train = load_sd_source(m, "fnc_train");
      s.fnc_test = load_sd_source(m, "fnc_test");
      s.arc = load_sd_source(m, "arc");
      s.perspectrum = load_sd_source(m, "perspectrum");
      return write_dataset(build_sd_dataset(s), out_dir, seed);
    }
  }
  throw Error("unreachable dataset task");
}

}  // namespace infotriage
