#include "infotriage/classify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace infotriage {

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) throw EmptyVector();
  for (double s : scores) {
    if (!std::isfinite(s)) throw NonFiniteInput();
  }
  const double peak = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::string_view to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::SA: return "SA";
    case HeadKind::SD: return "SD";
    case HeadKind::ABSA: return "ABSA";
  }
  return "?";
}

HeadGeometry head_geometry(HeadKind kind, const ModelGeometry& geometry) {
  HeadGeometry h;
  h.kind = kind;
  switch (kind) {
    case HeadKind::SA:
      h.input_dim = geometry.flattened_dim();
      h.output_nodes = 3;
      break;
    case HeadKind::SD:
      h.input_dim = geometry.flattened_dim();
      h.output_nodes = 4;
      break;
    case HeadKind::ABSA:
      h.input_dim = geometry.embed_dim;
      h.output_nodes = 4;
      h.shared_across_tokens = true;
      break;
  }
  // Dense layer: one weight per input plus a bias, per output node.
  h.parameter_count = h.output_nodes * (h.input_dim + 1);
  return h;
}

nlohmann::json TrainingRecipe::to_json() const {
  return {
      {"optimizer", optimizer},
      {"learning_rate", learning_rate},
      {"epochs", epochs},
      {"restarts", restarts},
      {"selection", selection},
      {"max_tokens", max_tokens},
      {"train_size", train_size},
  };
}

std::string capability_names(unsigned caps) {
  std::string out;
  auto add = [&](Capability c, const char* name) {
    if ((caps & c) == 0) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add(kSentiment, "sentiment");
  add(kAspects, "aspects");
  add(kStance, "stance");
  return out;
}

SentimentLabel ClassifierBackend::sentiment(std::string_view) const { throw Unsupported(name(), "sentiment"); }
AspectTagging ClassifierBackend::aspects(std::string_view) const { throw Unsupported(name(), "aspects"); }
StanceLabel ClassifierBackend::stance(std::string_view, std::string_view) const {
  throw Unsupported(name(), "stance");
}

namespace {

std::string_view trim_punct(std::string_view token) {
  constexpr std::string_view kPunct = ".,!?;:'\"()";
  while (!token.empty() && kPunct.find(token.front()) != std::string_view::npos) token.remove_prefix(1);
  while (!token.empty() && kPunct.find(token.back()) != std::string_view::npos) token.remove_suffix(1);
  return token;
}

std::string_view token_text(std::string_view text, const TokenSpan& span) {
  return text.substr(span.start, span.end - span.start);
}

std::set<std::string_view> content_tokens(std::string_view text) {
  std::set<std::string_view> out;
  for (const auto& span : whitespace_tokens(text)) {
    auto t = trim_punct(token_text(text, span));
    if (!t.empty() && !is_stopword(t)) out.insert(t);
  }
  return out;
}

}  // namespace

const std::vector<std::string_view>& stopwords() {
  static const std::vector<std::string_view> kWords = {
      "the",  "an",    "and",  "or",   "but",   "if",   "of",    "at",   "by",   "for",
      "with", "about", "to",   "from", "in",    "on",   "is",    "are",  "was",  "were",
      "be",   "been",  "being", "am",  "it",    "its",  "this",  "that", "these", "those",
      "he",   "she",   "they", "we",   "you",   "his",  "her",   "their", "our", "your",
      "as",   "so",    "than", "then", "there", "has",  "have",  "had",  "do",   "does",
  };
  return kWords;
}

bool is_stopword(std::string_view token) {
  const auto& words = stopwords();
  return std::find(words.begin(), words.end(), trim_punct(token)) != words.end();
}

Lexicon::Lexicon(std::unordered_map<std::string, int> polarity) : polarity_(std::move(polarity)) {
  for (auto& [word, value] : polarity_) {
    if (value != 1 && value != -1) throw Error("lexicon polarity for '" + word + "' must be +1 or -1");
  }
}

Lexicon Lexicon::parse(std::string_view contents) {
  std::unordered_map<std::string, int> entries;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    std::string_view line = contents.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? contents.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw Error("lexicon line " + std::to_string(line_no) + ": expected word<TAB>polarity");
    std::string word(line.substr(0, tab));
    std::string_view value = line.substr(tab + 1);
    int polarity = 0;
    if (value == "+1" || value == "1") {
      polarity = 1;
    } else if (value == "-1") {
      polarity = -1;
    } else {
      throw Error("lexicon line " + std::to_string(line_no) + ": polarity must be +1 or -1");
    }
    entries[clean_text(word).text] = polarity;
  }
  return Lexicon(std::move(entries));
}

Lexicon Lexicon::load(const std::filesystem::path& path) { return parse(read_file(path)); }

int Lexicon::polarity(std::string_view token) const {
  auto t = trim_punct(token);
  if (t.empty()) return 0;
  auto it = polarity_.find(std::string(t));
  return it == polarity_.end() ? 0 : it->second;
}

Lexicon Lexicon::negated() const {
  auto copy = polarity_;
  for (auto& [word, value] : copy) value = -value;
  return Lexicon(std::move(copy));
}

SentimentLabel lexicon_sentiment(std::string_view cleaned_text, const Lexicon& lexicon) {
  long sum = 0;
  for (const auto& span : whitespace_tokens(cleaned_text)) sum += lexicon.polarity(token_text(cleaned_text, span));
  if (sum > 0) return SentimentLabel::Positive;
  if (sum < 0) return SentimentLabel::Negative;
  return SentimentLabel::Neutral;
}

AspectTagging lexicon_aspects(std::string_view cleaned_text, const Lexicon& lexicon, std::size_t window) {
  std::vector<TokenSpan> tokens = whitespace_tokens(cleaned_text);
  std::vector<int> polarity(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) polarity[i] = lexicon.polarity(token_text(cleaned_text, tokens[i]));

  std::vector<AspectTag> tags(tokens.size(), AspectTag::Null);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (polarity[i] != 0 || is_stopword(token_text(cleaned_text, tokens[i]))) continue;
    // Nearest opinion word within the window; the earlier one wins a tie.
    for (std::size_t d = 1; d <= window; ++d) {
      int found = 0;
      if (i >= d && polarity[i - d] != 0) {
        found = polarity[i - d];
      } else if (i + d < tokens.size() && polarity[i + d] != 0) {
        found = polarity[i + d];
      }
      if (found != 0) {
        tags[i] = found > 0 ? AspectTag::Positive : AspectTag::Negative;
        break;
      }
    }
  }
  return make_tagging(std::move(tokens), std::move(tags));
}

double token_overlap(std::string_view a, std::string_view b) {
  auto sa = content_tokens(a);
  auto sb = content_tokens(b);
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (auto t : sa) common += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

StanceLabel lexicon_stance(std::string_view cleaned_claim, std::string_view cleaned_text, const Lexicon& lexicon,
                           double relatedness_threshold, std::size_t /*window*/) {
  if (token_overlap(cleaned_claim, cleaned_text) < relatedness_threshold) return StanceLabel::Unrelated;
  const auto claim = lexicon_sentiment(cleaned_claim, lexicon);
  const auto doc = lexicon_sentiment(cleaned_text, lexicon);
  if (claim == SentimentLabel::Neutral || doc == SentimentLabel::Neutral) return StanceLabel::Discuss;
  return claim == doc ? StanceLabel::Agree : StanceLabel::Disagree;
}

LexiconBackend::LexiconBackend(std::string name, std::shared_ptr<const Lexicon> lexicon, LexiconOptions options,
                               unsigned capabilities)
    : name_(std::move(name)), lexicon_(std::move(lexicon)), options_(options), capabilities_(capabilities) {
  if (!lexicon_) throw Error("lexicon backend requires a lexicon");
  if (options_.relatedness_threshold < 0.0 || options_.relatedness_threshold > 1.0) {
    throw Error("relatedness threshold must lie in [0, 1]");
  }
}

SentimentLabel LexiconBackend::sentiment(std::string_view cleaned_text) const {
  if (!supports(kSentiment)) throw Unsupported(name_, "sentiment");
  return lexicon_sentiment(cleaned_text, *lexicon_);
}

AspectTagging LexiconBackend::aspects(std::string_view cleaned_text) const {
  if (!supports(kAspects)) throw Unsupported(name_, "aspects");
  return lexicon_aspects(cleaned_text, *lexicon_, options_.window);
}

StanceLabel LexiconBackend::stance(std::string_view cleaned_claim, std::string_view cleaned_text) const {
  if (!supports(kStance)) throw Unsupported(name_, "stance");
  return lexicon_stance(cleaned_claim, cleaned_text, *lexicon_, options_.relatedness_threshold, options_.window);
}

}  // namespace infotriage

namespace infotriage {

std::string_view builtin_lexicon_text();

const Lexicon& Lexicon::builtin() {
  static const Lexicon kBuiltin = Lexicon::parse(builtin_lexicon_text());
  return kBuiltin;
}

}  // namespace infotriage
