#include "support.hpp"

#include <unistd.h>

#include <fstream>

namespace infotriage::testing {

std::string Gen::word(std::size_t max_len, std::string_view alphabet) {
  std::string w;
  const std::size_t n = range(1, max_len);
  for (std::size_t i = 0; i < n; ++i) w += alphabet[below(alphabet.size())];
  return w;
}

std::string Gen::messy_text(std::size_t max_words) {
  static const std::vector<std::string> extras = {
      "https://t.co/AbC", "www.example.org/x", "#Jeb2016", "@POTUS", "COVID-19!!", "😀", "café", "Ünïcödé",
      "  ", "\t", "\n", "!?", "(x)", "100%", "$5", "a&b", "x/y", "it's", "–", "…", "GOOD", "Bad"};
  std::string out;
  const std::size_t n = range(0, max_words);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += coin(0.8) ? " " : "  ";
    if (coin(0.3)) {
      out += pick(extras);
    } else {
      std::string w = word(8, "abcdefghijklmnopqrstuvwxyzABCXYZ0123");
      out += w;
    }
  }
  return out;
}

std::shared_ptr<const Lexicon> tiny_lexicon() {
  return std::make_shared<const Lexicon>(Lexicon(std::unordered_map<std::string, int>{{"good", 1}, {"bad", -1}}));
}

SentimentLabel CountingBackend::sentiment(std::string_view t) const {
  ++calls_;
  return inner_->sentiment(t);
}

AspectTagging CountingBackend::aspects(std::string_view t) const {
  ++calls_;
  return inner_->aspects(t);
}

StanceLabel CountingBackend::stance(std::string_view c, std::string_view t) const {
  ++calls_;
  return inner_->stance(c, t);
}

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "infotriage-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

namespace {

void finish(OracleScores& s) {
  if (s.tp == 0) return;
  s.precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
  s.recall = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
  s.f1 = 2.0 * static_cast<double>(s.tp) / static_cast<double>(2 * s.tp + s.fp + s.fn);
}

}  // namespace

OracleScores oracle_scores(const std::vector<std::string>& doc_ids, const std::vector<bool>& predicted,
                           const std::vector<bool>& relevant) {
  OracleScores s;
  for (std::size_t i = 0; i < doc_ids.size(); ++i) {
    if (predicted[i] && relevant[i]) ++s.tp;
    if (predicted[i] && !relevant[i]) ++s.fp;
    if (!predicted[i] && relevant[i]) ++s.fn;
    if (!predicted[i] && !relevant[i]) ++s.tn;
  }
  finish(s);
  return s;
}

OracleScores oracle_absa(const std::vector<AspectTarget>& predicted, const std::vector<AspectTarget>& gold) {
  OracleScores s;
  std::vector<bool> used(gold.size(), false);
  for (const auto& p : predicted) {
    bool hit = false;
    for (std::size_t g = 0; g < gold.size() && !hit; ++g) {
      if (!used[g] && gold[g].start == p.start && gold[g].end == p.end && gold[g].polarity == p.polarity) {
        used[g] = true;
        hit = true;
      }
    }
    hit ? ++s.tp : ++s.fp;
  }
  for (bool u : used) s.fn += u ? 0 : 1;
  finish(s);
  return s;
}

Corpus make_corpus(const std::vector<std::pair<std::string, std::string>>& docs) {
  std::vector<CleanDocument> clean;
  for (const auto& [id, text] : docs) clean.push_back(make_clean_document(RawDocument{id, text, "test", {}, {}}));
  return Corpus("ctest", std::move(clean), "2026-01-01T00:00:00Z");
}

}  // namespace infotriage::testing
