#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "infotriage/corpus.hpp"
#include "infotriage/datasets.hpp"
#include "support.hpp"
#include "synthetic.hpp"

namespace infotriage {
namespace {

using testing::TempDir;
using testing::write_text;

TEST(MapStars, Examples) {
  EXPECT_EQ(map_stars(1), SentimentLabel::Negative);
  EXPECT_EQ(map_stars(2), SentimentLabel::Negative);
  EXPECT_EQ(map_stars(3), SentimentLabel::Neutral);
  EXPECT_EQ(map_stars(4), SentimentLabel::Positive);
  EXPECT_EQ(map_stars(5), SentimentLabel::Positive);
  EXPECT_THROW(map_stars(0), OutOfRange);
  EXPECT_THROW(map_stars(6), OutOfRange);
}

TEST(CollapseSst, Examples) {
  EXPECT_EQ(collapse_sst(Sst5::VeryPositive), SentimentLabel::Positive);
  EXPECT_EQ(collapse_sst(Sst5::Positive), SentimentLabel::Positive);
  EXPECT_EQ(collapse_sst(Sst5::Neutral), SentimentLabel::Neutral);
  EXPECT_EQ(collapse_sst(Sst5::Negative), SentimentLabel::Negative);
  EXPECT_EQ(collapse_sst(Sst5::VeryNegative), SentimentLabel::Negative);
}

TEST(ReplacePlaceholders, Examples) {
  EXPECT_EQ(replace_placeholders("LOCATION1 is nice", {"camden"}, 7), "camden is nice");
  const auto twice = replace_placeholders("LOCATION1 beats LOCATION1", {"a", "b"}, 12345);
  EXPECT_EQ(twice.substr(0, 1), twice.substr(twice.size() - 1));
  EXPECT_EQ(replace_placeholders("no placeholder here", {"x"}, 1), "no placeholder here");
  EXPECT_THROW(replace_placeholders("LOCATION1", {}, 1), EmptyNameList);
  EXPECT_THROW(replace_placeholders("nothing", {}, 1), EmptyNameList);
}

TEST(ReplacePlaceholders, DeterministicAndIndependentDraws) {
  const std::vector<std::string> names = {"a", "b", "c", "d", "e", "f", "g", "h"};
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = replace_placeholders("LOCATION1 and LOCATION2 and LOCATION1", names, seed);
    EXPECT_EQ(s, replace_placeholders("LOCATION1 and LOCATION2 and LOCATION1", names, seed));
    EXPECT_EQ(s[0], s[s.size() - 1]);
    seen.insert(s);
  }
  EXPECT_GT(seen.size(), 40u);  // both placeholders vary, collisions included
  bool collision = false;
  for (const auto& s : seen) collision = collision || s[0] == s[6];
  EXPECT_TRUE(collision);
}

TEST(SeededRng, UniformEnough) {
  SeededRng rng(99);
  std::vector<int> counts(4);
  for (int i = 0; i < 40000; ++i) ++counts[rng.below(4)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Adapters, SstTrees) {
  const auto items = read_sst("(4 (2 It) (4 (3 -LRB-works-RRB-) (2 !)))\n\n(1 (1 Bad) (2 -LRB-) (2 x) (2 -RRB-))\n", "sst");
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].label, SentimentLabel::Positive);
  EXPECT_EQ(items[1].text, "bad ( x )");
  EXPECT_EQ(items[1].label, SentimentLabel::Negative);
  EXPECT_THROW(read_sst("(9 x)\n", "sst"), SourceFormatError);
  EXPECT_THROW(read_sst("(2 (2 x)\n", "sst"), SourceFormatError);
}

TEST(Adapters, StarCsv) {
  const auto items = read_star_csv("\"5\",\"Great\",\"Loved it, truly\"\n\"3\",\"meh\"\n", "amazon");
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].text, "great loved it, truly");
  EXPECT_EQ(items[0].label, SentimentLabel::Positive);
  EXPECT_EQ(items[1].label, SentimentLabel::Neutral);
  EXPECT_THROW(read_star_csv("x,hello\n", "amazon"), SourceFormatError);
  EXPECT_THROW(read_star_csv("7,hello\n", "amazon"), OutOfRange);
}

TEST(Adapters, AspectXmlAndCleaning) {
  const std::string xml =
      "<sentences><sentence id=\"1\"><text>The Café &amp; BAR rocks</text><aspectTerms>"
      "<aspectTerm term=\"Café\" polarity=\"positive\" from=\"4\" to=\"8\"/>"
      "<aspectTerm term=\"BAR\" polarity=\"conflict\" from=\"11\" to=\"14\"/>"
      "</aspectTerms></sentence><sentence id=\"2\"><text>none</text></sentence></sentences>";
  const auto raw = read_aspect_xml(xml, "semeval14");
  ASSERT_EQ(raw.size(), 2u);
  const auto item = clean_aspect_sentence(raw[0], "semeval14");
  EXPECT_EQ(item.text, "the cafe & bar rocks");
  ASSERT_EQ(item.targets.size(), 1u);  // conflict polarity dropped
  EXPECT_EQ(item.text.substr(item.targets[0].start, item.targets[0].end - item.targets[0].start), "cafe");
  EXPECT_THROW(read_aspect_xml("<nope>", "x"), SourceFormatError);
}

TEST(Adapters, AspectCleaningDropsOverlapsAndEmptySpans) {
  RawAspectSentence raw{"Hi 😀 there friend", {{3, 4, "positive"}, {5, 10, "negative"}, {7, 12, "neutral"}}};
  const auto item = clean_aspect_sentence(raw, "x");
  EXPECT_EQ(item.text, "hi there friend");
  ASSERT_EQ(item.targets.size(), 1u);
  EXPECT_EQ(item.text.substr(item.targets[0].start, item.targets[0].end - item.targets[0].start), "there");
}

TEST(Adapters, Sentihood) {
  SeededRng rng(5);
  const auto raw = read_sentihood(
      R"([{"text":" LOCATION1 beats LOCATION2","opinions":[
           {"target_entity":"LOCATION1","aspect":"a","sentiment":"Positive"},
           {"target_entity":"LOCATION1","aspect":"b","sentiment":"Negative"},
           {"target_entity":"LOCATION2","aspect":"a","sentiment":"Negative"}]}])",
      "sentihood", {"Zürich"}, rng);
  ASSERT_EQ(raw.size(), 1u);
  const auto item = clean_aspect_sentence(raw[0], "sentihood");
  EXPECT_EQ(item.text, "zurich beats zurich");
  ASSERT_EQ(item.targets.size(), 2u);
  EXPECT_EQ(item.targets[0], (AspectTarget{0, 6, SentimentLabel::Neutral}));
  EXPECT_EQ(item.targets[1], (AspectTarget{13, 19, SentimentLabel::Negative}));
}

TEST(Adapters, FncPairs) {
  const auto pairs = read_fnc("Headline,Body ID,Stance\n\"A, claim\",7,agree\nOther,8,unrelated\n",
                              "Body ID,articleBody\n7,\"Body\nseven\"\n8,Eight\n", "fnc");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].claim, "a, claim");
  EXPECT_EQ(pairs[0].body, "body seven");
  EXPECT_EQ(pairs[0].label, StanceLabel::Agree);
  EXPECT_THROW(read_fnc("Headline,Body ID,Stance\nx,9,agree\n", "Body ID,articleBody\n", "fnc"), SourceFormatError);
  EXPECT_THROW(read_fnc("Headline,Body ID,Stance\nx,1,maybe\n", "Body ID,articleBody\n1,b\n", "fnc"), SourceFormatError);
  EXPECT_THROW(read_fnc("Headline,Stance\n", "Body ID,articleBody\n", "fnc"), SourceFormatError);
}

std::vector<LabeledSentimentItem> sentiment_items(std::size_t pos, std::size_t neu, std::size_t neg) {
  std::vector<LabeledSentimentItem> out;
  for (std::size_t i = 0; i < std::max({pos, neu, neg}); ++i) {
    if (i < neg) out.push_back({"n" + std::to_string(i), SentimentLabel::Negative, "t"});
    if (i < neu) out.push_back({"u" + std::to_string(i), SentimentLabel::Neutral, "t"});
    if (i < pos) out.push_back({"p" + std::to_string(i), SentimentLabel::Positive, "t"});
  }
  return out;
}

SaSources conforming_sa() {
  SaSources s;
  s.sst = sentiment_items(4980, 2226, 4649);
  s.amazon_test = sentiment_items(1700, 3100, 1900);
  s.yelp_test = sentiment_items(1700, 3100, 1900);
  s.amazon_train = sentiment_items(400, 400, 400);
  s.yelp_train = sentiment_items(400, 400, 400);
  return s;
}

TEST(BuildSa, ConformingSources) {
  const auto d = build_sa_dataset(conforming_sa());
  std::map<SentimentLabel, std::size_t> counts;
  for (const auto& i : d.train) ++counts[i.label];
  EXPECT_EQ(counts[SentimentLabel::Positive], 8333u);
  EXPECT_EQ(counts[SentimentLabel::Neutral], 8334u);
  EXPECT_EQ(counts[SentimentLabel::Negative], 8333u);
  EXPECT_EQ(d.train.size(), 25000u);
  EXPECT_EQ(d.validation.size(), 2000u);
  EXPECT_EQ(11855 + 6572 + 6573, 25000);
  // "First N" keeps file order: the first Amazon positive taken is p0.
  EXPECT_EQ(d.train[11855].text, "n0");
}

TEST(BuildSa, InsufficientExamples) {
  auto s = conforming_sa();
  s.amazon_test = sentiment_items(1000, 3100, 1900);
  try {
    build_sa_dataset(s);
    FAIL();
  } catch (const InsufficientExamples& e) {
    EXPECT_EQ(e.source(), "amazon_test");
    EXPECT_EQ(e.needed(), 1676u);
    EXPECT_EQ(e.found(), 1000u);
  }
}

TEST(BuildSa, TallyMismatch) {
  auto s = conforming_sa();
  s.sst = sentiment_items(4981, 2225, 4649);
  EXPECT_THROW(build_sa_dataset(s), CountMismatch);
}

AbsaSources conforming_absa() {
  auto n = [](std::size_t count) { return std::vector<RawAspectSentence>(count, RawAspectSentence{"text", {}}); };
  AbsaSources s;
  s.semeval14 = n(9880);
  s.negation = n(2423);
  s.mams = n(5297);
  s.twitter = n(2358);
  s.yaso = n(1989);
  s.sentihood_train = n(2977);
  s.sentihood_dev = n(747);
  s.sentihood_test = n(1491);
  return s;
}

TEST(BuildAbsa, ConformingSources) {
  const auto d = build_absa_dataset(conforming_absa());
  EXPECT_EQ(d.train.size(), 25000u);
  EXPECT_EQ(d.validation.size(), 2162u);
  // Validation is the Sentihood dev set less its first 76 items, then the test set.
  EXPECT_EQ(d.validation.front().origin, "sentihood_dev");
  EXPECT_EQ(d.validation.back().origin, "sentihood_test");
  EXPECT_EQ(std::count_if(d.validation.begin(), d.validation.end(), [](auto& i) { return i.origin == "sentihood_dev"; }), 671);
}

TEST(BuildAbsa, CountMismatches) {
  auto s = conforming_absa();
  s.mams.resize(5000);
  try {
    build_absa_dataset(s);
    FAIL();
  } catch (const CountMismatch& e) {
    EXPECT_EQ(e.source(), "mams");
    EXPECT_EQ(e.expected(), 5297u);
    EXPECT_EQ(e.found(), 5000u);
  }
  s = conforming_absa();
  s.sentihood_test.clear();
  EXPECT_THROW(build_absa_dataset(s), CountMismatch);
}

std::vector<LabeledStancePair> stance_items(std::size_t unrelated, std::size_t agree, std::size_t discuss,
                                            std::size_t disagree) {
  std::vector<LabeledStancePair> out;
  const std::size_t counts[] = {unrelated, agree, discuss, disagree};
  for (std::size_t i = 0; i < std::max({unrelated, agree, discuss, disagree}); ++i) {
    for (int k = 0; k < 4; ++k) {
      if (i < counts[k]) out.push_back({"c", "b" + std::to_string(i), static_cast<StanceLabel>(k), "t"});
    }
  }
  return out;
}

SdSources conforming_sd() {
  SdSources s;
  s.fnc_train = stance_items(4000, 3678, 6000, 840);
  s.arc = stance_items(3500, 1257, 904, 1402);
  s.perspectrum = stance_items(0, 1400, 0, 4100);
  s.fnc_test = stance_items(600, 600, 600, 600);
  return s;
}

TEST(BuildSd, ConformingSources) {
  const auto d = build_sd_dataset(conforming_sd());
  std::map<StanceLabel, std::size_t> train, val;
  for (const auto& i : d.train) ++train[i.label];
  for (const auto& i : d.validation) ++val[i.label];
  for (auto l : {StanceLabel::Unrelated, StanceLabel::Agree, StanceLabel::Discuss, StanceLabel::Disagree}) {
    EXPECT_EQ(train[l], 6250u);
    EXPECT_EQ(val[l], 500u);
  }
  EXPECT_EQ(3678 + 1257 + 1315, 6250);
}

TEST(BuildSd, AllMeansAll) {
  auto s = conforming_sd();
  s.fnc_train = stance_items(4000, 3679, 6000, 840);
  EXPECT_THROW(build_sd_dataset(s), CountMismatch);
  s = conforming_sd();
  s.perspectrum = stance_items(0, 1000, 0, 4100);
  EXPECT_THROW(build_sd_dataset(s), InsufficientExamples);
}

void expect_same_files(const std::filesystem::path& a, const std::filesystem::path& b) {
  for (const char* f : {"train.jsonl", "validation.jsonl", "manifest.json"}) {
    EXPECT_TRUE(read_file(a / f) == read_file(b / f)) << f;
  }
}

TEST(BuildFromManifest, SyntheticSourcesAllTasks) {
  TempDir dir;
  for (auto task : {DatasetTask::SA, DatasetTask::ABSA, DatasetTask::SD}) {
    const auto sub = dir / std::to_string(static_cast<int>(task));
    const auto sources = testing::write_synthetic_sources(task, sub / "src");
    const auto m = build_dataset_from_manifest(task, sources, sub / "out1", 42);
    build_dataset_from_manifest(task, sources, sub / "out2", 42);
    expect_same_files(sub / "out1", sub / "out2");
    EXPECT_EQ(m["train"]["total"], 25000);
    EXPECT_EQ(m["seed"], 42);
    // Every emitted text is already clean.
    std::ifstream in(sub / "out1" / "train.jsonl");
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      const std::string text = j.contains("text") ? j["text"].get<std::string>() : j["body"].get<std::string>();
      ASSERT_EQ(clean_text(text).text, text);
      if (j.contains("targets")) {
        std::size_t last_end = 0;
        for (const auto& t : j["targets"]) {
          ASSERT_LE(last_end, t["start"].get<std::size_t>());
          ASSERT_LT(t["start"].get<std::size_t>(), t["end"].get<std::size_t>());
          ASSERT_LE(t["end"].get<std::size_t>(), text.size());
          last_end = t["end"];
        }
      }
      ++n;
    }
    EXPECT_EQ(n, 25000u);
  }
}

TEST(BuildFromManifest, SeedChangesOnlyPlaceholderDraws) {
  TempDir dir;
  const auto sources = testing::write_synthetic_sources(DatasetTask::ABSA, dir / "src");
  build_dataset_from_manifest(DatasetTask::ABSA, sources, dir / "a", 1);
  build_dataset_from_manifest(DatasetTask::ABSA, sources, dir / "b", 2);
  EXPECT_TRUE(read_file(dir / "a" / "validation.jsonl") != read_file(dir / "b" / "validation.jsonl"));
  // Every placeholder became one of the listed names, intact.
  const std::set<std::string> names = {"camden", "lagos", "kyoto", "lima"};
  std::ifstream in(dir / "a" / "validation.jsonl");
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    const std::string text = j["text"];
    ASSERT_TRUE(names.count(text.substr(0, text.find(' ')))) << text;
  }
}

TEST(BuildFromManifest, MissingSource) {
  TempDir dir;
  write_text(dir / "sources.json", "{\"sst\": \"missing.txt\"}");
  EXPECT_THROW(build_dataset_from_manifest(DatasetTask::SA, dir / "sources.json", dir / "out", 1), Error);
  EXPECT_THROW(parse_dataset_task("xyz"), Error);
}

}  // namespace
}  // namespace infotriage
