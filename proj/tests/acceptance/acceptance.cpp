// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <signal.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "infotriage/classify.hpp"
#include "infotriage/corpus.hpp"
#include "infotriage/datasets.hpp"
#include "infotriage/evaluate.hpp"
#include "infotriage/query.hpp"
#include "infotriage/query_json.hpp"
#include "infotriage/remote_backend.hpp"
#include "infotriage/tokenizer.hpp"
#include "sidecar.hpp"
#include "support.hpp"
#include "synthetic.hpp"

namespace {

using namespace infotriage;
using infotriage::testing::Gen;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

const std::filesystem::path kSource = INFOTRIAGE_SOURCE_DIR;

// A criterion fails by throwing; the message says what went wrong.
struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string two_dp(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// ---------------------------------------------------------------------------

std::string metric_oracle() {
  const auto started = Clock::now();
  Gen g(1001);
  for (int instance = 0; instance < 1000; ++instance) {
    const std::size_t n = g.range(1, 60);
    std::vector<std::string> ids;
    std::vector<bool> predicted(n), relevant(n);
    GoldRelevance gold;
    std::vector<std::string> predicted_ids;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back("d" + std::to_string(i));
      relevant[i] = g.coin(g.real(0.05, 0.95));
      predicted[i] = g.coin(g.real(0.05, 0.95));
      gold[ids[i]] = relevant[i];
      if (predicted[i]) predicted_ids.push_back(ids[i]);
    }
    std::shuffle(predicted_ids.begin(), predicted_ids.end(), g.engine());
    const auto c = confusion(predicted_ids, gold);
    const auto row = prf(c, "x");
    const auto o = testing::oracle_scores(ids, predicted, relevant);
    require(c.tp == o.tp && c.fp == o.fp && c.fn == o.fn && c.tn && *c.tn == o.tn,
            "confusion differs from the oracle at instance " + std::to_string(instance));
    require(row.precision == o.precision && row.recall == o.recall,
            "precision/recall differ at instance " + std::to_string(instance));
    require(std::abs(row.f1 - o.f1) <= 1e-12, "F1 differs at instance " + std::to_string(instance));

    std::vector<AspectTarget> pa, ga;
    const std::size_t text_len = g.range(1, 40);
    auto random_targets = [&](std::vector<AspectTarget>& out) {
      for (std::size_t k = g.below(6); k > 0; --k) {
        const std::size_t s = g.below(text_len);
        out.push_back({s, s + g.range(1, 4), static_cast<SentimentLabel>(g.below(3))});
      }
    };
    random_targets(pa);
    random_targets(ga);
    if (g.coin()) pa.insert(pa.end(), ga.begin(), ga.begin() + g.below(ga.size() + 1));
    const auto a = exact_match_absa(pa, ga);
    const auto oa = testing::oracle_absa(pa, ga);
    require(a.tp == oa.tp && a.fp == oa.fp && a.fn == oa.fn,
            "exact_match_absa differs at instance " + std::to_string(instance));
    const auto arow = prf(a, "absa");
    require(std::abs(arow.f1 - oa.f1) <= 1e-12, "ABSA F1 differs at instance " + std::to_string(instance));
  }
  const double secs = seconds_since(started);
  require(secs < 10.0, "took " + std::to_string(secs) + " s");
  return "1000 instances in " + two_dp(secs) + " s";
}

std::string zero_tp() {
  Gen g(55);
  for (int i = 0; i < 100; ++i) {
    ConfusionCounts c;
    c.tp = 0;
    c.fp = g.below(1000);
    c.fn = g.below(1000);
    const auto row = prf(c, "z");
    require(row.precision == 0.0 && row.recall == 0.0 && row.f1 == 0.0,
            "non-zero score for fp=" + std::to_string(c.fp) + " fn=" + std::to_string(c.fn));
    require(!std::signbit(row.precision) && !std::isnan(row.f1), "score is not +0.0");
  }
  return "100 cases";
}

std::string claim_expansion() {
  const auto templates = claim_templates_from_json(load_json_file(kSource / "cookbook" / "covid_cq" / "claims.json"));
  const auto claims = expand_claims(templates, false);
  const auto negated = expand_claims(templates, true);
  require(claims.size() == 9 && negated.size() == 9,
          std::to_string(claims.size()) + " claims, " + std::to_string(negated.size()) + " negated");
  auto joined = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& c : v) s += c + '\n';
    return s;
  };
  require(joined(claims) == read_file(kSource / "tests" / "golden" / "covid_cq_claims.txt"), "claims differ from golden");
  require(joined(negated) == read_file(kSource / "tests" / "golden" / "covid_cq_claims_negated.txt"),
          "negated claims differ from golden");
  require(claims[2] == "hydroxychloroquine is a cure for COVID", "claim 3 is '" + claims[2] + "'");
  require(negated[2] == "It is not the case that " + claims[2], "negated claim 3 is '" + negated[2] + "'");
  return "9 + 9 claims byte-exact";
}

Vocabulary letter_vocabulary() {
  std::vector<std::string> tokens = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
  for (char c = 'a'; c <= 'z'; ++c) {
    tokens.push_back(std::string(1, c));
    tokens.push_back("##" + std::string(1, c));
  }
  for (const char* w : {"the", "vaccine", "cure", "good", "bad", "##ing", "##ed"}) tokens.push_back(w);
  for (char c : std::string("0123456789#@'-.,!?%$&/():;")) tokens.push_back(std::string(1, c));
  return Vocabulary(tokens);
}

void check_sequence(const TokenSequence& s, const Vocabulary& v, bool pair, const std::string& where) {
  const auto& geo = kDefaultGeometry;
  require(s.ids.size() == geo.max_tokens && s.segment_ids.size() == geo.max_tokens, where + ": length is not 192");
  require(s.ids[0] == v.cls_id(), where + ": first id is not [CLS]");
  require(s.actual_length >= 2 && s.actual_length <= geo.max_tokens, where + ": bad actual_length");
  require(s.ids[s.actual_length - 1] == v.sep_id(), where + ": content does not end in [SEP]");
  std::size_t seps = 0, switches = 0;
  for (std::size_t i = 0; i < s.actual_length; ++i) {
    seps += s.ids[i] == v.sep_id();
    require(s.ids[i] != v.pad_id(), where + ": pad inside the content");
    if (i > 0 && s.segment_ids[i] != s.segment_ids[i - 1]) {
      require(s.segment_ids[i - 1] == 0 && s.segment_ids[i] == 1, where + ": segment goes 1 -> 0");
      ++switches;
    }
  }
  for (std::size_t i = s.actual_length; i < s.ids.size(); ++i) {
    require(s.ids[i] == v.pad_id(), where + ": non-pad after the content");
  }
  require(seps == (pair ? 2u : 1u), where + ": " + std::to_string(seps) + " [SEP]s");
  require(s.segment_ids[0] == 0 && switches == (pair ? 1u : 0u), where + ": segment switches " + std::to_string(switches));
}

std::string sequence_geometry() {
  const Vocabulary v = letter_vocabulary();
  Gen g(192);
  for (int i = 0; i < 1000; ++i) {
    const std::string text = clean_text(g.messy_text(g.coin(0.2) ? 400 : 20)).text;
    check_sequence(encode_single(text, v), v, false, "single #" + std::to_string(i));
    const std::string claim = clean_text(g.messy_text(8)).text;
    check_sequence(encode_pair(claim, text, v), v, true, "pair #" + std::to_string(i));
  }
  return "1000 texts, single and pair";
}

std::string head_geometry_check() {
  const auto absa = head_geometry(HeadKind::ABSA).parameter_count;
  const auto sa = head_geometry(HeadKind::SA).parameter_count;
  const auto sd = head_geometry(HeadKind::SD).parameter_count;
  require(absa == 3076, "ABSA " + std::to_string(absa));
  require(sa == 442371, "SA " + std::to_string(sa));
  require(sd == 589828, "SD " + std::to_string(sd));
  require(kDefaultGeometry.flattened_dim() == 147456, "flattened dim");
  return "ABSA 3076, SA 442371, SD 589828, flattened 147456";
}

void check_dataset_manifest(DatasetTask task, const json& m, const std::string& where) {
  auto label_count = [&](const char* split, const char* label) {
    return m[split]["by_label"].value(label, std::size_t{0});
  };
  require(m["train"]["total"] == 25000, where + ": train total " + m["train"]["total"].dump());
  switch (task) {
    case DatasetTask::SA:
      require(label_count("train", "positive") == 8333 && label_count("train", "neutral") == 8334 &&
                  label_count("train", "negative") == 8333,
              where + ": SA train classes " + m["train"]["by_label"].dump());
      require(m["validation"]["total"] == 2000, where + ": SA validation " + m["validation"]["total"].dump());
      break;
    case DatasetTask::ABSA:
      require(m["validation"]["total"] == 2162, where + ": ABSA validation " + m["validation"]["total"].dump());
      break;
    case DatasetTask::SD:
      for (const char* l : {"unrelated", "agree", "discuss", "disagree"}) {
        require(label_count("train", l) == 6250, where + ": SD train " + l);
        require(label_count("validation", l) == 500, where + ": SD validation " + l);
      }
      break;
  }
}

std::string dataset_recipes() {
  const auto started = Clock::now();
  testing::TempDir dir;
  const std::pair<DatasetTask, const char*> tasks[] = {
      {DatasetTask::SA, "sa"}, {DatasetTask::ABSA, "absa"}, {DatasetTask::SD, "sd"}};
  for (const auto& [task, name] : tasks) {
    const auto sources = testing::write_synthetic_sources(task, dir / (std::string(name) + "_src"));
    check_dataset_manifest(task, build_dataset_from_manifest(task, sources, dir / name, 42), name);
  }
  const double secs = seconds_since(started);
  require(secs < 30.0, "took " + std::to_string(secs) + " s");
  std::string note = "synthetic sources in " + two_dp(secs) + " s";
  // Real source manifests, when provided, must satisfy the same counts.
  for (const auto& [task, name] : tasks) {
    std::string var = "INFOTRIAGE_" + std::string(name) + "_SOURCES";
    std::transform(var.begin(), var.end(), var.begin(), ::toupper);
    if (const char* path = std::getenv(var.c_str())) {
      check_dataset_manifest(task, build_dataset_from_manifest(task, path, dir / (std::string(name) + "_real"), 42),
                             std::string(name) + " (real)");
      note += ", real " + std::string(name);
    }
  }
  return note;
}

// ---------------------------------------------------------------------------
// Search

std::vector<std::pair<std::string, std::string>> engineered_docs() {
  const std::vector<std::string> topics = {"vaccine", "garlic", "hydroxychloroquine", "weather", "football", "5g"};
  const std::vector<std::string> opinions = {"good", "great", "wonderful", "bad", "terrible", "awful", "fine", "okay"};
  const std::vector<std::string> filler = {"the", "is", "really", "today", "people", "say", "that", "a", "cure"};
  Gen g(200);
  std::vector<std::pair<std::string, std::string>> docs;
  for (int i = 0; i < 200; ++i) {
    std::string text;
    for (std::size_t w = g.range(3, 14); w > 0; --w) {
      const auto r = g.below(10);
      const std::string& word = r < 3 ? g.pick(topics) : r < 5 ? g.pick(opinions) : g.pick(filler);
      text += (text.empty() ? "" : " ") + word;
    }
    if (g.coin(0.1)) text = "NOT " + text + "!!";
    docs.push_back({"d" + std::to_string(i), text});
  }
  return docs;
}

std::string result_fingerprint(const SearchResult& r) {
  json j = json::array();
  for (const auto& x : r.rationales) j.push_back(rationale_to_json(x));
  return json{{"ids", r.doc_ids}, {"rationales", j}, {"calls", r.classifier_calls}}.dump();
}

std::string search_semantics() {
  const Corpus corpus = testing::make_corpus(engineered_docs());
  auto lexicon = std::make_shared<LexiconBackend>("lexicon", std::make_shared<const Lexicon>(Lexicon::builtin()),
                                                  LexiconOptions{}, kSentiment | kAspects | kStance);
  testing::CountingBackend counting(lexicon);

  const std::vector<json> specs = {
      json::parse(R"({"kind": "keyword", "keywords": [["vaccine", "garlic"], ["good"]]})"),
      json::parse(R"({"kind": "sentiment", "keywords": [["vaccine"]], "target_sentiment": "positive"})"),
      json::parse(R"({"kind": "sentiment", "keywords": [[{"pattern": "5g", "mode": "token"}]], "target_sentiment": "negative"})"),
      json::parse(R"({"kind": "aspect", "keywords": [["garlic"]],
                      "aspect_requirements": [{"any_of": ["garlic"], "tag": "positive"}]})"),
      json::parse(R"({"kind": "stance", "keywords": [["hydroxychloroquine"]],
                      "claim": "hydroxychloroquine is a cure", "target_stance": "agree"})"),
      json::parse(R"({"kind": "stance", "keywords": [["garlic", "vaccine"]],
                      "claim": "garlic is good", "target_stance": "disagree"})")};
  std::size_t hits = 0;
  for (const auto& spec : specs) {
    const Query q = query_from_json(spec);
    std::string reference;
    for (std::size_t par : {1u, 4u, 16u}) {
      counting.reset();
      const auto r = run_search(q, corpus, &counting, {par, 0.10});
      const std::string fp = result_fingerprint(r);
      if (par == 1) {
        reference = fp;
        hits += r.doc_ids.size();
      }
      require(fp == reference, spec.dump() + ": results differ at parallelism " + std::to_string(par));

      std::size_t keyword_matches = 0;
      for (const auto& d : corpus.documents()) keyword_matches += matches_keywords(*q.keywords, d.text).matched;
      const std::size_t expected = q.kind == QueryKind::KeywordOnly ? 0 : keyword_matches;
      require(counting.calls() == expected && r.classifier_calls == expected,
              spec.dump() + ": " + std::to_string(counting.calls()) + " backend calls for " +
                  std::to_string(keyword_matches) + " keyword matches");
    }
  }
  require(hits > 0, "the engineered queries matched nothing");

  Gen g(500);
  const std::vector<std::string> vocab = {"vaccine", "garlic", "good", "bad", "the", "cure", "5g", "ok", "wea", "foot", "is"};
  auto random_group = [&] {
    std::vector<Keyword> group;
    for (std::size_t k = g.range(1, 3); k > 0; --k) {
      group.emplace_back(g.pick(vocab), g.coin() ? MatchMode::Token : MatchMode::Substring);
    }
    return group;
  };
  auto keyword_search = [&](const KeywordExpr& e) {
    Query q;
    q.keywords = e;
    auto ids = run_search(q, corpus, nullptr, {4, 0.10}).doc_ids;
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  for (int i = 0; i < 500; ++i) {
    KeywordExpr base;
    for (std::size_t k = g.range(1, 3); k > 0; --k) base.groups.push_back(random_group());
    const auto base_ids = keyword_search(base);

    KeywordExpr wider = base;
    auto& group = wider.groups[g.below(wider.groups.size())];
    group.emplace_back(g.pick(vocab), MatchMode::Substring);
    const auto wider_ids = keyword_search(wider);
    require(std::includes(wider_ids.begin(), wider_ids.end(), base_ids.begin(), base_ids.end()),
            "adding an OR alternative lost documents at expression " + std::to_string(i));

    KeywordExpr narrower = base;
    narrower.groups.push_back(random_group());
    const auto narrower_ids = keyword_search(narrower);
    require(std::includes(base_ids.begin(), base_ids.end(), narrower_ids.begin(), narrower_ids.end()),
            "adding an AND group gained documents at expression " + std::to_string(i));
  }
  return "200 docs, parallelism 1/4/16 identical, misses cost 0 calls, 500 expressions monotone";
}

std::string keyword_fixtures() {
  // Gold defined by the keywords themselves.
  std::vector<std::pair<std::string, std::string>> docs;
  GoldRelevance gold;
  const Keyword kw("hydroxychloroquine");
  Gen g(7);
  for (int i = 0; i < 120; ++i) {
    const std::string text = g.coin(0.3) ? "they say hydroxychloroquine " + g.word() : "nothing about it " + g.word();
    docs.push_back({"d" + std::to_string(i), text});
    gold["d" + std::to_string(i)] = !find_keyword(kw, clean_text(text).text).empty();
  }
  Query k;
  k.keywords = KeywordExpr{{{kw}}};
  const auto first = emit_report({{"K", k}}, testing::make_corpus(docs), gold, nullptr, {});
  require(first.lines.size() == 1 && !first.lines[0].error, "K row failed");
  require(first.lines[0].metrics.recall == 1.0, "K recall " + std::to_string(first.lines[0].metrics.recall));

  // Ten keyword matches of which four are relevant, plus unmatched irrelevant documents.
  docs.clear();
  gold.clear();
  for (int i = 0; i < 10; ++i) {
    docs.push_back({"m" + std::to_string(i), "hydroxychloroquine claim number " + std::to_string(i)});
    gold["m" + std::to_string(i)] = i < 4;
  }
  for (int i = 0; i < 15; ++i) {
    docs.push_back({"o" + std::to_string(i), "unrelated text " + std::to_string(i)});
    gold["o" + std::to_string(i)] = false;
  }
  const auto second = emit_report({{"K", k}}, testing::make_corpus(docs), gold, nullptr, {});
  const auto& m = second.lines.at(0).metrics;
  const std::string shown = two_dp(m.precision) + " " + two_dp(m.recall) + " " + two_dp(m.f1);
  require(shown == "0.40 1.00 0.57", "K row shows " + shown);
  require(format_report_text(second).find("0.40       1.00    0.57") != std::string::npos, "text table differs");
  return "recall 1.0; K row " + shown;
}

// ---------------------------------------------------------------------------
// Service durability

class Http {
 public:
  explicit Http(int port) : client_("127.0.0.1", port) { client_.set_read_timeout(10, 0); }
  std::pair<int, json> get(const std::string& path) { return unpack(client_.Get(path), path); }
  std::pair<int, json> post(const std::string& path, const std::string& body, const std::string& type) {
    return unpack(client_.Post(path, body, type), path);
  }
  std::pair<int, json> post(const std::string& path, const json& body) {
    return post(path, body.dump(), "application/json");
  }

 private:
  static std::pair<int, json> unpack(const httplib::Result& r, const std::string& path) {
    require(static_cast<bool>(r), "no response from " + path);
    return {r->status, json::parse(r->body)};
  }
  httplib::Client client_;
};

int start_service(testing::ChildProcess& child) {
  const std::string line = child.read_line(std::chrono::seconds(20));
  require(line.rfind("listening ", 0) == 0, "service did not report its port (got '" + line + "')");
  return std::stoi(line.substr(10));
}

json wait_status(Http& http, const std::string& id, const std::set<std::string>& wanted, double timeout_s) {
  const auto started = Clock::now();
  for (;;) {
    auto [status, body] = http.get("/searches/" + id);
    require(status == 200, "GET /searches/" + id + " returned " + std::to_string(status));
    if (wanted.count(body["status"].get<std::string>())) return body;
    require(seconds_since(started) < timeout_s, "search " + id + " stuck in " + body["status"].dump());
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

std::string service_durability() {
  testing::TempDir dir;
  testing::StubSidecar sidecar;
  sidecar.set_delay(std::chrono::milliseconds(60));
  const json config = {{"port", 0},
                       {"store_dir", (dir / "store").string()},
                       {"parallelism", 1},
                       {"search_workers", 1},
                       {"backends",
                        {{"remote",
                          {{"type", "remote"}, {"endpoint", sidecar.endpoint()}, {"capabilities", {"sentiment"}},
                           {"deadline_ms", 5000}}}}}};
  testing::write_text(dir / "config.json", config.dump());

  std::string corpus_bytes;
  for (int i = 0; i < 150; ++i) {
    corpus_bytes += json{{"id", "d" + std::to_string(i)}, {"text", "garlic is " + std::string(i % 3 ? "good" : "bad")}}.dump() + '\n';
  }
  const json keyword_query = json::parse(R"({"kind": "keyword", "keywords": [["garlic"]]})");
  const json slow_query = json::parse(R"({"kind": "sentiment", "keywords": [["garlic"]], "target_sentiment": "positive"})");

  std::string corpus_id, session_id, quick_id, slow_id, queued_id;
  {
    testing::ChildProcess child(INFOTRIAGE_CLI, {"serve", "--config", (dir / "config.json").string()});
    Http http(start_service(child));
    auto [st, up] = http.post("/corpora?format=jsonl", corpus_bytes, "application/octet-stream");
    require(st == 201, "upload returned " + std::to_string(st));
    corpus_id = up["corpus_id"];
    auto [ss, session] = http.post("/sessions", json{{"corpus_id", corpus_id}});
    require(ss == 201, "session create returned " + std::to_string(ss));
    session_id = session["session_id"];

    quick_id = http.post("/sessions/" + session_id + "/searches", json{{"query", keyword_query}}).second["search_id"];
    wait_status(http, quick_id, {"done"}, 10);
    require(http.post("/sessions/" + session_id + "/feedback", json{{"doc_id", "d3"}, {"mark", "relevant"}}).first == 200,
            "feedback rejected");
    require(http.post("/sessions/" + session_id + "/feedback", json{{"doc_id", "d4"}, {"mark", "irrelevant"}}).first == 200,
            "feedback rejected");

    slow_id = http.post("/sessions/" + session_id + "/searches", json{{"query", slow_query}, {"backend", "remote"}})
                  .second["search_id"];
    queued_id = http.post("/sessions/" + session_id + "/searches", json{{"query", keyword_query}}).second["search_id"];
    wait_status(http, slow_id, {"running"}, 10);
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    require(http.get("/searches/" + slow_id).second["status"] == "running", "slow search finished before the kill");
    child.kill_hard();
    child.wait();
  }

  // A crash in the middle of an append leaves a torn final line.
  {
    std::ofstream journal(dir / "store" / "journal.jsonl", std::ios::app | std::ios::binary);
    journal << R"({"op":"feedback","session_id":")" << session_id << R"(","doc_id":"d5","ma)";
  }

  sidecar.set_delay(std::chrono::milliseconds(0));
  testing::ChildProcess child(INFOTRIAGE_CLI, {"serve", "--config", (dir / "config.json").string()});
  const int port = start_service(child);
  Http http(port);
  const std::set<std::string> legal = {"pending", "running", "done", "failed"};
  for (const auto& id : {quick_id, slow_id, queued_id}) {
    auto [st, s] = http.get("/searches/" + id);
    require(st == 200 && legal.count(s["status"].get<std::string>()), "search " + id + " has status " + s.dump());
  }
  const auto slow = http.get("/searches/" + slow_id).second;
  require(slow["status"] == "failed" && slow["error"] == "interrupted", "interrupted search shows " + slow["status"].dump());
  wait_status(http, queued_id, {"done"}, 10);

  auto [ss, session] = http.get("/sessions/" + session_id);
  require(ss == 200, "session lost after restart");
  require(session["feedback"] == json{{"d3", "relevant"}, {"d4", "irrelevant"}},
          "feedback after restart: " + session["feedback"].dump());
  require(session["history"].size() == 2 && session["history"][0]["search_id"] == quick_id &&
              session["history"][1]["search_id"] == queued_id,
          "history after restart: " + session["history"].dump());
  require(http.get("/corpora/" + corpus_id).first == 200, "corpus lost after restart");

  // Identical bytes uploaded concurrently get one id and one stored file.
  std::string fresh;
  for (int i = 0; i < 40; ++i) fresh += json{{"id", "n" + std::to_string(i)}, {"text", "fresh upload"}}.dump() + '\n';
  std::vector<std::thread> threads;
  std::vector<std::string> ids(16);
  std::vector<int> codes(16);
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port);
      auto r = c.Post("/corpora?format=jsonl", fresh, "application/octet-stream");
      if (!r) return;
      codes[i] = r->status;
      ids[i] = json::parse(r->body).value("corpus_id", "");
    });
  }
  for (auto& t : threads) t.join();
  require(std::count(codes.begin(), codes.end(), 201) == 1 && std::count(codes.begin(), codes.end(), 200) == 15,
          "concurrent uploads did not resolve to one creation");
  require(std::set<std::string>(ids.begin(), ids.end()).size() == 1, "concurrent uploads got different ids");
  std::size_t stored = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "store" / "corpora")) ++stored;
  require(stored == 2, std::to_string(stored) + " corpus files stored");
  child.terminate();
  child.wait();
  return "SIGKILL mid-search, torn journal tail, 16 concurrent uploads";
}

// ---------------------------------------------------------------------------

template <typename E, typename F>
void expect_throw(F f, const std::string& what) {
  try {
    f();
  } catch (const E&) {
    return;
  } catch (const std::exception& e) {
    throw Failure(what + ": wrong error: " + e.what());
  }
  throw Failure(what + ": no error");
}

std::string remote_protocol() {
  using Mode = testing::StubSidecar::Mode;
  testing::StubSidecar stub;
  const auto deadline = std::chrono::milliseconds(600);
  RemoteBackend remote("remote", stub.endpoint(), RemoteOptions{deadline, 4, kSentiment | kAspects | kStance});

  require(remote.sentiment("this is good") == SentimentLabel::Positive, "sentiment decode");
  require(remote.sentiment("this is bad") == SentimentLabel::Negative, "sentiment decode");
  require(remote.stance("garlic is good", "garlic is bad indeed") == StanceLabel::Disagree, "stance decode");
  const std::string text = "the garlic was good but the soup was bad";
  const auto tagging = remote.aspects(text);
  require(tagging.tags.size() == 9, "aspects decode gave " + std::to_string(tagging.tags.size()) + " tags");

  stub.set_mode(Mode::UnknownLabel);
  expect_throw<ProtocolError>([&] { remote.sentiment("good"); }, "unknown sentiment label");
  expect_throw<ProtocolError>([&] { remote.stance("a", "b"); }, "unknown stance label");
  expect_throw<ProtocolError>([&] { remote.aspects(text); }, "unknown aspect tag");
  stub.set_mode(Mode::ShortTags);
  expect_throw<ProtocolError>([&] { remote.aspects(text); }, "tag-length mismatch");
  stub.set_mode(Mode::BadScores);
  expect_throw<ProtocolError>([&] { remote.sentiment("good"); }, "wrong score count");
  stub.set_mode(Mode::Reject);
  expect_throw<BackendRejected>([&] { remote.sentiment("good"); }, "400 response");
  stub.set_mode(Mode::ServerError);
  expect_throw<ProtocolError>([&] { remote.sentiment("good"); }, "500 response");
  stub.set_mode(Mode::Garbage);
  expect_throw<ProtocolError>([&] { remote.sentiment("good"); }, "malformed body");

  stub.set_mode(Mode::Normal);
  stub.set_delay(std::chrono::milliseconds(2000));
  const auto started = Clock::now();
  expect_throw<Timeout>([&] { remote.sentiment("good"); }, "slow sidecar");
  const double secs = seconds_since(started);
  require(secs < 0.6 + 0.5, "timeout took " + std::to_string(secs) + " s");
  stub.set_delay(std::chrono::milliseconds(0));
  require(remote.sentiment("good") == SentimentLabel::Positive, "no recovery after a timeout");

  const std::size_t before = stub.requests();
  RemoteBackend sa_only("sa", stub.endpoint(), RemoteOptions{deadline, 1, kSentiment});
  expect_throw<Unsupported>([&] { sa_only.stance("a", "b"); }, "undeclared capability");
  require(stub.requests() == before, "undeclared capability reached the network");
  return "valid, unknown label, tag mismatch, scores, 400/500/garbage, timeout in " + two_dp(secs) + " s";
}

struct Criterion {
  const char* name;
  std::function<std::string()> check;
};

}  // namespace

int main() {
  ::signal(SIGPIPE, SIG_IGN);
  const Criterion criteria[] = {
      {"metric-oracle-equivalence", metric_oracle},
      {"zero-tp-convention", zero_tp},
      {"claim-expansion", claim_expansion},
      {"sequence-geometry", sequence_geometry},
      {"head-geometry", head_geometry_check},
      {"dataset-recipes", dataset_recipes},
      {"search-semantics", search_semantics},
      {"keyword-relevance-proxy", keyword_fixtures},
      {"service-durability", service_durability},
      {"remote-protocol-conformance", remote_protocol},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      detail = c.check();
      ok = true;
    } catch (const std::exception& e) {
      detail = e.what();
    }
    failed += ok ? 0 : 1;
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << "  " << detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
