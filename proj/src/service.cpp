#include "infotriage/service.hpp"

#include <atomic>
#include <condition_variable>
#include <csignal>
#include <deque>
#include <iostream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <thread>

#include "httplib.h"
#include "infotriage/corpus.hpp"
#include "infotriage/evaluate.hpp"
#include "infotriage/query_json.hpp"
#include "infotriage/session.hpp"
#include "infotriage/store.hpp"

namespace infotriage {

std::string_view to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::Pending:
      return "pending";
    case SearchStatus::Running:
      return "running";
    case SearchStatus::Done:
      return "done";
    case SearchStatus::Failed:
      break;
  }
  return "failed";
}

namespace {

using nlohmann::json;

struct StoredCorpus {
  std::shared_ptr<const Corpus> corpus;
  CorpusFormat format;
};

struct StoredSearch {
  std::string search_id;
  std::string session_id;
  std::string corpus_id;
  std::string backend;
  Query query;
  SearchStatus status = SearchStatus::Pending;
  std::string created_at;
  std::string finished_at;
  std::string error;
  std::optional<SearchResult> result;
};

// Thrown inside handlers; rendered as {"error", "detail"?}.
struct HttpError {
  int status;
  std::string message;
  json detail;
};

[[noreturn]] void http_error(int status, std::string message, json detail = nullptr) {
  throw HttpError{status, std::move(message), std::move(detail)};
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception&) {
    http_error(400, "request body is not valid JSON");
  }
}

std::size_t query_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  try {
    std::size_t used = 0;
    const auto n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(name);
    return n;
  } catch (const std::exception&) {
    http_error(400, std::string("query parameter '") + name + "' must be a non-negative integer");
  }
}

std::size_t counter_of(const std::string& id, char prefix) {
  if (id.size() < 2 || id[0] != prefix) return 0;
  try {
    return std::stoull(id.substr(1));
  } catch (const std::exception&) {
    return 0;
  }
}

json session_to_json(const SearchSession& s) {
  json history = json::array();
  for (const auto& h : s.history) {
    history.push_back(
        {{"search_id", h.search_id}, {"query", query_to_json(h.query)}, {"doc_ids", h.doc_ids}, {"timestamp", h.timestamp}});
  }
  json feedback = json::object();
  for (const auto& [doc, mark] : s.feedback) feedback[doc] = to_string(mark);
  return {{"session_id", s.session_id}, {"corpus_id", s.corpus_id}, {"history", history}, {"feedback", feedback}};
}

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  BackendRegistry backends;
  httplib::Server server;
  std::unique_ptr<Journal> journal;

  std::shared_mutex corpora_mutex;
  std::map<std::string, StoredCorpus> corpora;
  std::mutex upload_mutex;  // serializes corpus creation so identical uploads get one id

  SessionRegistry sessions;

  std::mutex search_mutex;
  std::map<std::string, StoredSearch> searches;
  std::size_t next_search = 1;
  std::deque<std::string> queue;
  std::condition_variable queue_cv;
  bool stopping = false;
  std::vector<std::thread> workers;

  Impl(ServiceConfig c, BackendRegistry b) : config(std::move(c)), backends(std::move(b)) {}

  std::filesystem::path corpus_path(const std::string& id, CorpusFormat f) const {
    return config.store_dir / "corpora" / (id + "." + std::string(to_string(f)));
  }

  std::shared_ptr<const Corpus> find_corpus(const std::string& id) {
    std::shared_lock lock(corpora_mutex);
    auto it = corpora.find(id);
    return it == corpora.end() ? nullptr : it->second.corpus;
  }

  // -------------------------------------------------------------------------
  // Store

  void load() {
    std::filesystem::create_directories(config.store_dir / "corpora");
    for (const auto& entry : std::filesystem::directory_iterator(config.store_dir / "corpora")) {
      const auto name = entry.path().filename().string();
      if (!entry.is_regular_file() || name.empty() || name[0] == '.') continue;
      const std::string ext = entry.path().extension().string();
      if (ext != ".jsonl" && ext != ".csv") continue;
      const CorpusFormat format = parse_corpus_format(ext.substr(1));
      const std::string bytes = read_file(entry.path());
      Corpus c = ingest_bytes(bytes, format);
      if (c.corpus_id() != entry.path().stem().string()) {
        std::cerr << "warning: ignoring " << entry.path() << ": contents do not match its id\n";
        continue;
      }
      const std::string id = c.corpus_id();
      corpora[id] = {std::make_shared<const Corpus>(std::move(c)), format};
    }

    journal = std::make_unique<Journal>(config.store_dir / "journal.jsonl");
    std::map<std::string, SearchSession> restored;
    for (const auto& rec : journal->replay()) apply(rec, restored);
    for (auto& [id, s] : restored) sessions.restore(std::move(s));

    for (auto& [id, s] : searches) {
      if (s.status == SearchStatus::Running) {
        s.status = SearchStatus::Failed;
        s.error = "interrupted";
        s.finished_at = utc_timestamp();
        journal->append({{"op", "failed"}, {"search_id", id}, {"error", s.error}, {"timestamp", s.finished_at}});
      } else if (s.status == SearchStatus::Pending) {
        queue.push_back(id);
      }
    }
  }

  void apply(const json& rec, std::map<std::string, SearchSession>& restored) {
    const std::string op = rec.value("op", "");
    try {
      if (op == "session") {
        SearchSession s;
        s.session_id = rec.at("session_id").get<std::string>();
        s.corpus_id = rec.at("corpus_id").get<std::string>();
        restored[s.session_id] = std::move(s);
      } else if (op == "search") {
        StoredSearch s;
        s.search_id = rec.at("search_id").get<std::string>();
        s.session_id = rec.at("session_id").get<std::string>();
        s.corpus_id = rec.at("corpus_id").get<std::string>();
        s.backend = rec.value("backend", "");
        s.query = query_from_json(rec.at("query"));
        s.created_at = rec.value("timestamp", "");
        next_search = std::max(next_search, counter_of(s.search_id, 'q') + 1);
        searches[s.search_id] = std::move(s);
      } else if (op == "start") {
        searches.at(rec.at("search_id").get<std::string>()).status = SearchStatus::Running;
      } else if (op == "done") {
        auto& s = searches.at(rec.at("search_id").get<std::string>());
        SearchResult r;
        r.doc_ids = rec.at("doc_ids").get<std::vector<std::string>>();
        for (const auto& x : rec.at("rationales")) r.rationales.push_back(rationale_from_json(x));
        for (const auto& x : rec.at("skipped")) {
          r.skipped.push_back({x.at("doc_id").get<std::string>(), x.at("error").get<std::string>()});
        }
        r.classifier_calls = rec.value("classifier_calls", std::size_t{0});
        s.status = SearchStatus::Done;
        s.finished_at = rec.value("timestamp", "");
        auto& session = restored.at(s.session_id);
        session.history.push_back({s.query, r.doc_ids, s.finished_at, s.search_id});
        s.result = std::move(r);
      } else if (op == "failed") {
        auto& s = searches.at(rec.at("search_id").get<std::string>());
        s.status = SearchStatus::Failed;
        s.error = rec.value("error", "");
        s.finished_at = rec.value("timestamp", "");
      } else if (op == "feedback") {
        auto& session = restored.at(rec.at("session_id").get<std::string>());
        const auto mark = parse_feedback_mark(rec.at("mark").get<std::string>()).value_or(FeedbackMark::Unmarked);
        const std::string doc = rec.at("doc_id").get<std::string>();
        if (mark == FeedbackMark::Unmarked) {
          session.feedback.erase(doc);
        } else {
          session.feedback[doc] = mark;
        }
      } else {
        std::cerr << "warning: skipping unknown journal op '" << op << "'\n";
      }
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping journal record: " << e.what() << '\n';
    }
  }

  // -------------------------------------------------------------------------
  // Search workers

  void start_workers() {
    const std::size_t n = std::max<std::size_t>(1, config.search_workers);
    for (std::size_t i = 0; i < n; ++i) workers.emplace_back([this] { work(); });
  }

  void work() {
    for (;;) {
      std::string id;
      {
        std::unique_lock lock(search_mutex);
        queue_cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        id = queue.front();
        queue.pop_front();
      }
      execute(id);
    }
  }

  void execute(const std::string& id) {
    Query query;
    std::string corpus_id, backend_name, session_id;
    {
      std::lock_guard lock(search_mutex);
      auto& s = searches.at(id);
      query = s.query;
      corpus_id = s.corpus_id;
      backend_name = s.backend;
      session_id = s.session_id;
      journal->append({{"op", "start"}, {"search_id", id}});
      s.status = SearchStatus::Running;
    }

    std::optional<SearchResult> result;
    std::string error;
    try {
      auto corpus = find_corpus(corpus_id);
      if (!corpus) throw Error("corpus '" + corpus_id + "' is gone");
      const ClassifierBackend* backend = nullptr;
      if (!backend_name.empty()) backend = backends.at(backend_name).get();
      result = run_search(query, *corpus, backend, SearchOptions{config.parallelism, 0.10});
    } catch (const std::exception& e) {
      error = e.what();
    }

    const std::string now = utc_timestamp();
    std::lock_guard lock(search_mutex);
    auto& s = searches.at(id);
    s.finished_at = now;
    if (result) {
      json rec = search_result_to_json(*result);
      rec["op"] = "done";
      rec["search_id"] = id;
      rec["timestamp"] = now;
      journal->append(rec);
      sessions.revise(session_id, query, result->doc_ids, now, id);
      s.status = SearchStatus::Done;
      s.result = std::move(result);
    } else {
      journal->append({{"op", "failed"}, {"search_id", id}, {"error", error}, {"timestamp", now}});
      s.status = SearchStatus::Failed;
      s.error = error;
    }
  }

  void shutdown() {
    {
      std::lock_guard lock(search_mutex);
      stopping = true;
    }
    queue_cv.notify_all();
    for (auto& w : workers) {
      if (w.joinable()) w.join();
    }
    workers.clear();
  }

  // -------------------------------------------------------------------------
  // Handlers

  void create_corpus(const httplib::Request& req, httplib::Response& res) {
    if (req.body.size() > config.max_upload_bytes) http_error(413, "upload exceeds the size limit");
    CorpusFormat format = CorpusFormat::Jsonl;
    if (req.has_param("format")) {
      try {
        format = parse_corpus_format(req.get_param_value("format"));
      } catch (const Error& e) {
        http_error(400, e.what());
      }
    }
    const std::string id = corpus_id_for(req.body, format);

    std::lock_guard upload(upload_mutex);
    if (auto existing = find_corpus(id)) {
      send_json(res, 200, {{"corpus_id", id}, {"documents", existing->size()}, {"created", false}});
      return;
    }
    std::optional<Corpus> corpus;
    try {
      corpus = ingest_bytes(req.body, format);
    } catch (const MalformedRecord& e) {
      http_error(400, e.what(), {{"line", e.line_no()}});
    } catch (const DuplicateId& e) {
      http_error(400, e.what(), {{"id", e.id()}});
    }
    write_file_durably(corpus_path(id, format), req.body);
    const std::size_t n = corpus->size();
    {
      std::unique_lock lock(corpora_mutex);
      corpora[id] = {std::make_shared<const Corpus>(std::move(*corpus)), format};
    }
    send_json(res, 201, {{"corpus_id", id}, {"documents", n}, {"created", true}});
  }

  void get_corpus(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    StoredCorpus stored;
    {
      std::shared_lock lock(corpora_mutex);
      auto it = corpora.find(id);
      if (it == corpora.end()) http_error(404, "unknown corpus '" + id + "'");
      stored = it->second;
    }
    const auto& docs = stored.corpus->documents();
    const std::size_t offset = std::min(query_param(req, "offset", 0), docs.size());
    const std::size_t limit = query_param(req, "limit", 100);
    json list = json::array();
    for (std::size_t i = offset; i < docs.size() && i - offset < limit; ++i) {
      const auto& d = docs[i];
      json item{{"id", d.id}, {"text", d.text}, {"raw_text", d.raw_text}, {"source", d.source}};
      if (d.timestamp) item["timestamp"] = *d.timestamp;
      list.push_back(std::move(item));
    }
    send_json(res, 200,
              {{"corpus_id", id},
               {"format", to_string(stored.format)},
               {"created_at", stored.corpus->created_at()},
               {"size", docs.size()},
               {"offset", offset},
               {"documents", list}});
  }

  void create_session(const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("corpus_id") || !body["corpus_id"].is_string()) {
      http_error(400, "expected {\"corpus_id\": string}");
    }
    const std::string corpus_id = body["corpus_id"].get<std::string>();
    if (!find_corpus(corpus_id)) http_error(404, "unknown corpus '" + corpus_id + "'");
    std::lock_guard lock(search_mutex);  // orders the journal record with the id allocation
    SearchSession s = sessions.create(corpus_id);
    journal->append({{"op", "session"}, {"session_id", s.session_id}, {"corpus_id", corpus_id}});
    send_json(res, 201, session_to_json(s));
  }

  SearchSession session_or_404(const std::string& id) {
    try {
      return sessions.get(id);
    } catch (const UnknownSession& e) {
      http_error(404, e.what());
    }
  }

  void start_search(const std::string& session_id, const httplib::Request& req, httplib::Response& res) {
    const SearchSession session = session_or_404(session_id);
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("query")) http_error(400, "expected {\"query\": {...}, \"backend\"?: name}");
    if (!find_corpus(session.corpus_id)) http_error(404, "unknown corpus '" + session.corpus_id + "'");

    Query query;
    try {
      query = query_from_json(body["query"]);
    } catch (const InvalidQuery& e) {
      http_error(422, e.what());
    }
    std::string backend_name = body.value("backend", "");
    if (backend_name.empty() && query.required_capability() != 0) {
      if (backends.size() != 1) http_error(422, "this query needs a backend");
      backend_name = backends.begin()->first;
    }
    if (!backend_name.empty()) {
      auto it = backends.find(backend_name);
      if (it == backends.end()) http_error(404, "unknown backend '" + backend_name + "'");
      const unsigned need = query.required_capability();
      if (need != 0 && !(it->second->capabilities() & need)) {
        http_error(422, Unsupported(backend_name, capability_names(need)).what(),
                   {{"kind", "Unsupported"}, {"backend", backend_name}, {"capability", capability_names(need)}});
      }
    }

    std::string id;
    {
      std::lock_guard lock(search_mutex);
      id = "q" + std::to_string(next_search++);
      StoredSearch s;
      s.search_id = id;
      s.session_id = session_id;
      s.corpus_id = session.corpus_id;
      s.backend = backend_name;
      s.query = query;
      s.created_at = utc_timestamp();
      journal->append({{"op", "search"},
                       {"search_id", id},
                       {"session_id", session_id},
                       {"corpus_id", session.corpus_id},
                       {"backend", backend_name},
                       {"query", query_to_json(query)},
                       {"timestamp", s.created_at}});
      searches[id] = std::move(s);
      queue.push_back(id);
    }
    queue_cv.notify_one();
    send_json(res, 202, {{"search_id", id}, {"status", "pending"}});
  }

  StoredSearch search_or_404(const std::string& id) {
    std::lock_guard lock(search_mutex);
    auto it = searches.find(id);
    if (it == searches.end()) http_error(404, "unknown search '" + id + "'");
    return it->second;
  }

  json search_summary(const StoredSearch& s) {
    json j{{"search_id", s.search_id},
           {"session_id", s.session_id},
           {"corpus_id", s.corpus_id},
           {"backend", s.backend},
           {"query", query_to_json(s.query)},
           {"status", to_string(s.status)},
           {"created_at", s.created_at}};
    if (!s.finished_at.empty()) j["finished_at"] = s.finished_at;
    if (s.status == SearchStatus::Failed) j["error"] = s.error;
    if (s.result) {
      j["result_count"] = s.result->doc_ids.size();
      j["doc_ids"] = s.result->doc_ids;
      j["skipped"] = s.result->skipped.size();
      j["classifier_calls"] = s.result->classifier_calls;
    }
    return j;
  }

  void search_results(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    const StoredSearch s = search_or_404(id);
    if (s.status != SearchStatus::Done) {
      http_error(409, "search is " + std::string(to_string(s.status)), {{"status", to_string(s.status)}});
    }
    const auto& r = *s.result;
    const std::size_t offset = std::min(query_param(req, "offset", 0), r.rationales.size());
    const std::size_t limit = query_param(req, "limit", 100);
    json page = json::array();
    for (std::size_t i = offset; i < r.rationales.size() && i - offset < limit; ++i) {
      page.push_back(rationale_to_json(r.rationales[i]));
    }
    json skipped = json::array();
    for (const auto& k : r.skipped) skipped.push_back({{"doc_id", k.doc_id}, {"error", k.error}});
    send_json(res, 200,
              {{"search_id", id}, {"total", r.doc_ids.size()}, {"offset", offset}, {"results", page}, {"skipped", skipped}});
  }

  void feedback(const std::string& session_id, const httplib::Request& req, httplib::Response& res) {
    const SearchSession session = session_or_404(session_id);
    const json body = parse_body(req);
    if (!body.is_object() || !body.contains("doc_id") || !body["doc_id"].is_string() || !body.contains("mark") ||
        !body["mark"].is_string()) {
      http_error(400, "expected {\"doc_id\": string, \"mark\": \"relevant\"|\"irrelevant\"|\"clear\"}");
    }
    const std::string doc = body["doc_id"].get<std::string>();
    const auto mark = parse_feedback_mark(body["mark"].get<std::string>());
    if (!mark) http_error(400, "mark must be relevant, irrelevant or clear");
    auto corpus = find_corpus(session.corpus_id);
    if (!corpus || !corpus->contains(doc)) http_error(404, "unknown document '" + doc + "'");

    if (*mark == FeedbackMark::Unmarked && session.mark_of(doc) == FeedbackMark::Unmarked) {
      send_json(res, 200, session_to_json(session));
      return;
    }
    std::lock_guard lock(search_mutex);
    journal->append({{"op", "feedback"}, {"session_id", session_id}, {"doc_id", doc}, {"mark", to_string(*mark)}});
    send_json(res, 200, session_to_json(sessions.set_feedback(session_id, doc, *mark)));
  }

  void metrics(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    const StoredSearch s = search_or_404(id);
    if (s.status != SearchStatus::Done) {
      http_error(409, "search is " + std::string(to_string(s.status)), {{"status", to_string(s.status)}});
    }
    const json body = parse_body(req);
    GoldRelevance gold;
    try {
      std::optional<StanceLabel> target;
      if (body.contains("target_stance")) {
        target = parse_stance(body["target_stance"].get<std::string>());
        if (!target) http_error(400, "unknown target_stance");
      }
      const json& g = body.at("gold");
      if (g.is_string()) {
        gold = parse_gold(g.get<std::string>(), target);
      } else if (g.is_object()) {
        for (const auto& [doc, rel] : g.items()) gold[doc] = rel.get<bool>();
      } else if (g.is_array()) {
        std::string lines;
        for (const auto& rec : g) lines += rec.dump() + '\n';
        gold = parse_gold(lines, target);
      } else {
        http_error(400, "gold must be an object, an array of records or JSON Lines text");
      }
    } catch (const json::exception& e) {
      http_error(400, std::string("bad gold: ") + e.what());
    } catch (const Error& e) {
      http_error(400, std::string("bad gold: ") + e.what());
    }

    auto corpus = find_corpus(s.corpus_id);
    json missing = json::array();
    for (const auto& d : corpus->documents()) {
      if (!gold.count(d.id)) missing.push_back(d.id);
    }
    if (!missing.empty()) http_error(422, "gold does not cover the corpus", {{"missing", missing}});
    for (const auto& [doc, rel] : gold) {
      if (!corpus->contains(doc)) http_error(422, "gold names documents outside the corpus", {{"unknown", doc}});
    }

    const ReportLine line = score_row(body.value("label", "K"), s.result->doc_ids, gold, s.result->skipped.size());
    json out{{"label", line.label},
             {"precision", line.metrics.precision},
             {"recall", line.metrics.recall},
             {"f1", line.metrics.f1},
             {"tp", line.counts.tp},
             {"fp", line.counts.fp},
             {"fn", line.counts.fn},
             {"skipped", line.skipped}};
    if (line.counts.tn) out["tn"] = *line.counts.tn;
    send_json(res, 200, out);
  }

  void list_backends(httplib::Response& res) {
    json list = json::array();
    for (const auto& [name, b] : backends) {
      json caps = json::array();
      if (b->supports(kSentiment)) caps.push_back("sentiment");
      if (b->supports(kAspects)) caps.push_back("aspects");
      if (b->supports(kStance)) caps.push_back("stance");
      const auto it = config.backends.find(name);
      list.push_back({{"name", name}, {"type", it == config.backends.end() ? "lexicon" : it->second.type},
                      {"capabilities", caps}});
    }
    send_json(res, 200, {{"backends", list}});
  }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        json body{{"error", e.message}};
        if (!e.detail.is_null()) body["detail"] = e.detail;
        send_json(res, e.status, body);
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error", e.what()}});
      }
    };
  }

  void routes() {
    server.set_payload_max_length(config.max_upload_bytes);
    server.set_tcp_nodelay(true);
    server.Post("/corpora", guarded([this](auto& req, auto& res) { create_corpus(req, res); }));
    server.Get(R"(/corpora/([^/]+))",
               guarded([this](auto& req, auto& res) { get_corpus(req.matches[1].str(), req, res); }));
    server.Post("/sessions", guarded([this](auto& req, auto& res) { create_session(req, res); }));
    server.Get(R"(/sessions/([^/]+))", guarded([this](auto& req, auto& res) {
                 send_json(res, 200, session_to_json(session_or_404(req.matches[1].str())));
               }));
    server.Post(R"(/sessions/([^/]+)/searches)",
                guarded([this](auto& req, auto& res) { start_search(req.matches[1].str(), req, res); }));
    server.Post(R"(/sessions/([^/]+)/feedback)",
                guarded([this](auto& req, auto& res) { feedback(req.matches[1].str(), req, res); }));
    server.Get(R"(/searches/([^/]+))", guarded([this](auto& req, auto& res) {
                 send_json(res, 200, search_summary(search_or_404(req.matches[1].str())));
               }));
    server.Get(R"(/searches/([^/]+)/results)",
               guarded([this](auto& req, auto& res) { search_results(req.matches[1].str(), req, res); }));
    server.Post(R"(/searches/([^/]+)/metrics)",
                guarded([this](auto& req, auto& res) { metrics(req.matches[1].str(), req, res); }));
    server.Get("/backends", guarded([this](auto&, auto& res) { list_backends(res); }));
  }
};

Service::Service(ServiceConfig config, BackendRegistry backends)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(backends))) {
  impl_->routes();
}

Service::~Service() {
  stop();
  impl_->shutdown();
}

void Service::open() {
  impl_->load();
  impl_->start_workers();
}

int Service::bind() {
  auto& c = impl_->config;
  if (c.port == 0) {
    const int port = impl_->server.bind_to_any_port(c.host);
    if (port < 0) throw IoError("cannot bind " + c.host);
    return port;
  }
  if (!impl_->server.bind_to_port(c.host, c.port)) {
    throw IoError("cannot bind " + c.host + ":" + std::to_string(c.port));
  }
  return c.port;
}

void Service::serve() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

httplib::Server& Service::http() { return impl_->server; }

namespace {
std::atomic<Service*> g_running{nullptr};
extern "C" void handle_signal(int) {
  if (Service* s = g_running.load()) s->stop();
}
}  // namespace

int run_service(const ServiceConfig& config, const std::function<void(int port)>& on_listening) {
  Service service(config, make_backends(config));
  service.open();
  const int port = service.bind();
  g_running = &service;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  on_listening(port);
  service.serve();
  g_running = nullptr;
  return 0;
}

}  // namespace infotriage
