#include "infotriage/session.hpp"

#include <charconv>

namespace infotriage {

std::string_view to_string(FeedbackMark mark) {
  switch (mark) {
    case FeedbackMark::Relevant:
      return "relevant";
    case FeedbackMark::Irrelevant:
      return "irrelevant";
    case FeedbackMark::Unmarked:
      break;
  }
  return "unmarked";
}

std::optional<FeedbackMark> parse_feedback_mark(std::string_view s) {
  if (s == "relevant") return FeedbackMark::Relevant;
  if (s == "irrelevant") return FeedbackMark::Irrelevant;
  if (s == "clear" || s == "unmarked") return FeedbackMark::Unmarked;
  return std::nullopt;
}

FeedbackMark SearchSession::mark_of(const std::string& doc_id) const {
  auto it = feedback.find(doc_id);
  return it == feedback.end() ? FeedbackMark::Unmarked : it->second;
}

SearchSession revise_session(SearchSession session, Query query, std::vector<std::string> doc_ids,
                             std::string timestamp) {
  session.history.push_back({std::move(query), std::move(doc_ids), std::move(timestamp), {}});
  return session;
}

namespace {

std::optional<std::size_t> numeric_suffix(const std::string& id) {
  if (id.size() < 2 || id[0] != 's') return std::nullopt;
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
  if (ec != std::errc() || ptr != id.data() + id.size()) return std::nullopt;
  return n;
}

}  // namespace

SearchSession SessionRegistry::create(const std::string& corpus_id) {
  std::unique_lock lock(mutex_);
  SearchSession s;
  s.session_id = "s" + std::to_string(next_id_++);
  s.corpus_id = corpus_id;
  sessions_[s.session_id] = s;
  return s;
}

void SessionRegistry::restore(SearchSession session) {
  std::unique_lock lock(mutex_);
  if (auto n = numeric_suffix(session.session_id); n && *n >= next_id_) next_id_ = *n + 1;
  sessions_[session.session_id] = std::move(session);
}

SearchSession SessionRegistry::get(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw UnknownSession(session_id);
  return it->second;
}

bool SessionRegistry::contains(const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  return sessions_.count(session_id) != 0;
}

SearchSession SessionRegistry::revise(const std::string& session_id, Query query, std::vector<std::string> doc_ids,
                                      std::string timestamp, std::string search_id) {
  std::unique_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw UnknownSession(session_id);
  it->second.history.push_back({std::move(query), std::move(doc_ids), std::move(timestamp), std::move(search_id)});
  return it->second;
}

SearchSession SessionRegistry::set_feedback(const std::string& session_id, const std::string& doc_id,
                                            FeedbackMark mark) {
  std::unique_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw UnknownSession(session_id);
  if (mark == FeedbackMark::Unmarked) {
    it->second.feedback.erase(doc_id);
  } else {
    it->second.feedback[doc_id] = mark;
  }
  return it->second;
}

}  // namespace infotriage
