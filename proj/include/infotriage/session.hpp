#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "infotriage/query.hpp"

namespace infotriage {

enum class FeedbackMark { Unmarked, Relevant, Irrelevant };

std::string_view to_string(FeedbackMark mark);
std::optional<FeedbackMark> parse_feedback_mark(std::string_view s);

struct HistoryEntry {
  Query query;
  std::vector<std::string> doc_ids;
  std::string timestamp;
  std::string search_id;  // empty outside the service
};

struct SearchSession {
  std::string session_id;
  std::string corpus_id;
  std::vector<HistoryEntry> history;
  std::map<std::string, FeedbackMark> feedback;  // Unmarked entries are not stored

  FeedbackMark mark_of(const std::string& doc_id) const;
};

// Appends one search to the history; feedback is left untouched.
SearchSession revise_session(SearchSession session, Query query, std::vector<std::string> doc_ids,
                             std::string timestamp);

// Sessions keyed by id. Writers to one session are serialized; readers get copies.
class SessionRegistry {
 public:
  SearchSession create(const std::string& corpus_id);
  // Used when replaying persisted state; the id counter moves past `session.session_id`.
  void restore(SearchSession session);

  SearchSession get(const std::string& session_id) const;
  bool contains(const std::string& session_id) const;
  SearchSession revise(const std::string& session_id, Query query, std::vector<std::string> doc_ids,
                       std::string timestamp, std::string search_id = {});
  SearchSession set_feedback(const std::string& session_id, const std::string& doc_id, FeedbackMark mark);

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, SearchSession> sessions_;
  std::size_t next_id_ = 1;
};

}  // namespace infotriage
