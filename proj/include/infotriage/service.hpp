#pragma once

#include <functional>
#include <memory>
#include <string>

#include "infotriage/config.hpp"

namespace httplib {
class Server;
}

namespace infotriage {

enum class SearchStatus { Pending, Running, Done, Failed };
std::string_view to_string(SearchStatus status);

// HTTP front end over the engine with an on-disk store:
//   <store_dir>/corpora/<corpus_id>.<format>  uploaded bytes, written atomically
//   <store_dir>/journal.jsonl                 sessions, searches and feedback
// On start the journal is replayed: searches caught Running are marked
// Failed("interrupted") and Pending ones are queued again.
class Service {
 public:
  Service(ServiceConfig config, BackendRegistry backends);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Loads the store and starts the search workers.
  void open();
  // Binds the listening socket; returns the bound port.
  int bind();
  // Serves until stop(). bind() must have succeeded.
  void serve();
  void stop();

  httplib::Server& http();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs a service until SIGINT/SIGTERM. Prints "listening <port>" once bound.
int run_service(const ServiceConfig& config, const std::function<void(int port)>& on_listening);

}  // namespace infotriage
