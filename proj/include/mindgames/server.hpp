#pragma once

// Live sessions over HTTP and WebSocket.
//
//   POST /sessions                      create; returns id and two role tokens
//   GET  /sessions/{id}/view            role view (X-Role-Token header)
//   POST /sessions/{id}/messages        {"text": ...}
//   POST /sessions/{id}/choice          {"stage": "pre"|"final", "proposal": "A"}
//   GET  /sessions/{id}/transcript      JSONL once the game has ended
//   GET  /healthz
//   POST /survey                        Likert labels -> inferred valence
//   WS   /sessions/{id}/stream?token=   ordered event JSON

#include <cstdint>
#include <memory>
#include <string>

#include "mindgames/llm.hpp"

namespace mindgames {

struct ServerOptions {
  std::string host = "127.0.0.1";
  // 0 picks a free port.
  unsigned short port = 0;
  // Files under this directory are served for other GET paths.
  std::string static_dir;
  // Seeds the per-scenario instance pools used by game selection.
  std::uint64_t seed = 0;
  int pool_per_scenario = 40;
  // Ended sessions are appended here as transcript JSONL when set.
  std::string transcripts_path;
  // Human-target sessions expire after this long without a final choice.
  double human_timeout_seconds = 0;
  // Backend for LLM persuaders and classifiers; built from the environment
  // when unset and first needed.
  std::shared_ptr<ChatBackend> llm;
};

class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts accepting on a background thread. Throws kIo.
  void start();
  unsigned short port() const;
  // Closes the listener and every open connection, then joins the threads.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mindgames
