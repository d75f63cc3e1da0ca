#include "mindgames/server.hpp"

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "mindgames/agents.hpp"
#include "mindgames/analytics.hpp"
#include "mindgames/codec.hpp"
#include "mindgames/forge.hpp"
#include "mindgames/random.hpp"
#include "mindgames/session.hpp"

namespace mindgames {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

namespace {

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

// Thrown by handlers to produce a non-2xx reply.
struct HttpError {
  http::status status;
  std::string code;
  std::string message;
};

http::status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kSchema:
    case ErrorCode::kInvalidInstance:
    case ErrorCode::kSearchExhausted: return http::status::bad_request;
    case ErrorCode::kOrdering:
    case ErrorCode::kBudgetExhausted:
    case ErrorCode::kAlreadyChosen:
    case ErrorCode::kSessionOpen:
    case ErrorCode::kPoolExhausted: return http::status::conflict;
    case ErrorCode::kSessionEnded: return http::status::gone;
    case ErrorCode::kUnknownRole: return http::status::unauthorized;
    case ErrorCode::kTransport:
    case ErrorCode::kTimeout: return http::status::bad_gateway;
    default: return http::status::internal_server_error;
  }
}

std::string random_hex(std::size_t bytes) {
  static std::mutex mu;
  static std::random_device device;
  static Rng rng((static_cast<std::uint64_t>(device()) << 32) ^ device());
  std::lock_guard lock(mu);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bytes; ++i) {
    auto b = rng.below(256);
    out += kHex[b >> 4];
    out += kHex[b & 15];
  }
  return out;
}

std::string_view sv(beast::string_view v) { return {v.data(), v.size()}; }

std::vector<std::string> split_path(std::string_view target) {
  target = target.substr(0, target.find('?'));
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < target.size()) {
    auto next = target.find('/', pos);
    if (next == std::string_view::npos) next = target.size();
    if (next > pos) parts.emplace_back(target.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

std::string query_param(std::string_view target, std::string_view key) {
  auto q = target.find('?');
  if (q == std::string_view::npos) return {};
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    auto amp = rest.find('&');
    auto pair = rest.substr(0, amp);
    auto eq = pair.find('=');
    if (eq != std::string_view::npos && pair.substr(0, eq) == key) return std::string(pair.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return {};
}

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

Json parse_body(const Request& req) {
  if (req.body().empty()) return Json::object();
  try {
    Json j = Json::parse(req.body());
    if (!j.is_object()) throw HttpError{http::status::bad_request, "parse", "request body must be a JSON object"};
    return j;
  } catch (const Json::exception& e) {
    throw HttpError{http::status::bad_request, "parse", std::string("malformed JSON: ") + e.what()};
  }
}

ProposalId parse_proposal(const Json& j) {
  if (!j.is_string()) throw Error(ErrorCode::kInvalidArgument, "proposal must be a string label");
  auto p = ProposalId::from_label(j.get<std::string>());
  if (!p) throw Error(ErrorCode::kInvalidArgument, "unknown proposal: " + j.get<std::string>());
  return *p;
}

struct Entry {
  std::mutex mu;
  std::condition_variable cv;
  std::unique_ptr<Session> session;
  std::string persuader_token;
  std::string target_token;
  std::unique_ptr<PersuaderAgent> agent;
  // Event JSON lines in transcript order, append-only.
  std::vector<std::string> stream;
  bool saved = false;
};

}  // namespace

struct Server::Impl {
  ServerOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  unsigned short bound_port = 0;
  std::atomic<bool> stopping{false};
  std::thread accept_thread;

  std::mutex conn_mu;
  std::condition_variable conn_cv;
  std::set<std::shared_ptr<tcp::socket>> sockets;
  int active = 0;

  std::mutex registry_mu;
  std::map<std::string, std::shared_ptr<Entry>> sessions;
  std::map<std::string, std::vector<GameInstance>> pools;
  std::map<std::string, std::vector<PayoffMatrix>> seen;  // participant -> matrices played
  std::shared_ptr<ChatBackend> llm;

  std::mutex file_mu;

  explicit Impl(ServerOptions o) : options(std::move(o)), llm(options.llm) {}

  std::shared_ptr<ChatBackend> backend() {
    std::lock_guard lock(registry_mu);
    if (!llm) llm = std::make_shared<HttpChatBackend>(llm_config_from_env());
    return llm;
  }

  // ---- session bookkeeping (entry lock held) ----

  void publish(Entry& e) {
    const Session& s = *e.session;
    std::vector<std::string> lines;
    if (s.pre_choice())
      lines.push_back(Json{{"type", "choice"}, {"stage", "pre"}, {"proposal", s.pre_choice()->name()}}.dump());
    for (const auto& ev : s.events()) lines.push_back(to_json(ev).dump());
    if (s.ended()) {
      Transcript t = s.transcript();
      if (t.final_choice)
        lines.push_back(Json{{"type", "choice"}, {"stage", "final"}, {"proposal", t.final_choice->name()}}.dump());
      Json outcome{{"type", "outcome"}, {"success", t.success}};
      outcome["status"] = t.status == GameStatus::kComplete ? "complete" : "incomplete";
      if (!t.failure_reason.empty()) outcome["reason"] = t.failure_reason;
      lines.push_back(outcome.dump());
      if (!e.saved && !options.transcripts_path.empty()) {
        std::lock_guard lock(file_mu);
        std::ofstream out(options.transcripts_path, std::ios::app | std::ios::binary);
        out << transcript_to_jsonl(t);
      }
      e.saved = true;
    }
    for (std::size_t i = e.stream.size(); i < lines.size(); ++i) e.stream.push_back(lines[i]);
    e.cv.notify_all();
  }

  // Lets an automated persuader take its turn(s).
  void drive(Entry& e) {
    if (!e.agent) return;
    Session& s = *e.session;
    try {
      const bool bot = s.config().target_kind == TargetKind::kBot;
      while (s.can_post(Role::kPersuader)) {
        // Against a human, one message per target reply.
        if (!bot && !s.events().empty() && s.events().back().role == Role::kPersuader) break;
        auto msg = e.agent->next_message(s.persuader_view());
        if (!msg) break;
        s.post(Role::kPersuader, std::move(*msg));
        if (!bot) break;
      }
      if (bot && !s.ended()) s.finish();
    } catch (const Error& err) {
      if (!s.ended()) s.fail(std::string(to_string(err.code())) + ": " + err.what());
    }
  }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::lock_guard lock(registry_mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw HttpError{http::status::not_found, "not_found", "no such session"};
    return it->second;
  }

  static Role authorize(const Entry& e, const std::string& token) {
    if (!token.empty() && token == e.persuader_token) return Role::kPersuader;
    if (!token.empty() && token == e.target_token) return Role::kTarget;
    throw HttpError{http::status::unauthorized, "unauthorized", "missing or invalid role token"};
  }

  static std::string token_of(const Request& req) {
    if (auto it = req.find("X-Role-Token"); it != req.end()) return std::string(sv(it->value()));
    if (auto it = req.find(http::field::authorization); it != req.end()) {
      std::string_view v = sv(it->value());
      if (v.starts_with("Bearer ")) return std::string(v.substr(7));
    }
    return query_param(sv(req.target()), "token");
  }

  void expire(Entry& e) {
    if (e.session->expire_if_due(Session::Clock::now())) publish(e);
  }

  // ---- handlers ----

  const GameInstance& pick_instance(const std::string& scenario, const std::string& participant,
                                    const std::optional<ValenceVector>& valence) {
    auto& pool = pools[scenario];
    if (pool.empty()) pool = generate(options.seed, find_scenario(scenario), options.pool_per_scenario);
    auto& mine = seen[participant];
    std::size_t idx = select_game(pool, participant.empty() ? std::vector<PayoffMatrix>{} : mine, valence);
    if (!participant.empty()) mine.push_back(pool[idx].matrix);
    return pool[idx];
  }

  Json create_session(const Json& body) {
    SessionConfig cfg;
    cfg.condition = parse_condition(body.value("condition", std::string("hidden")));
    cfg.persuader_kind = parse_persuader_kind(body.value("persuader", std::string("human")));
    cfg.target_kind = parse_target_kind(body.value("target", std::string("bot")));
    cfg.classifier_kind = parse_classifier_kind(body.value("classifier", std::string("structured")));
    cfg.seed = body.value("seed", std::uint64_t{0});
    cfg.max_persuader_turns = body.value("max_turns", 10);
    cfg.random_draws = body.value("random_draws", 6);
    cfg.persuader_id = body.value("persuader_id", std::string());
    cfg.target_id = body.value("target_id", std::string());
    if (cfg.target_kind == TargetKind::kHuman && options.human_timeout_seconds > 0)
      cfg.human_timeout_seconds = options.human_timeout_seconds;
    if (body.contains("survey")) {
      const auto& answers = body.at("survey");
      if (!answers.is_array() || answers.size() != kAttributes)
        throw Error(ErrorCode::kInvalidArgument, "survey needs one answer per attribute");
      std::array<LikertResponse, kAttributes> parsed{};
      for (int a = 0; a < kAttributes; ++a) parsed[a] = parse_likert(answers.at(a).get<std::string>());
      cfg.inferred_valence = infer_valence(parsed);
    } else if (body.contains("inferred_valence")) {
      cfg.inferred_valence = valence_from_json(body.at("inferred_valence"));
    }

    {
      std::lock_guard lock(registry_mu);
      if (body.contains("instance")) {
        cfg.instance = instance_from_json(body.at("instance"));
      } else {
        std::string scenario = body.value("scenario", std::string("llm"));
        std::string participant = body.value("participant_id", cfg.target_kind == TargetKind::kHuman
                                                                   ? cfg.target_id
                                                                   : cfg.persuader_id);
        cfg.instance = pick_instance(scenario, participant, cfg.inferred_valence);
      }
    }

    Classifier classifier;
    if (cfg.classifier_kind == ClassifierKind::kLlm) {
      auto be = backend();
      classifier = [be](std::string_view text, const Scenario& sc) { return classify_llm(text, sc, *be, 2); };
    }
    auto entry = std::make_shared<Entry>();
    entry->session = std::make_unique<Session>(cfg, std::move(classifier));
    switch (cfg.persuader_kind) {
      case PersuaderKind::kOptimal: entry->agent = std::make_unique<OptimalPersuader>(); break;
      case PersuaderKind::kRandom:
        entry->agent = std::make_unique<RandomPersuader>(cfg.seed, cfg.random_draws);
        break;
      case PersuaderKind::kLlm:
        entry->agent = std::make_unique<LlmPersuader>(backend(), cfg.message_char_limit);
        break;
      case PersuaderKind::kHuman: break;
    }
    entry->persuader_token = random_hex(16);
    entry->target_token = random_hex(16);
    std::string id = random_hex(8);
    {
      std::lock_guard lock(entry->mu);
      drive(*entry);
      publish(*entry);
    }
    {
      std::lock_guard lock(registry_mu);
      sessions[id] = entry;
    }
    Json out;
    out["session_id"] = id;
    out["persuader_token"] = entry->persuader_token;
    out["target_token"] = entry->target_token;
    out["scenario"] = cfg.instance.scenario_id;
    out["condition"] = to_string(cfg.condition);
    if (cfg.inferred_valence) out["inferred_valence"] = valence_to_json(*cfg.inferred_valence);
    return out;
  }

  Json view(Entry& e, Role role) {
    const Session& s = *e.session;
    Json out;
    out["role"] = to_string(role);
    out["condition"] = to_string(s.config().condition);
    out["can_post"] = s.can_post(role);
    out["ended"] = s.ended();
    out["persuader_turns_used"] = s.persuader_turns_used();
    out["max_persuader_turns"] = s.config().max_persuader_turns;
    if (role == Role::kPersuader) {
      out["view"] = to_json(s.persuader_view());
    } else {
      out["view"] = to_json(s.target_view());
      out["needs_pre_choice"] = s.config().target_kind == TargetKind::kHuman && !s.pre_choice() && !s.ended();
    }
    return out;
  }

  Json post_message(Entry& e, Role role, const Json& body) {
    if (!body.contains("text") || !body.at("text").is_string())
      throw Error(ErrorCode::kInvalidArgument, "body needs a string 'text'");
    Session& s = *e.session;
    if (s.ended()) throw Error(ErrorCode::kSessionEnded, "session has ended");
    if (role == Role::kPersuader && e.agent)
      throw Error(ErrorCode::kOrdering, "this session's persuader is automated");
    auto added = s.post(role, body.at("text").get<std::string>());
    if (role == Role::kTarget) drive(e);
    publish(e);
    Json events = Json::array();
    for (const auto& ev : added) events.push_back(to_json(ev));
    return Json{{"events", events}, {"ended", s.ended()}};
  }

  Json post_choice(Entry& e, Role role, const Json& body) {
    if (role != Role::kTarget)
      throw HttpError{http::status::forbidden, "forbidden", "only the target makes choices"};
    Session& s = *e.session;
    const std::string stage = body.value("stage", std::string());
    ProposalId p = parse_proposal(body.value("proposal", Json()));
    if (stage == "pre") {
      s.set_pre_choice(p);
      drive(e);
    } else if (stage == "final") {
      if (s.ended()) throw Error(ErrorCode::kSessionEnded, "session has ended");
      s.set_final_choice(p);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "stage must be 'pre' or 'final'");
    }
    publish(e);
    Json out{{"stage", stage}, {"proposal", p.name()}, {"ended", s.ended()}};
    if (s.ended()) out["success"] = s.transcript().success;
    return out;
  }

  Response json_response(const Request& req, http::status st, const Json& body) {
    Response res{st, req.version()};
    res.set(http::field::content_type, "application/json");
    res.keep_alive(req.keep_alive());
    res.body() = body.dump();
    res.prepare_payload();
    return res;
  }

  Response serve_static(const Request& req) {
    if (options.static_dir.empty() || req.method() != http::verb::get)
      throw HttpError{http::status::not_found, "not_found", "no such route"};
    std::string_view target = sv(req.target());
    std::string path(target.substr(0, target.find('?')));
    if (path.find("..") != std::string::npos)
      throw HttpError{http::status::bad_request, "invalid_argument", "bad path"};
    if (path.empty() || path.back() == '/') path += "index.html";
    std::filesystem::path file = std::filesystem::path(options.static_dir) / path.substr(1);
    if (!std::filesystem::is_regular_file(file)) throw HttpError{http::status::not_found, "not_found", "no such file"};
    Response res{http::status::ok, req.version()};
    res.set(http::field::content_type, std::string(mime_type(file)));
    res.keep_alive(req.keep_alive());
    res.body() = read_file(file.string());
    res.prepare_payload();
    return res;
  }

  Response handle(const Request& req) {
    try {
      auto parts = split_path(sv(req.target()));
      const auto method = req.method();
      if (parts.size() == 1 && parts[0] == "healthz" && method == http::verb::get)
        return json_response(req, http::status::ok, Json{{"status", "ok"}});
      if (parts.size() == 1 && parts[0] == "survey" && method == http::verb::post) {
        Json body = parse_body(req);
        const auto& answers = body.at("answers");
        if (!answers.is_array() || answers.size() != kAttributes)
          throw Error(ErrorCode::kInvalidArgument, "answers needs one label per attribute");
        std::array<LikertResponse, kAttributes> parsed{};
        for (int a = 0; a < kAttributes; ++a) parsed[a] = parse_likert(answers.at(a).get<std::string>());
        return json_response(req, http::status::ok, Json{{"valence", valence_to_json(infer_valence(parsed))}});
      }
      if (parts.size() == 1 && parts[0] == "sessions" && method == http::verb::post)
        return json_response(req, http::status::created, create_session(parse_body(req)));
      if (parts.size() == 3 && parts[0] == "sessions") {
        auto entry = find(parts[1]);
        const std::string token = token_of(req);
        std::lock_guard lock(entry->mu);
        Role role = authorize(*entry, token);
        expire(*entry);
        const std::string& what = parts[2];
        if (what == "view" && method == http::verb::get)
          return json_response(req, http::status::ok, view(*entry, role));
        if (what == "messages" && method == http::verb::post)
          return json_response(req, http::status::ok, post_message(*entry, role, parse_body(req)));
        if (what == "choice" && method == http::verb::post)
          return json_response(req, http::status::ok, post_choice(*entry, role, parse_body(req)));
        if (what == "transcript" && method == http::verb::get) {
          Response res{http::status::ok, req.version()};
          res.set(http::field::content_type, "application/x-ndjson");
          res.keep_alive(req.keep_alive());
          res.body() = transcript_to_jsonl(entry->session->transcript());
          res.prepare_payload();
          return res;
        }
        throw HttpError{http::status::not_found, "not_found", "no such route"};
      }
      return serve_static(req);
    } catch (const HttpError& e) {
      return json_response(req, e.status, Json{{"error", e.code}, {"message", e.message}});
    } catch (const Error& e) {
      return json_response(req, status_for(e.code()), Json{{"error", to_string(e.code())}, {"message", e.what()}});
    } catch (const Json::exception& e) {
      return json_response(req, http::status::bad_request, Json{{"error", "invalid_argument"}, {"message", e.what()}});
    } catch (const std::exception& e) {
      return json_response(req, http::status::internal_server_error,
                           Json{{"error", "internal"}, {"message", e.what()}});
    }
  }

  // ---- transport ----

  void stream_events(tcp::socket& socket, const Request& req) {
    auto parts = split_path(sv(req.target()));
    std::shared_ptr<Entry> entry;
    try {
      if (parts.size() != 3 || parts[0] != "sessions" || parts[2] != "stream")
        throw HttpError{http::status::not_found, "not_found", "no such stream"};
      entry = find(parts[1]);
      std::lock_guard lock(entry->mu);
      authorize(*entry, token_of(req));
    } catch (const HttpError& e) {
      auto res = json_response(req, e.status, Json{{"error", e.code}, {"message", e.message}});
      res.keep_alive(false);
      http::write(socket, res);
      return;
    }
    websocket::stream<tcp::socket&> ws(socket);
    ws.accept(req);
    ws.text(true);
    std::size_t cursor = 0;
    while (!stopping) {
      std::vector<std::string> batch;
      bool done = false;
      {
        std::unique_lock lock(entry->mu);
        entry->cv.wait_for(lock, std::chrono::milliseconds(200),
                           [&] { return stopping || entry->stream.size() > cursor; });
        if (entry->session->expire_if_due(Session::Clock::now())) publish(*entry);
        batch.assign(entry->stream.begin() + static_cast<std::ptrdiff_t>(cursor), entry->stream.end());
        cursor = entry->stream.size();
        done = entry->session->ended();
      }
      for (const auto& line : batch) ws.write(asio::buffer(line));
      if (done) {
        ws.close(websocket::close_code::normal);
        return;
      }
    }
    beast::error_code ignored;
    ws.close(websocket::close_code::going_away, ignored);
  }

  void serve_connection(std::shared_ptr<tcp::socket> socket) {
    beast::flat_buffer buffer;
    try {
      while (!stopping) {
        Request req;
        http::read(*socket, buffer, req);
        if (websocket::is_upgrade(req)) {
          stream_events(*socket, req);
          break;
        }
        Response res = handle(req);
        http::write(*socket, res);
        if (!res.keep_alive()) break;
      }
    } catch (const std::exception&) {
      // Peer went away or the server is stopping.
    }
    beast::error_code ec;
    socket->shutdown(tcp::socket::shutdown_both, ec);
    std::lock_guard lock(conn_mu);
    sockets.erase(socket);
    --active;
    conn_cv.notify_all();
  }

  void accept_loop() {
    while (!stopping) {
      auto socket = std::make_shared<tcp::socket>(ioc);
      beast::error_code ec;
      acceptor.accept(*socket, ec);
      if (stopping) break;
      if (ec) continue;
      std::lock_guard lock(conn_mu);
      sockets.insert(socket);
      ++active;
      std::thread([this, socket] { serve_connection(socket); }).detach();
    }
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& im = *impl_;
  try {
    tcp::endpoint ep(asio::ip::make_address(im.options.host), im.options.port);
    im.acceptor.open(ep.protocol());
    im.acceptor.set_option(asio::socket_base::reuse_address(true));
    im.acceptor.bind(ep);
    im.acceptor.listen();
    im.bound_port = im.acceptor.local_endpoint().port();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kIo, std::string("cannot listen: ") + e.what());
  }
  im.accept_thread = std::thread([&im] { im.accept_loop(); });
}

unsigned short Server::port() const { return impl_->bound_port; }

void Server::stop() {
  auto& im = *impl_;
  if (!im.accept_thread.joinable()) return;
  im.stopping = true;
  {
    // Wake the blocking accept with a throwaway connection.
    beast::error_code ec;
    asio::io_context tmp;
    tcp::socket poke(tmp);
    poke.connect(tcp::endpoint(asio::ip::make_address(im.options.host), im.bound_port), ec);
  }
  im.accept_thread.join();
  {
    std::lock_guard lock(im.conn_mu);
    for (const auto& s : im.sockets) {
      beast::error_code ec;
      s->shutdown(tcp::socket::shutdown_both, ec);
    }
  }
  {
    std::lock_guard lock(im.registry_mu);
    for (auto& [id, e] : im.sessions) e->cv.notify_all();
  }
  std::unique_lock lock(im.conn_mu);
  im.conn_cv.wait(lock, [&] { return im.active == 0; });
  beast::error_code ec;
  im.acceptor.close(ec);
}

}  // namespace mindgames
