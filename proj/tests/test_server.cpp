#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>

#include "support.hpp"
#include "mindgames/codec.hpp"
#include "mindgames/server.hpp"

using namespace mgtest;

namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

struct Running {
  Server server;
  httplib::Client client;
  explicit Running(ServerOptions o) : server(std::move(o)), client("127.0.0.1", start(server)) {}
  static int start(Server& s) {
    s.start();
    return s.port();
  }
};

ServerOptions options() {
  ServerOptions o;
  o.seed = 5;
  o.pool_per_scenario = 4;
  return o;
}

httplib::Headers token(const std::string& t) { return {{"X-Role-Token", t}}; }

Json post(httplib::Client& c, const std::string& path, const Json& body, const std::string& tok, int expect) {
  auto res = c.Post(path, token(tok), body.dump(), "application/json");
  REQUIRE(res);
  CHECK_MESSAGE(res->status == expect, path << " -> " << res->status << " " << res->body);
  return Json::parse(res->body);
}

Json get(httplib::Client& c, const std::string& path, const std::string& tok, int expect) {
  auto res = c.Get(path, token(tok));
  REQUIRE(res);
  CHECK_MESSAGE(res->status == expect, path << " -> " << res->status << " " << res->body);
  return Json::parse(res->body);
}

// Reads every frame until the server closes the stream.
std::vector<std::string> read_stream(int port, const std::string& path) {
  asio::io_context ioc;
  tcp::resolver resolver(ioc);
  websocket::stream<tcp::socket> ws(ioc);
  asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
  ws.handshake("127.0.0.1", path);
  std::vector<std::string> lines;
  for (;;) {
    beast::flat_buffer buf;
    beast::error_code ec;
    ws.read(buf, ec);
    if (ec == websocket::error::closed) break;
    REQUIRE_FALSE(ec);
    lines.push_back(beast::buffers_to_string(buf.data()));
  }
  CHECK(ws.reason().code == websocket::close_code::normal);
  return lines;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("health and survey") {
  Running r(options());
  auto res = r.client.Get("/healthz");
  REQUIRE(res);
  CHECK(res->status == 200);
  auto v = post(r.client, "/survey", Json{{"answers", {"Increased a lot", "Stayed the same", "Decreased"}}}, "", 200);
  CHECK(v["valence"] == Json::array({1, 0, -1}));
  auto bad = post(r.client, "/survey", Json{{"answers", {"Sort of"}}}, "", 400);
  CHECK(bad["error"] == "invalid_argument");
  auto missing = r.client.Get("/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);
}

TEST_CASE("human-versus-human session over HTTP and WebSocket") {
  auto dir = std::filesystem::temp_directory_path() / "mg_server_test";
  std::filesystem::create_directories(dir);
  auto o = options();
  o.transcripts_path = (dir / "live.jsonl").string();
  std::filesystem::remove(o.transcripts_path);
  Running r(o);

  Json create{{"condition", "hidden"},   {"persuader", "human"},      {"target", "human"},
              {"persuader_id", "p-1"},   {"target_id", "t-1"},        {"instance", to_json(worked_example())}};
  auto created = post(r.client, "/sessions", create, "", 201);
  const std::string id = created["session_id"];
  const std::string pt = created["persuader_token"];
  const std::string tt = created["target_token"];
  const std::string base = "/sessions/" + id;

  // Tokens gate every session route.
  get(r.client, base + "/view", "", 401);
  get(r.client, base + "/view", "wrong", 401);
  get(r.client, "/sessions/unknown/view", pt, 404);

  auto pv = get(r.client, base + "/view", pt, 200);
  CHECK(pv["role"] == "persuader");
  CHECK_FALSE(pv["view"].contains("other_player"));
  CHECK(pv["can_post"] == false);
  auto tv = get(r.client, base + "/view", tt, 200);
  CHECK(tv["needs_pre_choice"] == true);
  CHECK(tv["view"].dump().find("goal") == std::string::npos);

  // Bearer header works too.
  auto bearer = r.client.Get(base + "/view", httplib::Headers{{"Authorization", "Bearer " + tt}});
  REQUIRE(bearer);
  CHECK(bearer->status == 200);

  post(r.client, base + "/messages", Json{{"text", "ASK-VALUES"}}, pt, 409);
  post(r.client, base + "/choice", Json{{"stage", "pre"}, {"proposal", "C"}}, pt, 403);
  post(r.client, base + "/choice", Json{{"stage", "pre"}, {"proposal", "C"}}, tt, 200);
  post(r.client, base + "/choice", Json{{"stage", "pre"}, {"proposal", "B"}}, tt, 409);
  get(r.client, base + "/transcript", tt, 409);

  std::vector<std::string> frames;
  std::thread listener([&] { frames = read_stream(r.server.port(), base + "/stream?token=" + tt); });

  post(r.client, base + "/messages", Json{{"text", "DISCLOSE A 1 +1\nDISCLOSE C 0 -1"}}, pt, 200);
  post(r.client, base + "/messages", Json{{"text", "ASK-VALUES"}}, pt, 409);
  post(r.client, base + "/messages", Json{{"text", "CHAT thanks"}}, tt, 200);
  post(r.client, base + "/messages", Json{{"text", "NOT A COMMAND"}}, pt, 400);
  auto fin = post(r.client, base + "/choice", Json{{"stage", "final"}, {"proposal", "A"}}, tt, 200);
  CHECK(fin["ended"] == true);
  CHECK(fin["success"] == true);
  listener.join();

  post(r.client, base + "/messages", Json{{"text", "ASK-VALUES"}}, pt, 410);
  auto tr = r.client.Get(base + "/transcript", token(pt));
  REQUIRE(tr);
  CHECK(tr->status == 200);
  auto lines = split_lines(tr->body);
  REQUIRE(lines.size() == frames.size() + 1);
  // The stream carries every transcript line after the game header, in order.
  for (std::size_t i = 0; i < frames.size(); ++i) CHECK(frames[i] == lines[i + 1]);

  auto saved = transcripts_from_jsonl(read_file(o.transcripts_path));
  REQUIRE(saved.size() == 1);
  CHECK(saved[0].success);
  CHECK(saved[0].config.persuader_id == "p-1");
  std::filesystem::remove_all(dir);
}

TEST_CASE("automated persuader against the bot finishes at creation") {
  Running r(options());
  auto created = post(r.client, "/sessions",
                      Json{{"condition", "revealed"}, {"persuader", "optimal"}, {"target", "bot"}, {"scenario", "moon"}},
                      "", 201);
  CHECK(created["scenario"] == "moon");
  const std::string base = "/sessions/" + std::string(created["session_id"]);
  auto v = get(r.client, base + "/view", std::string(created["persuader_token"]), 200);
  CHECK(v["ended"] == true);
  CHECK(v["view"]["other_player"]["valence"].is_array());
  auto frames = read_stream(r.server.port(), base + "/stream?token=" + std::string(created["target_token"]));
  REQUIRE_FALSE(frames.empty());
  auto last = Json::parse(frames.back());
  CHECK(last["type"] == "outcome");
  CHECK(last["success"] == true);
}

TEST_CASE("automated persuader against a human target waits for each reply") {
  Running r(options());
  auto created = post(r.client, "/sessions",
                      Json{{"persuader", "random"}, {"target", "human"}, {"random_draws", 3},
                           {"instance", to_json(worked_example())}},
                      "", 201);
  const std::string base = "/sessions/" + std::string(created["session_id"]);
  const std::string tt = created["target_token"];
  post(r.client, base + "/choice", Json{{"stage", "pre"}, {"proposal", "C"}}, tt, 200);
  auto tv = get(r.client, base + "/view", tt, 200);
  CHECK(tv["view"]["history"].size() == 1);
  CHECK(tv["can_post"] == true);
  post(r.client, base + "/messages", Json{{"text", "hi"}}, std::string(created["persuader_token"]), 409);
}

TEST_CASE("bad session requests") {
  Running r(options());
  post(r.client, "/sessions", Json{{"condition", "sideways"}}, "", 400);
  post(r.client, "/sessions", Json{{"scenario", "atlantis"}}, "", 400);
  auto res = r.client.Post("/sessions", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  auto bad = to_json(worked_example());
  bad["p_init"] = "A";
  post(r.client, "/sessions", Json{{"instance", bad}}, "", 400);
}

TEST_CASE("pool exhaustion per participant") {
  auto o = options();
  o.pool_per_scenario = 2;
  Running r(o);
  Json body{{"persuader", "human"}, {"target", "human"}, {"target_id", "same"}, {"scenario", "lunch"}};
  post(r.client, "/sessions", body, "", 201);
  post(r.client, "/sessions", body, "", 201);
  auto third = post(r.client, "/sessions", body, "", 409);
  CHECK(third["error"] == "pool_exhausted");
}

TEST_CASE("human timeout ends the session as incomplete") {
  auto o = options();
  o.human_timeout_seconds = 0.2;
  Running r(o);
  auto created = post(r.client, "/sessions", Json{{"persuader", "human"}, {"target", "human"}}, "", 201);
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  const std::string base = "/sessions/" + std::string(created["session_id"]);
  auto v = get(r.client, base + "/view", std::string(created["target_token"]), 200);
  CHECK(v["ended"] == true);
  auto tr = r.client.Get(base + "/transcript", token(std::string(created["target_token"])));
  REQUIRE(tr);
  CHECK(tr->body.find("\"status\":\"incomplete\"") != std::string::npos);
}

TEST_CASE("static files") {
  auto dir = std::filesystem::temp_directory_path() / "mg_static_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "index.html") << "<html>hi</html>";
  auto o = options();
  o.static_dir = dir.string();
  Running r(o);
  auto res = r.client.Get("/");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == "<html>hi</html>");
  CHECK(res->get_header_value("Content-Type").find("text/html") == 0);
  std::filesystem::remove_all(dir);
}
