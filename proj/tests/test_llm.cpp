#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "support.hpp"
#include "mindgames/llm.hpp"
#include "mindgames/session.hpp"

using namespace mgtest;

namespace {

const char* kSecret = "sk-test-0123456789abcdef";

// Local chat-completions stand-in.
struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::string last_auth;
  std::string last_body;
  std::vector<std::string> replies;
  int status = 200;
  int delay_ms = 0;
  std::size_t calls = 0;

  StubServer() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_auth = req.get_header_value("Authorization");
      last_body = req.body;
      if (delay_ms) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      std::string content = replies.empty() ? "{}" : replies[std::min(calls, replies.size() - 1)];
      ++calls;
      nlohmann::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
      res.status = status;
      res.set_content(body.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    thread.join();
  }
  LlmClientConfig config() const {
    LlmClientConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    c.model = "stub-model";
    c.credential_env = "MG_TEST_LLM_KEY";
    c.timeout_seconds = 2;
    return c;
  }
};

const char* kValid =
    R"({"disclosures":[{"proposal":"A","attribute":1,"effect":1}],"info_appeals":[null],"motivational_appeal":false,"preference_query":true})";

class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::vector<ChatMessage>&, const std::optional<nlohmann::json>&) override {
    return replies_.at(std::min(calls++, replies_.size() - 1));
  }
  std::size_t calls = 0;

 private:
  std::vector<std::string> replies_;
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("http backend sends the key and redacts logs") {
  setenv("MG_TEST_LLM_KEY", kSecret, 1);
  StubServer stub;
  stub.replies = {kValid};
  std::vector<std::string> log;
  HttpChatBackend backend(stub.config(), [&](const std::string& line) { log.push_back(line); });
  auto reply = backend.complete({{"user", "hello"}}, classification_schema());
  CHECK(reply == kValid);
  CHECK(stub.last_auth == std::string("Bearer ") + kSecret);
  auto body = nlohmann::json::parse(stub.last_body);
  CHECK(body["model"] == "stub-model");
  CHECK(body["response_format"]["type"] == "json_schema");
  REQUIRE(log.size() == 2);
  for (const auto& line : log) {
    CHECK(line.find(kSecret) == std::string::npos);
  }
  CHECK(log[0].find("[REDACTED]") != std::string::npos);
}

TEST_CASE("http backend errors") {
  setenv("MG_TEST_LLM_KEY", kSecret, 1);
  {
    StubServer stub;
    stub.status = 500;
    HttpChatBackend backend(stub.config());
    CHECK(code_of([&] { backend.complete({{"user", "x"}}, std::nullopt); }) == ErrorCode::kTransport);
  }
  {
    StubServer stub;
    stub.delay_ms = 1500;
    auto cfg = stub.config();
    cfg.timeout_seconds = 0.3;
    HttpChatBackend backend(cfg);
    CHECK(code_of([&] { backend.complete({{"user", "x"}}, std::nullopt); }) == ErrorCode::kTimeout);
  }
  int closed_port;
  {
    StubServer stub;
    closed_port = stub.port;
  }
  LlmClientConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(closed_port) + "/v1";
  cfg.timeout_seconds = 1;
  HttpChatBackend backend(cfg);
  CHECK(code_of([&] { backend.complete({{"user", "x"}}, std::nullopt); }) == ErrorCode::kTransport);
  LlmClientConfig bad;
  bad.endpoint = "no-scheme";
  HttpChatBackend b2(bad);
  CHECK(code_of([&] { b2.complete({{"user", "x"}}, std::nullopt); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("classify_llm end to end through the stub") {
  setenv("MG_TEST_LLM_KEY", kSecret, 1);
  StubServer stub;
  stub.replies = {"```json\n" + std::string(kValid) + "\n```"};
  auto c = classify_llm("Proposal A boosts speed. Which do you prefer?", find_scenario("llm"), stub.config());
  CHECK(c.disclosures == std::vector<Claim>{Claim{P('A'), AttributeId(1), Effect::kIncrease}});
  CHECK(c.preference_query);
}

TEST_CASE("schema retries") {
  const auto& s = find_scenario("llm");
  ScriptedBackend ok({"not json", R"({"disclosures":[]})", kValid});
  auto c = classify_llm("hello", s, ok, 2);
  CHECK(ok.calls == 3);
  CHECK(c.preference_query);
  ScriptedBackend bad({"nope"});
  CHECK(code_of([&] { classify_llm("hello", s, bad, 2); }) == ErrorCode::kSchema);
  CHECK(bad.calls == 3);
  ScriptedBackend unused({kValid});
  CHECK(classify_llm("   ", s, unused, 2).generic);
  CHECK(unused.calls == 0);
}

TEST_CASE("reply validation") {
  CHECK_THROWS_AS(parse_llm_classification(R"({"disclosures":[{"proposal":"D","attribute":0,"effect":1}],"info_appeals":[],"motivational_appeal":false})"), Error);
  CHECK_THROWS_AS(parse_llm_classification(R"({"disclosures":[],"info_appeals":[],"motivational_appeal":false,"extra":1})"), Error);
  CHECK_THROWS_AS(parse_llm_classification(R"({"disclosures":[{"proposal":"A","attribute":3,"effect":1}],"info_appeals":[],"motivational_appeal":false})"), Error);
  CHECK(parse_llm_classification(R"({"disclosures":[],"info_appeals":[],"motivational_appeal":false,"preference_query":false})").generic);
}

TEST_CASE("persuader prompt: Hidden omits the target's mind, Revealed includes it") {
  SessionConfig cfg;
  cfg.instance = worked_example();
  cfg.condition = Condition::kHidden;
  Session hidden(cfg);
  auto h = build_persuader_prompt(hidden.persuader_view());
  CHECK(h[0].content.find("What the other player knows") == std::string::npos);
  CHECK(h[0].content.find("proposal A") != std::string::npos);
  cfg.condition = Condition::kRevealed;
  Session revealed(cfg);
  auto r = build_persuader_prompt(revealed.persuader_view());
  CHECK(r[0].content.find("What the other player knows") != std::string::npos);
  CHECK(r[0].content.find("They like safety and control of LLMs") != std::string::npos);
  CHECK(r.back().role == "user");
}

TEST_CASE("revealed prompt uses third person throughout") {
  AgentView v;
  v.scenario = &find_scenario("llm");
  v.condition = Condition::kRevealed;
  v.target_valence = ValenceVector{Valence::kLike, Valence::kIndifferent, Valence::kDislike};
  v.target_known = std::vector<Fact>{};
  auto p = build_persuader_prompt(v);
  CHECK(p[0].content.find("They am") == std::string::npos);
  CHECK(p[0].content.find("They are indifferent to development speed of LLMs") != std::string::npos);
  CHECK(p[0].content.find("They dislike public trust in LLMs") != std::string::npos);
}

TEST_CASE("helpers") {
  CHECK(redact("key=abc abc", "abc") == "key=[REDACTED] [REDACTED]");
  CHECK(redact("x", "") == "x");
  CHECK(cap_message("one two three", 8) == "one two");
  CHECK(cap_message("short", 300) == "short");
  unsetenv("MINDGAMES_LLM_MODEL");
  setenv("MINDGAMES_LLM_ENDPOINT", "http://localhost:9/v1", 1);
  auto c = llm_config_from_env();
  CHECK(c.endpoint == "http://localhost:9/v1");
  CHECK(c.model == "o3");
  CHECK(c.credential_env == "OPENAI_API_KEY");
  unsetenv("MINDGAMES_LLM_ENDPOINT");
}
