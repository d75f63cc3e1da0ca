#include "mindgames/llm.hpp"

#include <cstdlib>
#include <sstream>

#include <httplib.h>

#include "mindgames/bot.hpp"

namespace mindgames {
namespace {

using nlohmann::json;

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return (v && *v) ? std::string(v) : std::move(fallback);
}

struct Endpoint {
  std::string scheme_host_port;
  std::string base_path;
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "endpoint needs a scheme: " + url);
  auto path = url.find('/', scheme + 3);
  Endpoint e;
  e.scheme_host_port = url.substr(0, path);
  e.base_path = path == std::string::npos ? "" : url.substr(path);
  while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  return e;
}

std::string strip_fences(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  s.remove_prefix(first);
  if (s.starts_with("```")) {
    auto nl = s.find('\n');
    s = nl == std::string_view::npos ? std::string_view{} : s.substr(nl + 1);
    auto close = s.rfind("```");
    if (close != std::string_view::npos) s = s.substr(0, close);
  }
  return std::string(s);
}

std::string effect_table(const PayoffMatrix& matrix, const Scenario& scenario) {
  std::ostringstream out;
  for (int p = 0; p < kProposals; ++p) {
    std::vector<Fact> row;
    for (int a = 0; a < kAttributes; ++a) row.push_back(Fact{ProposalId(p), AttributeId(a), matrix.at(ProposalId(p), AttributeId(a))});
    out << "- " << render_facts(row, scenario) << "\n";
  }
  return out.str();
}

}  // namespace

LlmClientConfig llm_config_from_env() {
  LlmClientConfig c;
  c.endpoint = env_or("MINDGAMES_LLM_ENDPOINT", c.endpoint);
  c.model = env_or("MINDGAMES_LLM_MODEL", c.model);
  c.credential_env = env_or("MINDGAMES_LLM_CREDENTIAL_ENV", c.credential_env);
  return c;
}

std::string redact(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  std::size_t pos = 0;
  while ((pos = text.find(secret, pos)) != std::string::npos) {
    text.replace(pos, secret.size(), "[REDACTED]");
    pos += 10;
  }
  return text;
}

HttpChatBackend::HttpChatBackend(LlmClientConfig config, LogSink log)
    : config_(std::move(config)), log_(std::move(log)) {}

std::string HttpChatBackend::complete(const std::vector<ChatMessage>& messages,
                                      const std::optional<json>& json_schema) {
  Endpoint ep = split_endpoint(config_.endpoint);
  httplib::Client client(ep.scheme_host_port);
  auto secs = static_cast<time_t>(config_.timeout_seconds);
  auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  json body;
  body["model"] = config_.model;
  body["messages"] = json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (json_schema)
    body["response_format"] = {{"type", "json_schema"},
                               {"json_schema", {{"name", "classification"}, {"strict", true}, {"schema", *json_schema}}}};

  const std::string key = env_or(config_.credential_env.c_str(), "");
  httplib::Headers headers;
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

  const std::string payload = body.dump();
  if (log_) log_(redact("POST " + config_.endpoint + "/chat/completions Authorization: Bearer " + key + " " + payload, key));

  auto res = client.Post(ep.base_path + "/chat/completions", headers, payload, "application/json");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
      throw Error(ErrorCode::kTimeout, "llm request timed out or read failed: " + httplib::to_string(err));
    throw Error(ErrorCode::kTransport, "llm request failed: " + httplib::to_string(err));
  }
  if (log_) log_(redact("HTTP " + std::to_string(res->status) + " " + res->body, key));
  if (res->status != 200)
    throw Error(ErrorCode::kTransport, "llm endpoint returned HTTP " + std::to_string(res->status));
  try {
    auto reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("unexpected chat-completions body: ") + e.what());
  }
}

const json& classification_schema() {
  static const json schema = json::parse(R"({
    "type": "object",
    "properties": {
      "disclosures": {
        "type": "array",
        "items": {
          "type": "object",
          "properties": {
            "proposal": {"type": "string", "enum": ["A", "B", "C"]},
            "attribute": {"type": "integer", "enum": [0, 1, 2]},
            "effect": {"type": "integer", "enum": [-1, 0, 1]}
          },
          "required": ["proposal", "attribute", "effect"],
          "additionalProperties": false
        }
      },
      "info_appeals": {
        "type": "array",
        "items": {"type": ["string", "null"], "enum": ["A", "B", "C", null]}
      },
      "motivational_appeal": {"type": "boolean"},
      "preference_query": {"type": "boolean"}
    },
    "required": ["disclosures", "info_appeals", "motivational_appeal", "preference_query"],
    "additionalProperties": false
  })");
  return schema;
}

std::vector<ChatMessage> build_classifier_prompt(std::string_view message, const Scenario& scenario) {
  std::ostringstream sys;
  sys << "You label messages sent in a negotiation game about three proposals (A, B, C). "
         "Each proposal can increase (+1), decrease (-1) or have no effect (0) on each of three attributes:\n";
  for (int a = 0; a < kAttributes; ++a) sys << "  attribute " << a << ": " << scenario.attribute_names[a] << "\n";
  sys << "The nine facts a message can state are:\n";
  for (int p = 0; p < kProposals; ++p)
    for (int a = 0; a < kAttributes; ++a)
      sys << "  (" << ProposalId(p).label() << ", " << a << "): effect of proposal " << ProposalId(p).label()
          << " on " << scenario.attribute_names[a] << "\n";
  sys << "Return JSON with:\n"
         "  disclosures: every fact the message asserts, as {proposal, attribute, effect};\n"
         "  info_appeals: one entry per question about what the reader knows about the proposals "
         "(the proposal letter if the question is about one proposal, otherwise null);\n"
         "  motivational_appeal: true if the message asks which attributes the reader likes, dislikes or cares about;\n"
         "  preference_query: true if the message asks which proposal the reader currently prefers or will choose.\n"
         "A message can both assert facts and ask questions. Report only what is explicitly stated.";
  return {ChatMessage{"system", sys.str()}, ChatMessage{"user", std::string(message)}};
}

Classification parse_llm_classification(std::string_view content) {
  json j;
  try {
    j = json::parse(strip_fences(content));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("classifier reply is not JSON: ") + e.what());
  }
  auto bad = [](const std::string& why) { return Error(ErrorCode::kSchema, "classifier reply: " + why); };
  if (!j.is_object()) throw bad("not an object");
  for (const auto& [k, v] : j.items())
    if (k != "disclosures" && k != "info_appeals" && k != "motivational_appeal" && k != "preference_query")
      throw bad("unexpected key " + k);
  Classification c;
  if (!j.contains("disclosures") || !j["disclosures"].is_array()) throw bad("disclosures must be an array");
  for (const auto& d : j["disclosures"]) {
    if (!d.is_object() || !d.contains("proposal") || !d.contains("attribute") || !d.contains("effect"))
      throw bad("disclosure needs proposal, attribute, effect");
    if (!d["proposal"].is_string()) throw bad("proposal must be a letter");
    auto p = ProposalId::from_label(d["proposal"].get<std::string>());
    if (!p || d["proposal"].get<std::string>() != p->name()) throw bad("proposal must be A, B or C");
    if (!d["attribute"].is_number_integer() || d["attribute"].get<int>() < 0 || d["attribute"].get<int>() > 2)
      throw bad("attribute must be 0, 1 or 2");
    if (!d["effect"].is_number_integer() || d["effect"].get<int>() < -1 || d["effect"].get<int>() > 1)
      throw bad("effect must be -1, 0 or 1");
    c.disclosures.push_back(Claim{*p, AttributeId(d["attribute"].get<int>()), effect_from_int(d["effect"].get<int>())});
  }
  if (!j.contains("info_appeals") || !j["info_appeals"].is_array()) throw bad("info_appeals must be an array");
  for (const auto& s : j["info_appeals"]) {
    if (s.is_null()) {
      c.info_appeals.emplace_back(std::nullopt);
      continue;
    }
    if (!s.is_string()) throw bad("info appeal scope must be a letter or null");
    auto p = ProposalId::from_label(s.get<std::string>());
    if (!p || s.get<std::string>() != p->name()) throw bad("info appeal scope must be A, B or C");
    c.info_appeals.emplace_back(*p);
  }
  if (!j.contains("motivational_appeal") || !j["motivational_appeal"].is_boolean())
    throw bad("motivational_appeal must be a boolean");
  c.motivational_appeal = j["motivational_appeal"].get<bool>();
  if (j.contains("preference_query")) {
    if (!j["preference_query"].is_boolean()) throw bad("preference_query must be a boolean");
    c.preference_query = j["preference_query"].get<bool>();
  }
  c.normalize();
  return c;
}

Classification classify_llm(std::string_view message, const Scenario& scenario, ChatBackend& backend,
                            int max_retries) {
  if (message.find_first_not_of(" \t\r\n") == std::string_view::npos) return generic_classification();
  auto prompt = build_classifier_prompt(message, scenario);
  std::string last_error;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    std::string reply = backend.complete(prompt, classification_schema());
    try {
      return parse_llm_classification(reply);
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::kSchema, "classifier reply invalid after " + std::to_string(max_retries + 1) +
                                      " attempts: " + last_error);
}

Classification classify_llm(std::string_view message, const Scenario& scenario, const LlmClientConfig& client) {
  HttpChatBackend backend(client);
  return classify_llm(message, scenario, backend, client.max_retries);
}

std::vector<ChatMessage> build_persuader_prompt(const AgentView& view) {
  const Scenario& s = *view.scenario;
  std::ostringstream sys;
  sys << "You are playing a persuasion game through a chat window. " << s.cover_story << "\n\n"
      << "There are three proposals, A, B and C. You know exactly how each proposal affects each attribute:\n"
      << effect_table(view.matrix, s) << "\n"
      << "You want the other player to choose proposal " << view.persuader_goal.name() << ".";
  if (view.persuader_valence) sys << " Your own values: " << render_valence(*view.persuader_valence, s);
  sys << "\nThe other player values the attributes in their own way and may not know every effect above. "
         "They will choose the proposal that looks best to them given what they know and what they like. "
         "Write short chat messages (a few sentences at most).";
  if (view.condition == Condition::kRevealed) {
    sys << "\n\nWhat the other player knows:\n";
    if (view.target_valence) {
      std::string v = render_valence(*view.target_valence, s);
      // Render in third person.
      std::string out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v.compare(i, 2, "I ") == 0 && (i == 0 || v[i - 1] == ' ')) {
          out += "They ";
          ++i;
        } else {
          out += v[i];
        }
      }
      for (std::size_t pos = 0; (pos = out.find("They am ", pos)) != std::string::npos;) out.replace(pos, 8, "They are ");
      sys << "- Values: " << out << "\n";
    }
    if (view.target_known) sys << "- Known effects: " << render_facts(*view.target_known, s) << "\n";
  }
  sys << "\nYou have " << view.turns_remaining << " message(s) left.";

  std::vector<ChatMessage> msgs{ChatMessage{"system", sys.str()}};
  for (const auto& e : view.history)
    msgs.push_back(ChatMessage{e.role == Role::kPersuader ? "assistant" : "user", e.text});
  if (view.history.empty()) msgs.push_back(ChatMessage{"user", "(The other player has joined. Send your first message.)"});
  return msgs;
}

std::string cap_message(std::string text, int limit) {
  if (limit <= 0 || static_cast<int>(text.size()) <= limit) return text;
  auto cut = text.rfind(' ', static_cast<std::size_t>(limit));
  if (cut == std::string::npos || cut == 0) cut = static_cast<std::size_t>(limit);
  text.resize(cut);
  return text;
}

}  // namespace mindgames
