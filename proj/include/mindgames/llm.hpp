#pragma once

// Chat-completions client plus the LLM-backed classifier and persuader
// prompt builders.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mindgames/classification.hpp"
#include "mindgames/dialogue.hpp"
#include "mindgames/scenario.hpp"

namespace mindgames {

struct LlmClientConfig {
  // Base URL; requests go to <endpoint>/chat/completions.
  std::string endpoint = "https://api.openai.com/v1";
  std::string model = "o3";
  // Name of the environment variable holding the API key. The key itself is
  // read at request time and never stored.
  std::string credential_env = "OPENAI_API_KEY";
  double timeout_seconds = 120.0;
  int max_retries = 2;
};

// Reads MINDGAMES_LLM_ENDPOINT, MINDGAMES_LLM_MODEL and
// MINDGAMES_LLM_CREDENTIAL_ENV over the defaults.
LlmClientConfig llm_config_from_env();

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  // Returns the assistant message content. Throws kTransport or kTimeout.
  virtual std::string complete(const std::vector<ChatMessage>& messages,
                               const std::optional<nlohmann::json>& json_schema) = 0;
};

class HttpChatBackend : public ChatBackend {
 public:
  using LogSink = std::function<void(const std::string&)>;
  explicit HttpChatBackend(LlmClientConfig config, LogSink log = {});
  std::string complete(const std::vector<ChatMessage>& messages,
                       const std::optional<nlohmann::json>& json_schema) override;
  const LlmClientConfig& config() const { return config_; }

 private:
  LlmClientConfig config_;
  LogSink log_;
};

// Replaces every occurrence of `secret` with "[REDACTED]".
std::string redact(std::string text, const std::string& secret);

// Prompt and schema used by classify_llm.
std::vector<ChatMessage> build_classifier_prompt(std::string_view message, const Scenario& scenario);
const nlohmann::json& classification_schema();
// Validates a model reply into a Classification; throws kSchema.
Classification parse_llm_classification(std::string_view content);

// Empty messages are generic without a request. Schema-invalid replies are
// retried up to `max_retries` times, then kSchema is thrown.
Classification classify_llm(std::string_view message, const Scenario& scenario, ChatBackend& backend,
                            int max_retries);
Classification classify_llm(std::string_view message, const Scenario& scenario, const LlmClientConfig& client);

// System prompt plus the conversation so far. Hidden views carry no target
// mental-state text.
std::vector<ChatMessage> build_persuader_prompt(const AgentView& view);

// Truncates at a word boundary to at most `limit` characters.
std::string cap_message(std::string text, int limit);

}  // namespace mindgames
