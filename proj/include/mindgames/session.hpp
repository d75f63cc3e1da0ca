#pragma once

// One game between a persuader and a target: turn-taking, classification,
// bot replies, pre/final choices and the transcript.

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mindgames/bot.hpp"
#include "mindgames/dialogue.hpp"

namespace mindgames {

struct SessionConfig {
  GameInstance instance;
  Condition condition = Condition::kHidden;
  PersuaderKind persuader_kind = PersuaderKind::kHuman;
  TargetKind target_kind = TargetKind::kBot;
  ClassifierKind classifier_kind = ClassifierKind::kStructured;
  int max_persuader_turns = 10;
  std::uint64_t seed = 0;
  // Disclosures drawn by the random persuader.
  int random_draws = 6;
  // Length cap for LLM persuader messages.
  int message_char_limit = 300;
  // Human-target sessions end after this many seconds without a final choice.
  std::optional<double> human_timeout_seconds;
  std::string persuader_id;
  std::string target_id;
  // Survey-inferred target valence (real-preference play).
  std::optional<ValenceVector> inferred_valence;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

enum class GameStatus { kComplete, kIncomplete };

struct Transcript {
  SessionConfig config;
  std::vector<MessageEvent> events;
  std::optional<ProposalId> pre_choice;
  std::optional<ProposalId> final_choice;
  bool success = false;
  GameStatus status = GameStatus::kComplete;
  std::string failure_reason;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

using Classifier = std::function<Classification(std::string_view text, const Scenario& scenario)>;

// Structured or rule classifier for the kind; kLlm needs an explicit
// classifier and throws kInvalidArgument here.
Classifier default_classifier(ClassifierKind kind);

class Session {
 public:
  using Clock = std::chrono::steady_clock;

  // Throws kInvalidInstance when the instance fails its constraint check and
  // kInvalidArgument for a bad config.
  explicit Session(SessionConfig config, Classifier classifier = {});

  const SessionConfig& config() const { return config_; }
  const Scenario& scenario() const { return *scenario_; }
  const std::vector<MessageEvent>& events() const { return events_; }
  const std::optional<BotState>& bot() const { return bot_; }
  bool ended() const { return ended_; }
  int persuader_turns_used() const { return persuader_turns_; }
  std::optional<ProposalId> pre_choice() const { return pre_choice_; }
  std::optional<ProposalId> final_choice() const { return final_choice_; }

  // True when `role` may post now.
  bool can_post(Role role) const;

  AgentView persuader_view() const;
  TargetView target_view() const;

  // Classifies and appends the message; with a bot target the rendered bot
  // reply is appended too. Returns the new events. A classifier failure
  // leaves the session unchanged.
  std::vector<MessageEvent> post(Role role, std::string text);

  // Human targets only, before any message.
  void set_pre_choice(ProposalId proposal);
  // Human targets only; ends the session.
  void set_final_choice(ProposalId proposal);
  // Ends the game now. Bot targets take the bot's choice; human targets
  // without a final choice end incomplete.
  void finish();
  // Ends the game as incomplete (agent failure, timeout).
  void fail(std::string reason);
  // Applies the human-target timeout; returns true if the session ended.
  bool expire_if_due(Clock::time_point now);

  // Throws kSessionOpen while the game is still running.
  Transcript transcript() const;

 private:
  void require_open() const;

  SessionConfig config_;
  const Scenario* scenario_;
  Classifier classifier_;
  std::optional<BotState> bot_;
  std::vector<MessageEvent> events_;
  std::optional<ProposalId> pre_choice_;
  std::optional<ProposalId> final_choice_;
  int persuader_turns_ = 0;
  bool ended_ = false;
  GameStatus status_ = GameStatus::kComplete;
  std::string failure_reason_;
  Clock::time_point started_;
};

}  // namespace mindgames
