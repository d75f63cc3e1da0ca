#pragma once

// Vocabulary shared by sessions, agents and analytics: roles, conditions,
// message events and the per-role views.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mindgames/bot.hpp"
#include "mindgames/classification.hpp"
#include "mindgames/core.hpp"
#include "mindgames/scenario.hpp"

namespace mindgames {

enum class Condition { kHidden, kRevealed };
enum class Role { kPersuader, kTarget };
enum class PersuaderKind { kHuman, kOptimal, kRandom, kLlm };
enum class TargetKind { kBot, kHuman };
enum class ClassifierKind { kStructured, kRules, kLlm };

std::string_view to_string(Condition c);
std::string_view to_string(Role r);
std::string_view to_string(PersuaderKind k);
std::string_view to_string(TargetKind k);
std::string_view to_string(ClassifierKind k);

// Throw kInvalidArgument on unknown names.
Condition parse_condition(std::string_view s);
Role parse_role(std::string_view s);
PersuaderKind parse_persuader_kind(std::string_view s);
TargetKind parse_target_kind(std::string_view s);
ClassifierKind parse_classifier_kind(std::string_view s);

struct MessageEvent {
  int turn = 0;
  Role role = Role::kPersuader;
  std::string text;
  // Persuader and human-target messages.
  std::optional<Classification> classification;
  // Bot messages.
  std::optional<ResponsePlan> plan;

  friend bool operator==(const MessageEvent&, const MessageEvent&) = default;
};

// What the persuader sees. In Hidden the target fields stay empty.
struct AgentView {
  const Scenario* scenario = nullptr;
  PayoffMatrix matrix;
  ProposalId persuader_goal;
  std::optional<ValenceVector> persuader_valence;
  Condition condition = Condition::kHidden;
  std::optional<ValenceVector> target_valence;
  std::optional<std::vector<Fact>> target_known;
  std::vector<MessageEvent> history;
  int turns_remaining = 0;
};

// What the target sees: visible cells, own valence, instructions. Never the
// persuader's goal.
struct TargetView {
  const Scenario* scenario = nullptr;
  std::vector<Fact> known;
  ValenceVector valence{};
  std::string instructions;
  std::vector<MessageEvent> history;
};

inline constexpr std::string_view kTargetInstructions =
    "Choose the proposal that is best given what you like and what you know. "
    "You should listen to the other player to help make your choice.";

}  // namespace mindgames
