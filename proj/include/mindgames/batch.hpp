#pragma once

// Drives agent-vs-bot games and whole batches of them.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mindgames/agents.hpp"
#include "mindgames/analytics.hpp"
#include "mindgames/session.hpp"

namespace mindgames {

// Plays one game to the end. Agent or classifier failures (LLM transport,
// schema, budget) end the game as incomplete with the reason recorded.
Transcript run_game(const SessionConfig& config, PersuaderAgent& agent, Classifier classifier = {});

struct BatchConfig {
  std::vector<std::string> scenarios;  // empty means all five
  std::uint64_t instance_seed = 0;
  int games_per_condition = 200;
  // Distinct instances generated per scenario; games cycle through them.
  int instances_per_scenario = 40;
  bool canonical_only = false;
  PersuaderKind persuader = PersuaderKind::kOptimal;
  TargetKind target = TargetKind::kBot;
  ClassifierKind classifier = ClassifierKind::kStructured;
  std::vector<Condition> conditions = {Condition::kHidden, Condition::kRevealed};
  std::uint64_t seed = 0;
  int random_draws = 6;
  int max_persuader_turns = 10;
  int workers = 1;
  // LLM persuader and classifier. Built from the environment when unset.
  std::shared_ptr<ChatBackend> llm;
  // Written when non-empty.
  std::string transcripts_path;
  std::string metrics_path;
};

struct BatchResult {
  std::vector<Transcript> transcripts;
  std::vector<MetricsRow> metrics;
};

// Deterministic for scripted and random agents: game g of condition c uses
// seed mix_seed(seed, c * games + g) whatever the worker count.
// Throws kInvalidArgument for zero games or a human target.
BatchResult run_batch(const BatchConfig& config);

}  // namespace mindgames
