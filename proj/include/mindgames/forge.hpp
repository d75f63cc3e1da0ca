#pragma once

// Generation, validation and characterisation of game instances.

#include <cstdint>
#include <vector>

#include "mindgames/core.hpp"
#include "mindgames/scenario.hpp"

namespace mindgames {

struct ConstraintReport {
  bool full_info_choice = false;    // c1: strict argmax under full knowledge is p_full
  bool initial_choice = false;      // c2: strict argmax with hidden cells unknown is p_init
  bool witness_choice = false;      // c3: strict argmax after the witness is revealed is the goal
  bool hidden_size = false;         // c4: exactly four hidden cells
  bool witness_in_hidden = false;   // c5: two witness cells, both hidden
  bool distinct = false;            // p_init, p_full and the goal are pairwise distinct
  bool persuader_prefers_goal = false;  // goal is the persuader's strict optimum (true when no persuader valence)

  bool valid() const {
    return full_info_choice && initial_choice && witness_choice && hidden_size && witness_in_hidden &&
           distinct && persuader_prefers_goal;
  }
};

ConstraintReport check_instance(const GameInstance& candidate);

struct GenerateOptions {
  bool canonical_only = false;
  // Sample a persuader valence under which the goal is the strict optimum.
  // Off produces persuader-goal-only instances (survey-valence play).
  bool with_persuader_valence = true;
  std::uint64_t max_attempts = 50'000'000;
};

// Deterministic seeded rejection sampling. Throws kSearchExhausted when the
// attempt budget runs out before `count` instances are found.
std::vector<GameInstance> generate(std::uint64_t seed, const Scenario& scenario, int count,
                                   const GenerateOptions& options = {});

// Every subset S of the hidden cells whose disclosure makes the goal the
// strict optimum. Exhaustive over the 16 subsets; ascending bit order.
std::vector<CellMask> winning_subsets(const GameInstance& instance);

// Stricter than a single winning subset: a bot starting on p_init that
// learns any subset S of the hidden cells at once ends on the goal exactly
// when S is the witness, ties included. Random one-message disclosure then
// wins with the closed-form probability.
bool is_canonical(const GameInstance& instance);

struct PieceTaxonomy {
  CellMask critical;
  CellMask poison;
  CellMask inert;
};

// Throws kTaxonomyUndefined for instances with more than one winning subset.
PieceTaxonomy piece_taxonomy(const GameInstance& instance);

// Utilities of the target with `revealed` (a subset of hidden) disclosed.
Utilities target_utilities(const GameInstance& instance, CellMask revealed);

}  // namespace mindgames
