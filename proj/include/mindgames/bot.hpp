#pragma once

// The naively rational target: takes disclosures at face value, answers
// questions truthfully, never volunteers, and picks the utility argmax with
// sticky tie-breaking.

#include <string>
#include <variant>
#include <vector>

#include "mindgames/classification.hpp"
#include "mindgames/core.hpp"
#include "mindgames/scenario.hpp"

namespace mindgames {

struct Fact {
  ProposalId proposal;
  AttributeId attribute;
  Effect effect = Effect::kNone;
  friend bool operator==(const Fact&, const Fact&) = default;
};

class BotState {
 public:
  const std::array<std::optional<Effect>, kCells>& beliefs() const { return beliefs_; }
  std::optional<Effect> belief(Cell c) const { return beliefs_[c.flat()]; }
  CellMask known_cells() const;
  const ValenceVector& valence() const { return valence_; }
  const std::vector<ProposalId>& history() const { return history_; }
  ProposalId current_choice() const { return history_.back(); }
  // Utilities over believed-known cells.
  Utilities utilities() const;

  friend BotState bot_init(const GameInstance& instance, const ValenceVector& valence_override);
  friend BotState bot_ingest(BotState state, std::span<const Claim> claims);
  friend bool operator==(const BotState&, const BotState&) = default;

 private:
  std::array<std::optional<Effect>, kCells> beliefs_{};
  ValenceVector valence_{};
  std::vector<ProposalId> history_;
};

// Beliefs equal the ground truth off the hidden cells; choice is p_init.
// `valence_override` replaces the instance's target valence (survey-inferred
// replay).
BotState bot_init(const GameInstance& instance);
BotState bot_init(const GameInstance& instance, const ValenceVector& valence_override);

// Claims on unknown cells set the belief (first claim wins); claims on known
// cells are ignored. The choice is recomputed once after the whole batch.
BotState bot_ingest(BotState state, std::span<const Claim> claims);

std::vector<Fact> bot_answer_info(const BotState& state, std::optional<ProposalId> scope = std::nullopt);
ValenceVector bot_answer_valence(const BotState& state);
inline ProposalId bot_choice(const BotState& state) { return state.current_choice(); }

namespace plan {
struct Echo {
  std::vector<Fact> facts;
  friend bool operator==(const Echo&, const Echo&) = default;
};
struct FactAnswer {
  std::optional<ProposalId> scope;
  std::vector<Fact> facts;
  friend bool operator==(const FactAnswer&, const FactAnswer&) = default;
};
struct ValenceAnswer {
  ValenceVector valence{};
  friend bool operator==(const ValenceAnswer&, const ValenceAnswer&) = default;
};
struct PreferenceStatement {
  Utilities utilities{};
  ProposalId choice;
  friend bool operator==(const PreferenceStatement&, const PreferenceStatement&) = default;
};
struct Generic {
  friend bool operator==(const Generic&, const Generic&) = default;
};
}  // namespace plan

using ResponseSegment =
    std::variant<plan::Echo, plan::FactAnswer, plan::ValenceAnswer, plan::PreferenceStatement, plan::Generic>;

struct ResponsePlan {
  std::vector<ResponseSegment> segments;
  friend bool operator==(const ResponsePlan&, const ResponsePlan&) = default;
};

struct BotReply {
  BotState state;
  ResponsePlan plan;
};

BotReply bot_respond(BotState state, const Classification& classification);

// Response string table.
inline constexpr std::string_view kGenericResponse =
    "I am a perfectly rational agent. I will choose the best proposal given what I know. "
    "I will echo back information that is revealed to me, and I will answer questions about what I "
    "know or like.";
inline constexpr std::string_view kTieNote =
    "When I prefer the top proposals the same, I choose whichever of them I had preferred first.";

std::string render_response(const ResponsePlan& plan, const Scenario& scenario);
std::string render_facts(const std::vector<Fact>& facts, const Scenario& scenario);
std::string render_valence(const ValenceVector& valence, const Scenario& scenario);
std::string render_preference(const plan::PreferenceStatement& statement);

}  // namespace mindgames
