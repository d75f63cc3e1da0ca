#pragma once

// Persuader agents: scripted optimal play, the random-disclosure baseline,
// and an LLM-backed agent.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mindgames/dialogue.hpp"
#include "mindgames/llm.hpp"

namespace mindgames {

// Uniform i.i.d. draws over the 9 cells (flat index), with replacement.
std::vector<int> persuader_random(std::uint64_t seed, int draws);

// "DISCLOSE <p> <a> <effect>" carrying the ground-truth effect of the cell.
std::string disclosure_message(const PayoffMatrix& matrix, Cell cell);

// Smallest set of cells outside `target_known` whose disclosure (with true
// effects) makes `goal` the strict optimum for `valence`; ties between sets
// of equal size go to the lowest bit pattern.
std::optional<CellMask> minimal_winning_disclosure(const PayoffMatrix& matrix, const ValenceVector& valence,
                                                   const std::vector<Fact>& target_known, ProposalId goal);

class PersuaderAgent {
 public:
  virtual ~PersuaderAgent() = default;
  // Next message, or nullopt when the agent has nothing more to say.
  virtual std::optional<std::string> next_message(const AgentView& view) = 0;
};

// Revealed: discloses a minimal winning set in one message. Hidden: asks for
// values, then for knowledge, then discloses. Requires a bot target (reads
// the bot's structured replies). Throws kNoWinningSubset.
class OptimalPersuader : public PersuaderAgent {
 public:
  std::optional<std::string> next_message(const AgentView& view) override;
};

// Sends all scheduled draws (repeats included) as one multi-claim message,
// so the bot weighs the disclosed set at once.
class RandomPersuader : public PersuaderAgent {
 public:
  RandomPersuader(std::uint64_t seed, int draws) : schedule_(persuader_random(seed, draws)) {}
  const std::vector<int>& schedule() const { return schedule_; }
  std::optional<std::string> next_message(const AgentView& view) override;

 private:
  std::vector<int> schedule_;
  bool sent_ = false;
};

class LlmPersuader : public PersuaderAgent {
 public:
  LlmPersuader(std::shared_ptr<ChatBackend> backend, int char_limit)
      : backend_(std::move(backend)), char_limit_(char_limit) {}
  std::optional<std::string> next_message(const AgentView& view) override;

 private:
  std::shared_ptr<ChatBackend> backend_;
  int char_limit_;
};

}  // namespace mindgames
