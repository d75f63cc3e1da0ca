#include "mindgames/agents.hpp"

#include <algorithm>
#include <bit>

#include "mindgames/random.hpp"

namespace mindgames {

std::vector<int> persuader_random(std::uint64_t seed, int draws) {
  if (draws < 0) throw Error(ErrorCode::kInvalidArgument, "draws must be >= 0");
  Rng rng(seed);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(draws));
  for (int i = 0; i < draws; ++i) out.push_back(rng.index(kCells));
  return out;
}

std::string disclosure_message(const PayoffMatrix& matrix, Cell cell) {
  return "DISCLOSE " + cell.proposal.name() + " " + std::to_string(cell.attribute.index()) + " " +
         signed_effect(matrix.at(cell));
}

std::optional<CellMask> minimal_winning_disclosure(const PayoffMatrix& matrix, const ValenceVector& valence,
                                                   const std::vector<Fact>& target_known, ProposalId goal) {
  Utilities base{};
  CellMask known;
  for (const auto& f : target_known) {
    Cell c{f.proposal, f.attribute};
    if (known.contains(c)) continue;
    known.insert(c);
    base[f.proposal.index()] += value_of(valence[f.attribute.index()]) * value_of(f.effect);
  }
  auto candidates = known.complement().cells();
  const int n = static_cast<int>(candidates.size());

  std::optional<CellMask> best;
  int best_size = kCells + 1;
  for (int bits = 0; bits < (1 << n); ++bits) {
    int size = std::popcount(static_cast<unsigned>(bits));
    if (size >= best_size) continue;
    Utilities u = base;
    CellMask chosen;
    for (int i = 0; i < n; ++i) {
      if (!(bits & (1 << i))) continue;
      Cell c = candidates[i];
      chosen.insert(c);
      u[c.proposal.index()] += value_of(valence[c.attribute.index()]) * value_of(matrix.at(c));
    }
    auto top = strict_argmax(u);
    if (top && *top == goal) {
      best = chosen;
      best_size = size;
    }
  }
  return best;
}

std::optional<std::string> OptimalPersuader::next_message(const AgentView& view) {
  std::optional<ValenceVector> valence = view.target_valence;
  std::optional<std::vector<Fact>> known = view.target_known;
  bool asked_values = false;
  bool asked_info = false;
  for (const auto& e : view.history) {
    if (e.role == Role::kPersuader && e.classification) {
      if (!e.classification->disclosures.empty()) return std::nullopt;
      asked_values = asked_values || e.classification->motivational_appeal;
      asked_info = asked_info || !e.classification->info_appeals.empty();
    }
    if (e.role == Role::kTarget && e.plan) {
      for (const auto& seg : e.plan->segments) {
        if (auto* v = std::get_if<plan::ValenceAnswer>(&seg)) valence = v->valence;
        if (auto* f = std::get_if<plan::FactAnswer>(&seg); f && !f->scope) known = f->facts;
      }
    }
  }

  if (!valence) {
    if (asked_values) throw Error(ErrorCode::kInvalidArgument, "optimal persuader needs a bot target's answers");
    return std::string("ASK-VALUES");
  }
  if (!known) {
    if (asked_info) throw Error(ErrorCode::kInvalidArgument, "optimal persuader needs a bot target's answers");
    return std::string("ASK-INFO");
  }
  auto set = minimal_winning_disclosure(view.matrix, *valence, *known, view.persuader_goal);
  if (!set) throw Error(ErrorCode::kNoWinningSubset, "no disclosure set makes the goal optimal");
  if (set->empty()) return std::nullopt;
  std::string msg;
  for (Cell c : set->cells()) {
    if (!msg.empty()) msg += '\n';
    msg += disclosure_message(view.matrix, c);
  }
  return msg;
}

std::optional<std::string> RandomPersuader::next_message(const AgentView& view) {
  if (sent_ || schedule_.empty()) return std::nullopt;
  sent_ = true;
  std::string msg;
  for (int flat : schedule_) {
    if (!msg.empty()) msg += '\n';
    msg += disclosure_message(view.matrix, Cell::from_flat(flat));
  }
  return msg;
}

std::optional<std::string> LlmPersuader::next_message(const AgentView& view) {
  if (view.turns_remaining <= 0) return std::nullopt;
  return cap_message(backend_->complete(build_persuader_prompt(view), std::nullopt), char_limit_);
}

}  // namespace mindgames
