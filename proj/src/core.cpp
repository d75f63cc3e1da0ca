#include "mindgames/core.hpp"

#include <algorithm>
#include <bit>

namespace mindgames {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kInvalidInstance: return "invalid_instance";
    case ErrorCode::kSearchExhausted: return "search_exhausted";
    case ErrorCode::kTaxonomyUndefined: return "taxonomy_undefined";
    case ErrorCode::kOrdering: return "out_of_turn";
    case ErrorCode::kBudgetExhausted: return "budget_exhausted";
    case ErrorCode::kSessionEnded: return "session_ended";
    case ErrorCode::kSessionOpen: return "session_open";
    case ErrorCode::kAlreadyChosen: return "already_chosen";
    case ErrorCode::kUnknownRole: return "unknown_role";
    case ErrorCode::kTransport: return "transport_error";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kSchema: return "schema_error";
    case ErrorCode::kNoWinningSubset: return "no_winning_subset";
    case ErrorCode::kPoolExhausted: return "pool_exhausted";
    case ErrorCode::kMissingClassification: return "missing_classification";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

Effect effect_from_int(int v) {
  if (v < -1 || v > 1) throw Error(ErrorCode::kInvalidArgument, "effect out of range: " + std::to_string(v));
  return static_cast<Effect>(v);
}

Valence valence_from_int(int v) {
  if (v < -1 || v > 1) throw Error(ErrorCode::kInvalidArgument, "valence out of range: " + std::to_string(v));
  return static_cast<Valence>(v);
}

std::optional<ProposalId> ProposalId::from_label(char label) {
  if (label >= 'A' && label <= 'C') return ProposalId(label - 'A');
  if (label >= 'a' && label <= 'c') return ProposalId(label - 'a');
  return std::nullopt;
}

std::optional<ProposalId> ProposalId::from_label(std::string_view label) {
  if (label.size() != 1) return std::nullopt;
  return from_label(label.front());
}

CellMask CellMask::of(std::initializer_list<Cell> cells) {
  CellMask m;
  for (Cell c : cells) m.insert(c);
  return m;
}

int CellMask::size() const { return std::popcount(bits_); }

std::vector<Cell> CellMask::cells() const {
  std::vector<Cell> out;
  for (int i = 0; i < kCells; ++i)
    if (contains_flat(i)) out.push_back(Cell::from_flat(i));
  return out;
}

KnownnessMask knownness_from(CellMask hidden, CellMask revealed) {
  if (!revealed.subset_of(hidden))
    throw Error(ErrorCode::kInvalidArgument, "revealed cells must be a subset of hidden cells");
  return KnownnessMask(hidden.complement() | revealed);
}

Utilities utility_vector(const PayoffMatrix& matrix, const ValenceVector& valence,
                         const KnownnessMask& known) {
  Utilities u{};
  for (int p = 0; p < kProposals; ++p) {
    for (int a = 0; a < kAttributes; ++a) {
      Cell c{ProposalId(p), AttributeId(a)};
      if (known.known(c)) u[p] += value_of(valence[a]) * value_of(matrix.at(c));
    }
  }
  return u;
}

std::vector<ProposalId> argmax_set(const Utilities& utilities) {
  int best = *std::max_element(utilities.begin(), utilities.end());
  std::vector<ProposalId> out;
  for (int p = 0; p < kProposals; ++p)
    if (utilities[p] == best) out.emplace_back(p);
  return out;
}

std::optional<ProposalId> strict_argmax(const Utilities& utilities) {
  auto top = argmax_set(utilities);
  if (top.size() != 1) return std::nullopt;
  return top.front();
}

ProposalId choose(const Utilities& utilities, std::span<const ProposalId> history) {
  auto top = argmax_set(utilities);
  auto in_top = [&](ProposalId p) { return std::find(top.begin(), top.end(), p) != top.end(); };
  if (!history.empty() && in_top(history.back())) return history.back();
  for (ProposalId p : history)
    if (in_top(p)) return p;
  return top.front();
}

std::string effect_verb_phrase(Effect e) {
  switch (e) {
    case Effect::kIncrease: return "increase";
    case Effect::kDecrease: return "decrease";
    case Effect::kNone: return "have no effect on";
  }
  return "";
}

std::string signed_effect(Effect e) {
  switch (e) {
    case Effect::kIncrease: return "+1";
    case Effect::kDecrease: return "-1";
    case Effect::kNone: return "0";
  }
  return "";
}

}  // namespace mindgames
