#pragma once

// Domain types and the integer utility/choice arithmetic shared by every
// other part of the library.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mindgames {

inline constexpr int kProposals = 3;
inline constexpr int kAttributes = 3;
inline constexpr int kCells = kProposals * kAttributes;

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kInvalidInstance,
  kSearchExhausted,
  kTaxonomyUndefined,
  kOrdering,
  kBudgetExhausted,
  kSessionEnded,
  kSessionOpen,
  kAlreadyChosen,
  kUnknownRole,
  kTransport,
  kTimeout,
  kSchema,
  kNoWinningSubset,
  kPoolExhausted,
  kMissingClassification,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Effect of a proposal on an attribute.
enum class Effect : std::int8_t { kDecrease = -1, kNone = 0, kIncrease = 1 };
// Target's (or persuader's) attitude to an attribute.
enum class Valence : std::int8_t { kDislike = -1, kIndifferent = 0, kLike = 1 };

constexpr int value_of(Effect e) { return static_cast<int>(e); }
constexpr int value_of(Valence v) { return static_cast<int>(v); }
Effect effect_from_int(int v);
Valence valence_from_int(int v);

class ProposalId {
 public:
  constexpr ProposalId() = default;
  constexpr explicit ProposalId(int index) : index_(index) {
    if (index < 0 || index >= kProposals) throw std::out_of_range("proposal index");
  }
  static std::optional<ProposalId> from_label(char label);
  static std::optional<ProposalId> from_label(std::string_view label);

  constexpr int index() const { return index_; }
  constexpr char label() const { return static_cast<char>('A' + index_); }
  std::string name() const { return std::string(1, label()); }

  friend constexpr bool operator==(ProposalId, ProposalId) = default;
  friend constexpr auto operator<=>(ProposalId, ProposalId) = default;

 private:
  int index_ = 0;
};

class AttributeId {
 public:
  constexpr AttributeId() = default;
  constexpr explicit AttributeId(int index) : index_(index) {
    if (index < 0 || index >= kAttributes) throw std::out_of_range("attribute index");
  }
  constexpr int index() const { return index_; }

  friend constexpr bool operator==(AttributeId, AttributeId) = default;
  friend constexpr auto operator<=>(AttributeId, AttributeId) = default;

 private:
  int index_ = 0;
};

struct Cell {
  ProposalId proposal;
  AttributeId attribute;

  constexpr int flat() const { return proposal.index() * kAttributes + attribute.index(); }
  static constexpr Cell from_flat(int flat) {
    return Cell{ProposalId(flat / kAttributes), AttributeId(flat % kAttributes)};
  }
  friend constexpr bool operator==(Cell, Cell) = default;
};

// A set of (proposal, attribute) cells, stored as a 9-bit mask.
class CellMask {
 public:
  constexpr CellMask() = default;
  static constexpr CellMask from_bits(std::uint16_t bits) {
    CellMask m;
    m.bits_ = bits & kAll;
    return m;
  }
  static CellMask of(std::initializer_list<Cell> cells);
  static constexpr CellMask all() { return from_bits(kAll); }

  constexpr std::uint16_t bits() const { return bits_; }
  constexpr bool contains(Cell c) const { return (bits_ >> c.flat()) & 1u; }
  constexpr bool contains_flat(int flat) const { return (bits_ >> flat) & 1u; }
  constexpr void insert(Cell c) { bits_ |= static_cast<std::uint16_t>(1u << c.flat()); }
  constexpr void erase(Cell c) { bits_ &= static_cast<std::uint16_t>(~(1u << c.flat())); }
  int size() const;
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool subset_of(CellMask other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr CellMask complement() const { return from_bits(static_cast<std::uint16_t>(~bits_)); }
  constexpr CellMask operator|(CellMask o) const { return from_bits(bits_ | o.bits_); }
  constexpr CellMask operator&(CellMask o) const { return from_bits(bits_ & o.bits_); }
  constexpr CellMask minus(CellMask o) const { return from_bits(bits_ & ~o.bits_); }
  // Cells in row-major order.
  std::vector<Cell> cells() const;

  friend constexpr bool operator==(CellMask, CellMask) = default;

 private:
  static constexpr std::uint16_t kAll = (1u << kCells) - 1u;
  std::uint16_t bits_ = 0;
};

class PayoffMatrix {
 public:
  PayoffMatrix() { effects_.fill(Effect::kNone); }
  Effect at(ProposalId p, AttributeId a) const { return effects_[Cell{p, a}.flat()]; }
  Effect at(Cell c) const { return effects_[c.flat()]; }
  void set(Cell c, Effect e) { effects_[c.flat()] = e; }
  const std::array<Effect, kCells>& row_major() const { return effects_; }

  friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;

 private:
  std::array<Effect, kCells> effects_;
};

using ValenceVector = std::array<Valence, kAttributes>;
using Utilities = std::array<int, kProposals>;

// known(p, a) = 1 exactly when the cell is visible to the holder.
class KnownnessMask {
 public:
  constexpr KnownnessMask() = default;
  constexpr explicit KnownnessMask(CellMask known) : known_(known) {}
  constexpr bool known(Cell c) const { return known_.contains(c); }
  constexpr CellMask cells() const { return known_; }
  int count() const { return known_.size(); }

  friend constexpr bool operator==(KnownnessMask, KnownnessMask) = default;

 private:
  CellMask known_;
};

struct GameInstance {
  std::string scenario_id;
  PayoffMatrix matrix;
  ValenceVector target_valence{};
  std::optional<ValenceVector> persuader_valence;
  ProposalId persuader_goal;
  CellMask hidden;
  CellMask witness;
  ProposalId p_init;
  ProposalId p_full;

  friend bool operator==(const GameInstance&, const GameInstance&) = default;
};

// Known = not hidden, or hidden and revealed. Throws kInvalidArgument when
// revealed is not a subset of hidden.
KnownnessMask knownness_from(CellMask hidden, CellMask revealed);

// U_p = sum_a valence(a) * effect(p, a) * known(p, a).
Utilities utility_vector(const PayoffMatrix& matrix, const ValenceVector& valence,
                         const KnownnessMask& known);

// Proposals attaining the maximum utility, in index order.
std::vector<ProposalId> argmax_set(const Utilities& utilities);
// The strict (unique) maximiser, if any.
std::optional<ProposalId> strict_argmax(const Utilities& utilities);

// Argmax with sticky tie-breaking: most recent history entry if it still
// ties for the top, else the earliest history entry that does, else the
// lowest-index maximiser.
ProposalId choose(const Utilities& utilities, std::span<const ProposalId> history);

std::string effect_verb_phrase(Effect e);  // "increase" / "decrease" / "have no effect on"
std::string signed_effect(Effect e);       // "+1" / "0" / "-1"

}  // namespace mindgames
