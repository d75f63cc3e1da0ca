#pragma once

// Fixtures, generators and independent oracles shared by the test suites.

#include <vector>

#include "mindgames/core.hpp"
#include "mindgames/forge.hpp"
#include "mindgames/random.hpp"

namespace mgtest {

using namespace mindgames;

inline ProposalId P(char label) { return *ProposalId::from_label(label); }
inline Cell C(char label, int attribute) { return Cell{P(label), AttributeId(attribute)}; }

// The worked example: llm scenario (safety, speed, trust), target likes all
// three. Starts at (1, 1, 2); disclosing A-speed and C-safety gives (2, 1, 1);
// disclosing everything gives (2, 3, 1).
inline GameInstance worked_example() {
  GameInstance g;
  g.scenario_id = "llm";
  const int effects[3][3] = {{0, 1, 1}, {1, 1, 1}, {-1, 1, 1}};
  for (int p = 0; p < 3; ++p)
    for (int a = 0; a < 3; ++a) g.matrix.set(Cell{ProposalId(p), AttributeId(a)}, effect_from_int(effects[p][a]));
  g.target_valence = {Valence::kLike, Valence::kLike, Valence::kLike};
  g.hidden = CellMask::of({C('A', 1), C('B', 1), C('B', 2), C('C', 0)});
  g.witness = CellMask::of({C('A', 1), C('C', 0)});
  g.p_init = P('C');
  g.persuader_goal = P('A');
  g.p_full = P('B');
  return g;
}

inline PayoffMatrix random_matrix(Rng& rng) {
  PayoffMatrix m;
  for (int i = 0; i < kCells; ++i) m.set(Cell::from_flat(i), effect_from_int(rng.index(3) - 1));
  return m;
}

inline ValenceVector random_valence(Rng& rng) {
  ValenceVector v;
  for (auto& x : v) x = valence_from_int(rng.index(3) - 1);
  return v;
}

inline CellMask random_mask(Rng& rng) { return CellMask::from_bits(static_cast<std::uint16_t>(rng.below(512))); }

// Cell-by-cell utility sum, written without the library's utility code.
inline Utilities oracle_utilities(const PayoffMatrix& m, const ValenceVector& v, CellMask known) {
  Utilities u{0, 0, 0};
  for (int p = 0; p < kProposals; ++p)
    for (int a = 0; a < kAttributes; ++a) {
      const int flat = p * kAttributes + a;
      if (!((known.bits() >> flat) & 1u)) continue;
      u[p] += static_cast<int>(v[a]) * static_cast<int>(m.row_major()[flat]);
    }
  return u;
}

// Strict maximiser by direct comparison, or -1 on a tie for the top.
inline int oracle_strict_argmax(const Utilities& u) {
  for (int p = 0; p < kProposals; ++p) {
    bool best = true;
    for (int q = 0; q < kProposals; ++q)
      if (q != p && u[q] >= u[p]) best = false;
    if (best) return p;
  }
  return -1;
}

// A small deterministic corpus of generated instances, one scenario each.
inline const std::vector<GameInstance>& corpus() {
  static const std::vector<GameInstance> instances = [] {
    std::vector<GameInstance> out;
    for (const auto& s : scenarios()) {
      auto batch = generate(11, s, 8);
      out.insert(out.end(), batch.begin(), batch.end());
    }
    return out;
  }();
  return instances;
}

inline const std::vector<GameInstance>& canonical_corpus() {
  static const std::vector<GameInstance> instances = [] {
    GenerateOptions o;
    o.canonical_only = true;
    std::vector<GameInstance> out;
    for (const auto& s : scenarios()) {
      auto batch = generate(12, s, 4, o);
      out.insert(out.end(), batch.begin(), batch.end());
    }
    return out;
  }();
  return instances;
}

}  // namespace mgtest
