#include "mindgames/forge.hpp"

#include <algorithm>
#include <numeric>

#include "mindgames/random.hpp"

namespace mindgames {
namespace {

Utilities utilities_with_known(const GameInstance& g, CellMask known) {
  return utility_vector(g.matrix, g.target_valence, KnownnessMask(known));
}

// Subsets of `mask`, in ascending order of the compressed subset index.
std::vector<CellMask> subsets_of(CellMask mask) {
  auto cells = mask.cells();
  std::vector<CellMask> out;
  const int n = static_cast<int>(cells.size());
  for (int bits = 0; bits < (1 << n); ++bits) {
    CellMask s;
    for (int i = 0; i < n; ++i)
      if (bits & (1 << i)) s.insert(cells[i]);
    out.push_back(s);
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

CellMask random_subset(Rng& rng, CellMask from, int k) {
  auto cells = from.cells();
  // Partial Fisher-Yates.
  for (int i = 0; i < k; ++i) {
    int j = i + rng.index(static_cast<int>(cells.size()) - i);
    std::swap(cells[i], cells[j]);
  }
  CellMask out;
  for (int i = 0; i < k; ++i) out.insert(cells[i]);
  return out;
}

}  // namespace

Utilities target_utilities(const GameInstance& instance, CellMask revealed) {
  return utility_vector(instance.matrix, instance.target_valence,
                        knownness_from(instance.hidden, revealed));
}

ConstraintReport check_instance(const GameInstance& g) {
  ConstraintReport r;
  auto full = strict_argmax(utilities_with_known(g, CellMask::all()));
  r.full_info_choice = full && *full == g.p_full;
  auto init = strict_argmax(utilities_with_known(g, g.hidden.complement()));
  r.initial_choice = init && *init == g.p_init;
  auto with_witness = strict_argmax(utilities_with_known(g, g.hidden.complement() | g.witness));
  r.witness_choice = with_witness && *with_witness == g.persuader_goal;
  r.hidden_size = g.hidden.size() == 4;
  r.witness_in_hidden = g.witness.size() == 2 && g.witness.subset_of(g.hidden);
  r.distinct = g.p_init != g.p_full && g.p_init != g.persuader_goal && g.p_full != g.persuader_goal;
  if (g.persuader_valence) {
    auto pref = strict_argmax(utility_vector(g.matrix, *g.persuader_valence, KnownnessMask(CellMask::all())));
    r.persuader_prefers_goal = pref && *pref == g.persuader_goal;
  } else {
    r.persuader_prefers_goal = true;
  }
  return r;
}

std::vector<CellMask> winning_subsets(const GameInstance& instance) {
  std::vector<CellMask> out;
  for (CellMask s : subsets_of(instance.hidden)) {
    auto top = strict_argmax(utilities_with_known(instance, instance.hidden.complement() | s));
    if (top && *top == instance.persuader_goal) out.push_back(s);
  }
  return out;
}

bool is_canonical(const GameInstance& instance) {
  const std::vector<ProposalId> history{instance.p_init};
  for (CellMask s : subsets_of(instance.hidden)) {
    ProposalId pick = choose(utilities_with_known(instance, instance.hidden.complement() | s), history);
    if ((pick == instance.persuader_goal) != (s == instance.witness)) return false;
  }
  return true;
}

PieceTaxonomy piece_taxonomy(const GameInstance& instance) {
  auto wins = winning_subsets(instance);
  if (wins.size() != 1 || wins.front() != instance.witness)
    throw Error(ErrorCode::kTaxonomyUndefined,
                "piece taxonomy needs exactly one winning subset (the witness); found " +
                    std::to_string(wins.size()));
  return PieceTaxonomy{instance.witness, instance.hidden.minus(instance.witness),
                       instance.hidden.complement()};
}

std::vector<GameInstance> generate(std::uint64_t seed, const Scenario& scenario, int count,
                                   const GenerateOptions& options) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "count must be >= 1");
  Rng rng(mix_seed(seed, fnv1a(scenario.id)));
  std::vector<GameInstance> out;
  out.reserve(static_cast<std::size_t>(count));

  std::array<int, 27> valence_order;
  std::iota(valence_order.begin(), valence_order.end(), 0);
  auto valence_of = [](int code) {
    ValenceVector v;
    for (int a = 0; a < kAttributes; ++a) {
      v[a] = valence_from_int(code % 3 - 1);
      code /= 3;
    }
    return v;
  };

  for (std::uint64_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    GameInstance g;
    g.scenario_id = scenario.id;
    for (int i = 0; i < kCells; ++i) g.matrix.set(Cell::from_flat(i), effect_from_int(rng.index(3) - 1));
    for (int a = 0; a < kAttributes; ++a) g.target_valence[a] = valence_from_int(rng.index(3) - 1);
    g.hidden = random_subset(rng, CellMask::all(), 4);
    g.witness = random_subset(rng, g.hidden, 2);

    auto full = strict_argmax(utilities_with_known(g, CellMask::all()));
    auto init = strict_argmax(utilities_with_known(g, g.hidden.complement()));
    auto goal = strict_argmax(utilities_with_known(g, g.hidden.complement() | g.witness));
    if (!full || !init || !goal) continue;
    if (*full == *init || *full == *goal || *init == *goal) continue;
    g.p_full = *full;
    g.p_init = *init;
    g.persuader_goal = *goal;

    if (options.with_persuader_valence) {
      for (int i = 26; i > 0; --i) std::swap(valence_order[i], valence_order[rng.index(i + 1)]);
      bool found = false;
      for (int code : valence_order) {
        auto v = valence_of(code);
        auto pref = strict_argmax(utility_vector(g.matrix, v, KnownnessMask(CellMask::all())));
        if (pref && *pref == g.persuader_goal) {
          g.persuader_valence = v;
          found = true;
          break;
        }
      }
      if (!found) continue;
    }
    if (options.canonical_only && !is_canonical(g)) continue;

    out.push_back(std::move(g));
    if (static_cast<int>(out.size()) == count) return out;
  }
  throw Error(ErrorCode::kSearchExhausted, "no valid instance within " + std::to_string(options.max_attempts) +
                                               " attempts (found " + std::to_string(out.size()) + ")");
}

}  // namespace mindgames
