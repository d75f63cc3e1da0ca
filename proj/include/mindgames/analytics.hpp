#pragma once

// Derived quantities over games and transcripts: the random-disclosure
// baseline, success metrics, rational replay, move counts, bootstrap
// intervals, survey-based valence inference, exclusions and game selection.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mindgames/codec.hpp"
#include "mindgames/session.hpp"

namespace mindgames {

// Chance line for plots: the refined baseline and the earlier 10% line.
inline constexpr double kChanceBaseline = 0.075;
inline constexpr double kLegacyChanceBaseline = 0.10;

// Win probability of a persuader revealing n uniformly drawn cells (with
// replacement) out of 2 critical, 2 poison and 5 inert:
//   (7/9)^n * (1 - 2 (6/7)^n + (5/7)^n)
double p_win_closed(int n);
// Independent dynamic program over (critical cells seen, poison seen).
double p_win_oracle(int n);
// n in [n_min, n_max] maximising p_win_closed; smallest n on ties.
int p_win_argmax(int n_min, int n_max);

struct ReplayResult {
  ProposalId choice;
  bool success = false;
  // Two or more proposals share the top utility in the replayed final state.
  bool tie = false;
};

// Feeds the persuader's disclosures, message by message, to a fresh bot.
// Uses the survey-inferred valence when the config has one, unless
// `valence_override` is given. Throws kMissingClassification.
ReplayResult rational_replay(const Transcript& transcript,
                             std::optional<ValenceVector> valence_override = std::nullopt);

struct MoveCounts {
  int persuader_disclosures = 0;
  int informational_appeals = 0;
  int motivational_appeals = 0;
  // Claims in human-target messages; bot replies are not counted.
  int target_disclosures = 0;
  friend bool operator==(const MoveCounts&, const MoveCounts&) = default;
};

MoveCounts count_moves(const Transcript& transcript);

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Percentile bootstrap of the mean; deterministic for a seed.
Interval bootstrap_ci(std::span<const double> values, int iterations, double level, std::uint64_t seed);

enum class LikertResponse { kIncreasedALot, kIncreased, kStayedTheSame, kDecreased, kDecreasedALot };
// Accepts the five survey labels ("Increased a lot" ... "Decreased a lot").
LikertResponse parse_likert(std::string_view label);
std::string_view to_string(LikertResponse r);
Valence likert_to_valence(LikertResponse r);
ValenceVector infer_valence(const std::array<LikertResponse, kAttributes>& answers);

enum class ExclusionMode { kAssigned, kInferred };

struct ExclusionResult {
  std::vector<std::size_t> kept;                                 // indices into the input
  std::vector<std::pair<std::size_t, std::string>> excluded;     // index, reason
};

// Human-target games are kept iff the pre-choice is the strict optimum over
// the initially visible cells under the assigned (or inferred) valence. Bot
// games are always kept.
ExclusionResult exclusion_filter(std::span<const Transcript> transcripts, ExclusionMode mode);

enum class UtilityCategory { kAgree, kEqual, kReplayBetter, kTargetBetter };
std::string_view to_string(UtilityCategory c);  // "R=T", "U(T)=U(R)", "U(R)>U(T)", "U(T)>U(R)"
UtilityCategory utility_category(const Transcript& transcript);

// First instance whose matrix is unseen and whose target valence matches;
// else the first unseen instance. Returns an index into `pool`.
std::size_t select_game(std::span<const GameInstance> pool, std::span<const PayoffMatrix> seen,
                        const std::optional<ValenceVector>& target_valence);

struct AnalyzeOptions {
  // Any of: persuader, condition, mode, scenario, tie.
  std::vector<std::string> group_by = {"persuader", "condition", "mode"};
  int bootstrap_iterations = 10'000;
  double level = 0.95;
  std::uint64_t seed = 0;
  // Drop human-target games failing the exclusion filter.
  std::optional<ExclusionMode> exclusion;
};

struct MetricsRow {
  std::vector<std::pair<std::string, std::string>> key;
  int games = 0;
  int participants = 0;
  int incomplete = 0;
  double persuasion_success = 0;  // mean of per-participant means
  Interval persuasion_ci;
  double persuasion_success_by_game = 0;
  double rational_bot_success = 0;
  Interval rational_ci;
  double mean_persuader_disclosures = 0;
  double mean_informational_appeals = 0;
  double mean_motivational_appeals = 0;
  double mean_target_disclosures = 0;
};

// Grouped success metrics. Incomplete games are counted but not scored.
// Empty groups produce no row.
std::vector<MetricsRow> persuasion_success(std::span<const Transcript> transcripts, const AnalyzeOptions& options);

// Experiment mode of a game: "bot", "assigned" or "inferred".
std::string experiment_mode(const SessionConfig& config);

std::string metrics_csv(const std::vector<MetricsRow>& rows, const std::vector<std::string>& group_by);
Json metrics_json(const std::vector<MetricsRow>& rows);
// Long-format tables for plotting.
std::string success_tidy_csv(const std::vector<MetricsRow>& rows, const std::vector<std::string>& group_by);
std::string moves_tidy_csv(const std::vector<MetricsRow>& rows, const std::vector<std::string>& group_by);

}  // namespace mindgames
