#include "mindgames/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "mindgames/bot.hpp"
#include "mindgames/random.hpp"

namespace mindgames {

double p_win_closed(int n) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 0");
  const double dn = n;
  return std::pow(7.0 / 9.0, dn) * (1.0 - 2.0 * std::pow(6.0 / 7.0, dn) + std::pow(5.0 / 7.0, dn));
}

double p_win_oracle(int n) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 0");
  // prob[c] = P(c distinct critical cells seen, no poison cell seen).
  std::array<double, 3> prob{1.0, 0.0, 0.0};
  for (int step = 0; step < n; ++step) {
    std::array<double, 3> next{};
    for (int c = 0; c < 3; ++c) {
      const double fresh = (2.0 - c) / 9.0;
      const double repeat = c / 9.0;
      const double inert = 5.0 / 9.0;
      next[c] += prob[c] * (repeat + inert);
      if (c < 2) next[c + 1] += prob[c] * fresh;
      // A poison draw (2/9) leaves the winning region for good.
    }
    prob = next;
  }
  return prob[2];
}

int p_win_argmax(int n_min, int n_max) {
  int best = n_min;
  for (int n = n_min + 1; n <= n_max; ++n)
    if (p_win_closed(n) > p_win_closed(best)) best = n;
  return best;
}

ReplayResult rational_replay(const Transcript& t, std::optional<ValenceVector> valence_override) {
  ValenceVector valence = valence_override.value_or(t.config.inferred_valence.value_or(t.config.instance.target_valence));
  BotState bot = bot_init(t.config.instance, valence);
  for (const auto& e : t.events) {
    if (e.role != Role::kPersuader) continue;
    if (!e.classification)
      throw Error(ErrorCode::kMissingClassification, "persuader message at turn " + std::to_string(e.turn) +
                                                         " has no classification");
    if (!e.classification->disclosures.empty()) bot = bot_ingest(std::move(bot), e.classification->disclosures);
  }
  ReplayResult r;
  r.choice = bot_choice(bot);
  r.success = r.choice == t.config.instance.persuader_goal;
  r.tie = argmax_set(bot.utilities()).size() > 1;
  return r;
}

MoveCounts count_moves(const Transcript& t) {
  MoveCounts m;
  for (const auto& e : t.events) {
    if (!e.classification) continue;
    const auto& c = *e.classification;
    if (e.role == Role::kPersuader) {
      m.persuader_disclosures += static_cast<int>(c.disclosures.size());
      m.informational_appeals += static_cast<int>(c.info_appeals.size()) + (c.preference_query ? 1 : 0);
      m.motivational_appeals += c.motivational_appeal ? 1 : 0;
    } else if (t.config.target_kind == TargetKind::kHuman) {
      m.target_disclosures += static_cast<int>(c.disclosures.size());
    }
  }
  return m;
}

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.size() == 1) return v.front();
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

Interval bootstrap_ci(std::span<const double> values, int iterations, double level, std::uint64_t seed) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "bootstrap needs at least one value");
  if (iterations < 1) throw Error(ErrorCode::kInvalidArgument, "bootstrap iterations must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kInvalidArgument, "level must be in (0, 1)");
  Rng rng(seed);
  const auto n = values.size();
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(iterations));
  for (int b = 0; b < iterations; ++b) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += values[rng.below(n)];
    means.push_back(sum / static_cast<double>(n));
  }
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - level) / 2.0;
  return Interval{quantile_sorted(means, alpha), quantile_sorted(means, 1.0 - alpha)};
}

namespace {
constexpr std::array<std::pair<std::string_view, LikertResponse>, 5> kLikert{{
    {"Increased a lot", LikertResponse::kIncreasedALot},
    {"Increased", LikertResponse::kIncreased},
    {"Stayed the same", LikertResponse::kStayedTheSame},
    {"Decreased", LikertResponse::kDecreased},
    {"Decreased a lot", LikertResponse::kDecreasedALot},
}};
}  // namespace

LikertResponse parse_likert(std::string_view label) {
  for (const auto& [name, r] : kLikert)
    if (name == label) return r;
  throw Error(ErrorCode::kInvalidArgument, "unknown survey label: '" + std::string(label) + "'");
}

std::string_view to_string(LikertResponse r) {
  for (const auto& [name, v] : kLikert)
    if (v == r) return name;
  return "?";
}

Valence likert_to_valence(LikertResponse r) {
  switch (r) {
    case LikertResponse::kIncreasedALot:
    case LikertResponse::kIncreased: return Valence::kLike;
    case LikertResponse::kStayedTheSame: return Valence::kIndifferent;
    case LikertResponse::kDecreased:
    case LikertResponse::kDecreasedALot: return Valence::kDislike;
  }
  return Valence::kIndifferent;
}

ValenceVector infer_valence(const std::array<LikertResponse, kAttributes>& answers) {
  ValenceVector v;
  for (int a = 0; a < kAttributes; ++a) v[a] = likert_to_valence(answers[a]);
  return v;
}

ExclusionResult exclusion_filter(std::span<const Transcript> transcripts, ExclusionMode mode) {
  ExclusionResult out;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    const auto& t = transcripts[i];
    if (t.config.target_kind == TargetKind::kBot) {
      out.kept.push_back(i);
      continue;
    }
    if (!t.pre_choice) {
      out.excluded.emplace_back(i, "missing pre-choice");
      continue;
    }
    const auto& g = t.config.instance;
    ValenceVector v = g.target_valence;
    if (mode == ExclusionMode::kInferred && t.config.inferred_valence) v = *t.config.inferred_valence;
    auto best = strict_argmax(utility_vector(g.matrix, v, KnownnessMask(g.hidden.complement())));
    if (!best) {
      out.excluded.emplace_back(i, "no strict optimum over visible information");
    } else if (*best != *t.pre_choice) {
      out.excluded.emplace_back(i, "pre-choice " + t.pre_choice->name() + " is not the visible optimum " + best->name());
    } else {
      out.kept.push_back(i);
    }
  }
  return out;
}

std::string_view to_string(UtilityCategory c) {
  switch (c) {
    case UtilityCategory::kAgree: return "R=T";
    case UtilityCategory::kEqual: return "U(T)=U(R)";
    case UtilityCategory::kReplayBetter: return "U(R)>U(T)";
    case UtilityCategory::kTargetBetter: return "U(T)>U(R)";
  }
  return "?";
}

UtilityCategory utility_category(const Transcript& t) {
  if (!t.final_choice) throw Error(ErrorCode::kInvalidArgument, "transcript has no final choice");
  const auto replay = rational_replay(t);
  const ProposalId target = *t.final_choice;
  if (replay.choice == target) return UtilityCategory::kAgree;
  const auto& g = t.config.instance;
  ValenceVector v = t.config.inferred_valence.value_or(g.target_valence);
  auto full = utility_vector(g.matrix, v, KnownnessMask(CellMask::all()));
  const int ut = full[target.index()];
  const int ur = full[replay.choice.index()];
  if (ut == ur) return UtilityCategory::kEqual;
  return ur > ut ? UtilityCategory::kReplayBetter : UtilityCategory::kTargetBetter;
}

std::size_t select_game(std::span<const GameInstance> pool, std::span<const PayoffMatrix> seen,
                        const std::optional<ValenceVector>& target_valence) {
  if (pool.empty()) throw Error(ErrorCode::kInvalidArgument, "empty instance pool");
  auto unseen = [&](const GameInstance& g) { return std::find(seen.begin(), seen.end(), g.matrix) == seen.end(); };
  if (target_valence)
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (unseen(pool[i]) && pool[i].target_valence == *target_valence) return i;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (unseen(pool[i])) return i;
  throw Error(ErrorCode::kPoolExhausted, "every instance in the pool has been seen");
}

std::string experiment_mode(const SessionConfig& c) {
  if (c.target_kind == TargetKind::kBot) return "bot";
  if (c.inferred_valence || !c.instance.persuader_valence) return "inferred";
  return "assigned";
}

namespace {

struct GameRecord {
  std::size_t index;
  std::string unit;
  bool complete;
  bool success;
  bool rational_success;
  bool tie;
  MoveCounts moves;
};

std::string key_value(const Transcript& t, const GameRecord& r, const std::string& field) {
  if (field == "persuader") return std::string(to_string(t.config.persuader_kind));
  if (field == "condition") return std::string(to_string(t.config.condition));
  if (field == "mode") return experiment_mode(t.config);
  if (field == "scenario") return t.config.instance.scenario_id;
  if (field == "target") return std::string(to_string(t.config.target_kind));
  if (field == "tie") return r.tie ? "tie" : "no-tie";
  throw Error(ErrorCode::kInvalidArgument, "unknown group-by field: " + field);
}

// Mean over units of the per-unit mean of `value`.
template <typename F>
std::vector<double> unit_means(const std::vector<const GameRecord*>& games, F value) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto* g : games) {
    auto& [sum, n] = acc[g->unit];
    sum += value(*g);
    ++n;
  }
  std::vector<double> out;
  for (const auto& [unit, sn] : acc) out.push_back(sn.first / sn.second);
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << v;
  return s.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<MetricsRow> persuasion_success(std::span<const Transcript> transcripts, const AnalyzeOptions& options) {
  std::vector<bool> keep(transcripts.size(), true);
  if (options.exclusion) {
    auto ex = exclusion_filter(transcripts, *options.exclusion);
    for (const auto& [i, reason] : ex.excluded) keep[i] = false;
  }

  std::map<std::vector<std::string>, std::vector<GameRecord>> groups;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    if (!keep[i]) continue;
    const auto& t = transcripts[i];
    GameRecord r;
    r.index = i;
    if (t.config.persuader_kind == PersuaderKind::kHuman && !t.config.persuader_id.empty())
      r.unit = "p:" + t.config.persuader_id;
    else if (t.config.target_kind == TargetKind::kHuman && !t.config.target_id.empty())
      r.unit = "t:" + t.config.target_id;
    else
      r.unit = "g:" + std::to_string(i);
    r.complete = t.status == GameStatus::kComplete && t.final_choice.has_value();
    r.success = t.success;
    auto replay = rational_replay(t);
    r.rational_success = replay.success;
    r.tie = replay.tie;
    r.moves = count_moves(t);
    std::vector<std::string> key;
    for (const auto& f : options.group_by) key.push_back(key_value(t, r, f));
    groups[key].push_back(r);
  }

  std::vector<MetricsRow> rows;
  std::uint64_t group_index = 0;
  for (const auto& [key, records] : groups) {
    MetricsRow row;
    for (std::size_t k = 0; k < key.size(); ++k) row.key.emplace_back(options.group_by[k], key[k]);
    std::vector<const GameRecord*> scored;
    for (const auto& r : records) {
      if (r.complete) scored.push_back(&r);
      else ++row.incomplete;
    }
    ++group_index;
    if (scored.empty()) continue;
    row.games = static_cast<int>(scored.size());

    auto success_units = unit_means(scored, [](const GameRecord& g) { return g.success ? 1.0 : 0.0; });
    auto rational_units = unit_means(scored, [](const GameRecord& g) { return g.rational_success ? 1.0 : 0.0; });
    row.participants = static_cast<int>(success_units.size());
    row.persuasion_success = mean(success_units);
    row.rational_bot_success = mean(rational_units);
    const std::uint64_t seed = mix_seed(options.seed, group_index);
    row.persuasion_ci = bootstrap_ci(success_units, options.bootstrap_iterations, options.level, seed);
    row.rational_ci = bootstrap_ci(rational_units, options.bootstrap_iterations, options.level, mix_seed(seed, 1));

    double succ = 0, d = 0, ia = 0, ma = 0, td = 0;
    for (const auto* g : scored) {
      succ += g->success ? 1 : 0;
      d += g->moves.persuader_disclosures;
      ia += g->moves.informational_appeals;
      ma += g->moves.motivational_appeals;
      td += g->moves.target_disclosures;
    }
    const double n = row.games;
    row.persuasion_success_by_game = succ / n;
    row.mean_persuader_disclosures = d / n;
    row.mean_informational_appeals = ia / n;
    row.mean_motivational_appeals = ma / n;
    row.mean_target_disclosures = td / n;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows, const std::vector<std::string>& group_by) {
  std::ostringstream out;
  for (const auto& g : group_by) out << g << ',';
  out << "games,participants,incomplete,persuasion_success,persuasion_ci_lo,persuasion_ci_hi,"
         "persuasion_success_by_game,rational_bot_success,rational_ci_lo,rational_ci_hi,"
         "mean_persuader_disclosures,mean_informational_appeals,mean_motivational_appeals,"
         "mean_target_disclosures\n";
  for (const auto& r : rows) {
    for (const auto& [k, v] : r.key) out << csv_field(v) << ',';
    out << r.games << ',' << r.participants << ',' << r.incomplete << ',' << fmt(r.persuasion_success) << ','
        << fmt(r.persuasion_ci.lo) << ',' << fmt(r.persuasion_ci.hi) << ',' << fmt(r.persuasion_success_by_game)
        << ',' << fmt(r.rational_bot_success) << ',' << fmt(r.rational_ci.lo) << ',' << fmt(r.rational_ci.hi)
        << ',' << fmt(r.mean_persuader_disclosures) << ',' << fmt(r.mean_informational_appeals) << ','
        << fmt(r.mean_motivational_appeals) << ',' << fmt(r.mean_target_disclosures) << '\n';
  }
  return out.str();
}

Json metrics_json(const std::vector<MetricsRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    Json key;
    for (const auto& [k, v] : r.key) key[k] = v;
    j["group"] = key;
    j["games"] = r.games;
    j["participants"] = r.participants;
    j["incomplete"] = r.incomplete;
    j["persuasion_success"] = r.persuasion_success;
    j["persuasion_ci95"] = Json::array({r.persuasion_ci.lo, r.persuasion_ci.hi});
    j["persuasion_success_by_game"] = r.persuasion_success_by_game;
    j["rational_bot_success"] = r.rational_bot_success;
    j["rational_ci95"] = Json::array({r.rational_ci.lo, r.rational_ci.hi});
    j["mean_persuader_disclosures"] = r.mean_persuader_disclosures;
    j["mean_informational_appeals"] = r.mean_informational_appeals;
    j["mean_motivational_appeals"] = r.mean_motivational_appeals;
    j["mean_target_disclosures"] = r.mean_target_disclosures;
    arr.push_back(j);
  }
  Json report;
  report["chance_baseline"] = kChanceBaseline;
  report["legacy_chance_baseline"] = kLegacyChanceBaseline;
  report["groups"] = arr;
  return report;
}

std::string success_tidy_csv(const std::vector<MetricsRow>& rows, const std::vector<std::string>& group_by) {
  std::ostringstream out;
  for (const auto& g : group_by) out << g << ',';
  out << "measure,value,ci_lo,ci_hi,games\n";
  for (const auto& r : rows) {
    std::string prefix;
    for (const auto& [k, v] : r.key) prefix += csv_field(v) + ",";
    out << prefix << "persuasion_success," << fmt(r.persuasion_success) << ',' << fmt(r.persuasion_ci.lo) << ','
        << fmt(r.persuasion_ci.hi) << ',' << r.games << '\n';
    out << prefix << "rational_bot_success," << fmt(r.rational_bot_success) << ',' << fmt(r.rational_ci.lo) << ','
        << fmt(r.rational_ci.hi) << ',' << r.games << '\n';
  }
  return out.str();
}

std::string moves_tidy_csv(const std::vector<MetricsRow>& rows, const std::vector<std::string>& group_by) {
  std::ostringstream out;
  for (const auto& g : group_by) out << g << ',';
  out << "measure,mean_per_game,games\n";
  for (const auto& r : rows) {
    std::string prefix;
    for (const auto& [k, v] : r.key) prefix += csv_field(v) + ",";
    out << prefix << "persuader_disclosures," << fmt(r.mean_persuader_disclosures) << ',' << r.games << '\n';
    out << prefix << "informational_appeals," << fmt(r.mean_informational_appeals) << ',' << r.games << '\n';
    out << prefix << "motivational_appeals," << fmt(r.mean_motivational_appeals) << ',' << r.games << '\n';
    out << prefix << "target_disclosures," << fmt(r.mean_target_disclosures) << ',' << r.games << '\n';
  }
  return out.str();
}

}  // namespace mindgames
