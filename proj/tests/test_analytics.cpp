#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "mindgames/analytics.hpp"

using namespace mgtest;

namespace {

// Enumerates all 9^n draw sequences; cells 0,1 are critical, 2,3 poison.
double p_win_enumerated(int n) {
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 9;
  long wins = 0;
  for (long code = 0; code < total; ++code) {
    long x = code;
    unsigned seen = 0;
    for (int i = 0; i < n; ++i) {
      seen |= 1u << (x % 9);
      x /= 9;
    }
    if ((seen & 0xFu) == 0x3u) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(total);
}

// A human-target game on the worked example.
Transcript human_game(const std::string& persuader_id, ProposalId pre, ProposalId fin, bool disclose_witness,
                      std::optional<ValenceVector> inferred = std::nullopt) {
  SessionConfig cfg;
  cfg.instance = worked_example();
  cfg.target_kind = TargetKind::kHuman;
  cfg.persuader_kind = PersuaderKind::kHuman;
  cfg.persuader_id = persuader_id;
  cfg.target_id = "t-" + persuader_id;
  cfg.inferred_valence = inferred;
  Session s(cfg);
  s.set_pre_choice(pre);
  s.post(Role::kPersuader, disclose_witness ? "DISCLOSE A 1 +1\nDISCLOSE C 0 -1\nASK-VALUES" : "ASK-INFO A");
  s.post(Role::kTarget, "DISCLOSE B 0 +1");
  s.set_final_choice(fin);
  return s.transcript();
}

Transcript bot_game(const std::string& msg) {
  SessionConfig cfg;
  cfg.instance = worked_example();
  cfg.persuader_kind = PersuaderKind::kOptimal;
  Session s(cfg);
  s.post(Role::kPersuader, msg);
  s.finish();
  return s.transcript();
}

}  // namespace

TEST_CASE("baseline: closed form, dynamic program and enumeration agree") {
  for (int n = 0; n <= 20; ++n) REQUIRE(std::abs(p_win_closed(n) - p_win_oracle(n)) <= 1e-12);
  for (int n = 0; n <= 5; ++n) REQUIRE(std::abs(p_win_closed(n) - p_win_enumerated(n)) <= 1e-12);
  CHECK(p_win_closed(0) == 0.0);
  CHECK(std::abs(p_win_closed(1)) <= 1e-15);
  CHECK(std::abs(p_win_closed(2) - 2.0 / 81.0) <= 1e-15);
  CHECK(std::abs(p_win_closed(6) - 0.0752) <= 1e-4);
  CHECK(p_win_argmax(1, 30) == 6);
  CHECK(p_win_argmax(7, 30) == 7);
  CHECK(p_win_argmax(1, 5) == 5);
}

TEST_CASE("bootstrap: determinism and errors") {
  std::vector<double> v{1, 0, 1, 1, 0, 1};
  auto a = bootstrap_ci(v, 500, 0.95, 3);
  auto b = bootstrap_ci(v, 500, 0.95, 3);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.lo <= a.hi);
  std::vector<double> one{0.4};
  auto c = bootstrap_ci(one, 10, 0.95, 1);
  CHECK(c.lo == 0.4);
  CHECK(c.hi == 0.4);
  CHECK_THROWS_AS(bootstrap_ci(std::vector<double>{}, 10, 0.95, 1), Error);
  CHECK_THROWS_AS(bootstrap_ci(v, 0, 0.95, 1), Error);
  CHECK_THROWS_AS(bootstrap_ci(v, 10, 1.0, 1), Error);
}

TEST_CASE("bootstrap: coverage and width against the normal approximation") {
  Rng rng(601);
  const double p = 0.3;
  const int n = 200, reps = 200;
  int covered = 0;
  double width_sum = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(rng.unit() < p ? 1.0 : 0.0);
    auto ci = bootstrap_ci(v, 400, 0.95, static_cast<std::uint64_t>(r));
    if (ci.lo <= p && p <= ci.hi) ++covered;
    width_sum += ci.hi - ci.lo;
  }
  const double coverage = static_cast<double>(covered) / reps;
  CHECK(coverage >= 0.88);
  CHECK(coverage <= 0.995);
  const double normal_width = 2 * 1.959964 * std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(width_sum / reps - normal_width) / normal_width < 0.15);
}

TEST_CASE("likert binning") {
  CHECK(likert_to_valence(parse_likert("Increased a lot")) == Valence::kLike);
  CHECK(likert_to_valence(parse_likert("Increased")) == Valence::kLike);
  CHECK(likert_to_valence(parse_likert("Stayed the same")) == Valence::kIndifferent);
  CHECK(likert_to_valence(parse_likert("Decreased")) == Valence::kDislike);
  CHECK(likert_to_valence(parse_likert("Decreased a lot")) == Valence::kDislike);
  CHECK_THROWS_AS(parse_likert("increased"), Error);
  CHECK(to_string(LikertResponse::kStayedTheSame) == "Stayed the same");
  auto v = infer_valence({LikertResponse::kDecreasedALot, LikertResponse::kIncreased, LikertResponse::kStayedTheSame});
  CHECK(v == ValenceVector{Valence::kDislike, Valence::kLike, Valence::kIndifferent});
}

TEST_CASE("exclusion filter keeps a game iff the pre-choice is the visible optimum") {
  std::vector<Transcript> ts{
      human_game("a", P('C'), P('A'), true),   // visible optimum is C
      human_game("b", P('A'), P('A'), true),
      bot_game("ASK-VALUES"),
      human_game("c", P('C'), P('C'), false,
                 ValenceVector{Valence::kDislike, Valence::kIndifferent, Valence::kIndifferent}),
  };
  auto assigned = exclusion_filter(ts, ExclusionMode::kAssigned);
  CHECK(assigned.kept == std::vector<std::size_t>{0, 2, 3});
  REQUIRE(assigned.excluded.size() == 1);
  CHECK(assigned.excluded[0].first == 1);
  // Under the inferred valence game 3 sees A = 0, B = -1, C = 0: a tie, so excluded.
  auto inferred = exclusion_filter(ts, ExclusionMode::kInferred);
  CHECK(inferred.kept == std::vector<std::size_t>{0, 2});
}

TEST_CASE("property: exclusion agrees with the oracle argmax") {
  Rng rng(602);
  std::vector<Transcript> ts;
  std::vector<bool> expect;
  for (int i = 0; i < 60; ++i) {
    ValenceVector v = random_valence(rng);
    ProposalId pre(rng.index(3));
    ts.push_back(human_game(std::to_string(i), pre, pre, false, v));
    const auto& g = worked_example();
    expect.push_back(oracle_strict_argmax(oracle_utilities(g.matrix, v, g.hidden.complement())) == pre.index());
  }
  auto r = exclusion_filter(ts, ExclusionMode::kInferred);
  std::set<std::size_t> kept(r.kept.begin(), r.kept.end());
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(kept.count(i) == (expect[i] ? 1u : 0u));
}

TEST_CASE("rational replay and move counts") {
  auto t = human_game("a", P('C'), P('B'), true);
  auto r = rational_replay(t);
  CHECK(r.choice == P('A'));
  CHECK(r.success);
  CHECK_FALSE(r.tie);
  auto m = count_moves(t);
  CHECK(m == MoveCounts{2, 0, 1, 1});
  // Replayed A utility 2 versus chosen B utility 3 under full information.
  CHECK(utility_category(t) == UtilityCategory::kTargetBetter);
  CHECK(utility_category(human_game("b", P('C'), P('A'), true)) == UtilityCategory::kAgree);
  CHECK(to_string(UtilityCategory::kReplayBetter) == "U(R)>U(T)");
  auto q = bot_game("ASK-CHOICE\nASK-INFO\nASK-INFO B");
  CHECK(count_moves(q).informational_appeals == 3);
  auto broken = t;
  broken.events[0].classification.reset();
  try {
    rational_replay(broken);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingClassification);
  }
}

TEST_CASE("replay: a single tying cell leaves the choice") {
  auto t = bot_game("DISCLOSE A 1 +1");
  auto r = rational_replay(t);
  CHECK(r.choice == P('C'));
  CHECK(r.tie);
}

TEST_CASE("select_game") {
  auto pool = corpus();
  std::vector<PayoffMatrix> seen;
  CHECK(select_game(pool, seen, std::nullopt) == 0);
  seen.push_back(pool[0].matrix);
  CHECK(select_game(pool, seen, std::nullopt) == 1);
  auto idx = select_game(pool, seen, pool[5].target_valence);
  CHECK(pool[idx].target_valence == pool[5].target_valence);
  CHECK(pool[idx].matrix != pool[0].matrix);
  std::vector<PayoffMatrix> all;
  for (const auto& g : pool) all.push_back(g.matrix);
  try {
    select_game(pool, all, std::nullopt);
    FAIL("expected exhaustion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPoolExhausted);
  }
  CHECK_THROWS_AS(select_game(std::span<const GameInstance>{}, seen, std::nullopt), Error);
}

TEST_CASE("metrics: participant weighting and incomplete games") {
  std::vector<Transcript> ts{
      human_game("a", P('C'), P('A'), true), human_game("a", P('C'), P('A'), true),
      human_game("a", P('C'), P('A'), true), human_game("b", P('C'), P('C'), false),
  };
  SessionConfig cfg;
  cfg.instance = worked_example();
  cfg.target_kind = TargetKind::kHuman;
  cfg.persuader_id = "c";
  Session s(cfg);
  s.fail("timeout");
  ts.push_back(s.transcript());

  AnalyzeOptions o;
  o.bootstrap_iterations = 200;
  auto rows = persuasion_success(ts, o);
  REQUIRE(rows.size() == 1);
  const auto& r = rows[0];
  CHECK(r.games == 4);
  CHECK(r.incomplete == 1);
  CHECK(r.participants == 2);
  CHECK(r.persuasion_success == doctest::Approx(0.5));
  CHECK(r.persuasion_success_by_game == doctest::Approx(0.75));
  CHECK(r.rational_bot_success == doctest::Approx(0.5));
  CHECK(r.mean_persuader_disclosures == doctest::Approx(1.5));
  CHECK(r.key[0] == std::pair<std::string, std::string>{"persuader", "human"});
  // The worked example carries no persuader valence, so these count as inferred-mode games.
  CHECK(r.key[2] == std::pair<std::string, std::string>{"mode", "inferred"});

  auto csv = metrics_csv(rows, o.group_by);
  CHECK(csv.rfind("persuader,condition,mode,games,participants,incomplete,persuasion_success", 0) == 0);
  auto j = metrics_json(rows);
  CHECK(j["chance_baseline"] == 0.075);
  CHECK(j["legacy_chance_baseline"] == 0.10);
  CHECK(j["groups"].size() == 1);
  CHECK(success_tidy_csv(rows, o.group_by).find("rational_bot_success") != std::string::npos);
  CHECK(moves_tidy_csv(rows, o.group_by).find("motivational_appeals") != std::string::npos);

  o.group_by = {"nonsense"};
  CHECK_THROWS_AS(persuasion_success(ts, o), Error);
}

TEST_CASE("metrics: exclusion and grouping") {
  std::vector<Transcript> ts{human_game("a", P('C'), P('A'), true), human_game("b", P('A'), P('A'), true),
                             bot_game("DISCLOSE A 1 +1\nDISCLOSE C 0 -1")};
  AnalyzeOptions o;
  o.bootstrap_iterations = 100;
  o.group_by = {"target"};
  o.exclusion = ExclusionMode::kAssigned;
  auto rows = persuasion_success(ts, o);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key[0].second == "bot");
  CHECK(rows[1].games == 1);
  CHECK(experiment_mode(ts[2].config) == "bot");
}
