#include <doctest.h>

#include "support.hpp"
#include "mindgames/bot.hpp"

using namespace mgtest;

namespace {
Claim claim(char p, int a, int e) { return Claim{P(p), AttributeId(a), effect_from_int(e)}; }
const Scenario& llm() { return find_scenario("llm"); }
}  // namespace

TEST_CASE("init: beliefs are ground truth off the hidden cells") {
  auto g = worked_example();
  auto s = bot_init(g);
  CHECK(s.known_cells() == g.hidden.complement());
  CHECK(s.current_choice() == P('C'));
  CHECK(s.history() == std::vector<ProposalId>{P('C')});
  CHECK(s.utilities() == Utilities{1, 1, 2});
  for (int i = 0; i < kCells; ++i) {
    Cell c = Cell::from_flat(i);
    if (g.hidden.contains(c))
      CHECK_FALSE(s.belief(c).has_value());
    else
      CHECK(*s.belief(c) == g.matrix.at(c));
  }
}

TEST_CASE("ingest: witness flips to the goal, everything flips to p_full") {
  auto g = worked_example();
  auto s = bot_init(g);
  std::vector<Claim> w{claim('A', 1, 1), claim('C', 0, -1)};
  auto s1 = bot_ingest(s, w);
  CHECK(s1.current_choice() == P('A'));
  std::vector<Claim> rest{claim('B', 1, 1), claim('B', 2, 1)};
  auto s2 = bot_ingest(s1, rest);
  CHECK(s2.current_choice() == P('B'));
  CHECK(s2.history() == std::vector<ProposalId>{P('C'), P('A'), P('B')});
}

TEST_CASE("ingest: claims are taken at face value, first claim wins, known cells are kept") {
  auto g = worked_example();
  auto s = bot_init(g);
  // False claim on a hidden cell is believed.
  std::vector<Claim> lie{claim('C', 0, 1), claim('C', 0, -1)};
  auto s1 = bot_ingest(s, lie);
  CHECK(*s1.belief(C('C', 0)) == Effect::kIncrease);
  // False claim on a visible cell is ignored.
  std::vector<Claim> lie2{claim('A', 2, -1)};
  auto s2 = bot_ingest(s, lie2);
  CHECK(*s2.belief(C('A', 2)) == Effect::kIncrease);
  CHECK(s2 == s);
}

TEST_CASE("ingest: a single witness cell only ties and keeps the current choice") {
  auto g = worked_example();
  std::vector<Claim> one{claim('A', 1, 1)};
  auto s = bot_ingest(bot_init(g), one);
  CHECK(s.utilities() == Utilities{2, 1, 2});
  CHECK(s.current_choice() == P('C'));
}

TEST_CASE("valence override") {
  auto g = worked_example();
  ValenceVector v{Valence::kDislike, Valence::kIndifferent, Valence::kIndifferent};
  auto s = bot_init(g, v);
  CHECK(s.valence() == v);
  CHECK(s.utilities() == Utilities{0, -1, 0});
  CHECK(s.current_choice() == P('A'));
}

TEST_CASE("answers") {
  auto g = worked_example();
  auto s = bot_init(g);
  auto facts = bot_answer_info(s, P('B'));
  REQUIRE(facts.size() == 1);
  CHECK(facts[0] == Fact{P('B'), AttributeId(0), Effect::kIncrease});
  CHECK(bot_answer_info(s).size() == 5);
  CHECK(bot_answer_valence(s) == g.target_valence);
}

TEST_CASE("respond: never volunteers") {
  auto g = worked_example();
  auto r = bot_respond(bot_init(g), generic_classification());
  REQUIRE(r.plan.segments.size() == 1);
  CHECK(std::holds_alternative<plan::Generic>(r.plan.segments[0]));
  CHECK(render_response(r.plan, llm()) == std::string(kGenericResponse));
}

TEST_CASE("respond: echo then preference when the choice changes") {
  auto g = worked_example();
  Classification c;
  c.disclosures = {claim('A', 1, 1), claim('C', 0, -1)};
  auto r = bot_respond(bot_init(g), c);
  REQUIRE(r.plan.segments.size() == 2);
  CHECK(std::holds_alternative<plan::Echo>(r.plan.segments[0]));
  CHECK(std::get<plan::PreferenceStatement>(r.plan.segments[1]).choice == P('A'));
  CHECK(render_response(r.plan, llm()) ==
        "Proposal A will increase development speed of LLMs. Proposal C will decrease safety and control of "
        "LLMs. I prefer proposals B and C the same. I prefer proposal A over proposals B and C.");
}

TEST_CASE("respond: appeals") {
  auto g = worked_example();
  Classification c;
  c.info_appeals = {P('A'), std::nullopt};
  c.motivational_appeal = true;
  c.preference_query = true;
  auto r = bot_respond(bot_init(g), c);
  REQUIRE(r.plan.segments.size() == 4);
  auto text = render_response(r.plan, llm());
  CHECK(text.find("Proposal A will have no effect on safety and control of LLMs and will increase public trust in "
                  "LLMs.") == 0);
  CHECK(text.find("I like safety and control of LLMs, I like development speed of LLMs and I like public trust in "
                  "LLMs.") != std::string::npos);
  CHECK(text.find("I prefer proposals A and B the same. I prefer proposal C over proposals A and B.") != std::string::npos);
}

TEST_CASE("render: unknown scope") {
  ResponsePlan p;
  p.segments.emplace_back(plan::FactAnswer{P('B'), {}});
  p.segments.emplace_back(plan::FactAnswer{std::nullopt, {}});
  CHECK(render_response(p, llm()) ==
        "I do not know anything about proposal B. I do not know anything about the proposals.");
}

TEST_CASE("render: preference templates") {
  CHECK(render_preference({{3, 1, 1}, P('A')}) ==
        "I prefer proposals B and C the same. I prefer proposal A over proposals B and C.");
  CHECK(render_preference({{2, 2, 1}, P('B')}) ==
        "I prefer proposals A and B the same. I prefer proposals A and B over proposal C.\n\nWhen I prefer the top "
        "proposals the same, I choose whichever of them I had preferred first. Right now, that is B.");
  CHECK(render_preference({{0, 0, 0}, P('C')}).find("I prefer proposals A, B and C the same.") == 0);
  CHECK(render_preference({{1, 3, 2}, P('B')}) ==
        "I prefer proposal B over proposals C and A. I prefer proposal C over proposal A.");
}

TEST_CASE("property: tie statements name the sticky choice") {
  Rng rng(201);
  int ties = 0;
  for (int i = 0; i < 10000; ++i) {
    auto m = random_matrix(rng);
    auto v = random_valence(rng);
    auto u = oracle_utilities(m, v, random_mask(rng));
    std::vector<ProposalId> history{ProposalId(rng.index(3))};
    ProposalId pick = choose(u, history);
    auto text = render_preference({u, pick});
    bool tied_top = oracle_strict_argmax(u) < 0;
    if (tied_top) {
      ++ties;
      REQUIRE(text.find("whichever of them I had preferred first") != std::string::npos);
      REQUIRE(text.find("Right now, that is " + pick.name() + ".") != std::string::npos);
    } else {
      REQUIRE(text.find("whichever") == std::string::npos);
    }
  }
  CHECK(ties > 100);
}
