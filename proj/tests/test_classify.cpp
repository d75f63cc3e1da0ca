#include <doctest.h>

#include "support.hpp"
#include "mindgames/classify.hpp"
#include "mindgames/session.hpp"

using namespace mgtest;

namespace {
Claim claim(char p, int a, int e) { return Claim{P(p), AttributeId(a), effect_from_int(e)}; }
const Scenario& llm() { return find_scenario("llm"); }

ErrorCode parse_code(std::string_view text) {
  try {
    classify_structured(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}
}  // namespace

TEST_CASE("structured grammar") {
  auto c = classify_structured("DISCLOSE A 1 +1\n\n  DISCLOSE C 0 -1 \nASK-INFO B\nASK-INFO\nASK-VALUES\nASK-CHOICE");
  CHECK(c.disclosures == std::vector<Claim>{claim('A', 1, 1), claim('C', 0, -1)});
  CHECK(c.info_appeals == std::vector<std::optional<ProposalId>>{P('B'), std::nullopt});
  CHECK(c.motivational_appeal);
  CHECK(c.preference_query);
  CHECK_FALSE(c.generic);
  CHECK(classify_structured("").generic);
  CHECK(classify_structured("CHAT hello there").generic);
  CHECK(classify_structured("DISCLOSE B 2 0").disclosures == std::vector<Claim>{claim('B', 2, 0)});
}

TEST_CASE("structured grammar rejects bad tokens") {
  CHECK(parse_code("DISCLOSE D 1 +1") == ErrorCode::kParse);
  CHECK(parse_code("DISCLOSE A 3 +1") == ErrorCode::kParse);
  CHECK(parse_code("DISCLOSE A 1 +2") == ErrorCode::kParse);
  CHECK(parse_code("DISCLOSE A 1") == ErrorCode::kParse);
  CHECK(parse_code("ASK-VALUES now") == ErrorCode::kParse);
  CHECK(parse_code("HELLO") == ErrorCode::kParse);
  try {
    classify_structured("DISCLOSE A 1 +7");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("+7") != std::string::npos);
  }
}

TEST_CASE("property: render and parse round-trip") {
  Rng rng(301);
  for (int i = 0; i < 3000; ++i) {
    Classification c;
    int n = rng.index(4);
    for (int j = 0; j < n; ++j) c.disclosures.push_back(claim('A' + rng.index(3), rng.index(3), rng.index(3) - 1));
    int k = rng.index(3);
    for (int j = 0; j < k; ++j)
      c.info_appeals.push_back(rng.index(2) ? std::optional<ProposalId>(ProposalId(rng.index(3))) : std::nullopt);
    c.motivational_appeal = rng.index(2);
    c.preference_query = rng.index(2);
    c.normalize();
    REQUIRE(classify_structured(render_structured(c)) == c);
  }
  CHECK(render_structured(generic_classification()) == "CHAT");
}

TEST_CASE("rules: disclosures from free text") {
  auto c = classify_rules("Proposal A will increase development speed of LLMs.", llm());
  CHECK(c.disclosures == std::vector<Claim>{claim('A', 1, 1)});
  c = classify_rules("Proposal C decreases safety and control. B boosts public trust!", llm());
  CHECK(c.disclosures == std::vector<Claim>{claim('C', 0, -1), claim('B', 2, 1)});
  c = classify_rules("Proposals A and B have no effect on public trust.", llm());
  CHECK(c.disclosures == std::vector<Claim>{claim('A', 2, 0), claim('B', 2, 0)});
  c = classify_rules("Proposal B does not increase safety and control of LLMs.", llm());
  CHECK(c.disclosures == std::vector<Claim>{claim('B', 0, 0)});
}

TEST_CASE("rules: appeals") {
  auto c = classify_rules("What do you know about proposal B?", llm());
  CHECK(c.info_appeals == std::vector<std::optional<ProposalId>>{P('B')});
  c = classify_rules("What do you care about?", llm());
  CHECK(c.motivational_appeal);
  c = classify_rules("Which proposal do you prefer right now?", llm());
  CHECK(c.preference_query);
  CHECK_FALSE(c.motivational_appeal);
  c = classify_rules("Hello! Nice to meet you.", llm());
  CHECK(c.generic);
  CHECK(classify_rules("", llm()).generic);
}

TEST_CASE("rules: attribute names containing verbs are not effects") {
  const auto& ocean = find_scenario("ocean");
  auto c = classify_rules("Proposal A will reduce economic benefits for coastal communities.", ocean);
  CHECK(c.disclosures == std::vector<Claim>{claim('A', 2, -1)});
}

TEST_CASE("default classifiers") {
  CHECK(default_classifier(ClassifierKind::kStructured)("ASK-VALUES", llm()).motivational_appeal);
  CHECK(default_classifier(ClassifierKind::kRules)("What do you value?", llm()).motivational_appeal);
  CHECK_THROWS_AS(default_classifier(ClassifierKind::kLlm), Error);
}
