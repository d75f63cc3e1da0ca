#pragma once

// Message classifiers. The structured grammar is the exact channel used by
// scripted agents and tests:
//
//   DISCLOSE <A|B|C> <0|1|2> <+1|0|-1>
//   ASK-INFO [<A|B|C>]
//   ASK-VALUES
//   ASK-CHOICE
//   CHAT <freetext>
//
// One command per line. Blank lines are ignored; an empty message is generic.

#include <string>
#include <string_view>

#include "mindgames/classification.hpp"
#include "mindgames/scenario.hpp"

namespace mindgames {

// Throws kParse naming the offending token.
Classification classify_structured(std::string_view text);

// Inverse of classify_structured for any classification (generic renders as
// "CHAT"). Appeals follow disclosures.
std::string render_structured(const Classification& classification);

// Keyword heuristics over free text: proposal letters, attribute phrases and
// increase/decrease/no-effect verbs give claims; questions about knowledge
// give informational appeals; questions about likes and values give
// motivational appeals. Best effort, never throws.
Classification classify_rules(std::string_view text, const Scenario& scenario);

}  // namespace mindgames
