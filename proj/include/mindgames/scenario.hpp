#pragma once

#include <array>
#include <string>
#include <vector>

#include "mindgames/core.hpp"

namespace mindgames {

struct Scenario {
  std::string id;
  std::string cover_story;
  std::array<std::string, kAttributes> attribute_names;
  // Lower-case phrases the rule classifier accepts as mentions of each
  // attribute, longest first. Always includes the lower-cased full name.
  std::array<std::vector<std::string>, kAttributes> attribute_keywords;

  const std::string& attribute_name(AttributeId a) const { return attribute_names[a.index()]; }
};

// The five scenarios with the wording used for human-target play.
const std::vector<Scenario>& scenarios();
// The same five scenarios with the original rational-bot wording; ids carry
// an "-e1" suffix.
const std::vector<Scenario>& scenarios_e1();

// Looks up either registry; throws kInvalidArgument for unknown ids.
const Scenario& find_scenario(std::string_view id);

}  // namespace mindgames
