#pragma once

#include <optional>
#include <vector>

#include "mindgames/core.hpp"

namespace mindgames {

struct Claim {
  ProposalId proposal;
  AttributeId attribute;
  Effect effect = Effect::kNone;

  Cell cell() const { return Cell{proposal, attribute}; }
  friend bool operator==(const Claim&, const Claim&) = default;
};

// Structured reading of one message. A message may carry disclosures and
// appeals at the same time; `generic` is set only when it carries neither.
struct Classification {
  std::vector<Claim> disclosures;
  // One entry per informational appeal; a set scope restricts it to one proposal.
  std::vector<std::optional<ProposalId>> info_appeals;
  bool motivational_appeal = false;
  // "Which proposal do you prefer?" Counted as an informational appeal.
  bool preference_query = false;
  bool generic = false;

  bool has_appeal() const { return !info_appeals.empty() || motivational_appeal || preference_query; }
  // Sets `generic` from the other fields.
  void normalize() { generic = disclosures.empty() && !has_appeal(); }

  friend bool operator==(const Classification&, const Classification&) = default;
};

inline Classification generic_classification() {
  Classification c;
  c.generic = true;
  return c;
}

}  // namespace mindgames
