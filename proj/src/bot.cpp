#include "mindgames/bot.hpp"

#include <algorithm>
#include <map>

namespace mindgames {

CellMask BotState::known_cells() const {
  CellMask m;
  for (int i = 0; i < kCells; ++i)
    if (beliefs_[i]) m.insert(Cell::from_flat(i));
  return m;
}

Utilities BotState::utilities() const {
  Utilities u{};
  for (int i = 0; i < kCells; ++i) {
    if (!beliefs_[i]) continue;
    Cell c = Cell::from_flat(i);
    u[c.proposal.index()] += value_of(valence_[c.attribute.index()]) * value_of(*beliefs_[i]);
  }
  return u;
}

BotState bot_init(const GameInstance& instance, const ValenceVector& valence_override) {
  BotState s;
  s.valence_ = valence_override;
  for (int i = 0; i < kCells; ++i)
    if (!instance.hidden.contains_flat(i)) s.beliefs_[i] = instance.matrix.at(Cell::from_flat(i));
  s.history_.push_back(choose(s.utilities(), {}));
  return s;
}

BotState bot_init(const GameInstance& instance) { return bot_init(instance, instance.target_valence); }

BotState bot_ingest(BotState state, std::span<const Claim> claims) {
  for (const Claim& c : claims) {
    auto& belief = state.beliefs_[c.cell().flat()];
    if (!belief) belief = c.effect;
  }
  ProposalId next = choose(state.utilities(), state.history_);
  if (next != state.history_.back()) state.history_.push_back(next);
  return state;
}

std::vector<Fact> bot_answer_info(const BotState& state, std::optional<ProposalId> scope) {
  std::vector<Fact> out;
  for (int i = 0; i < kCells; ++i) {
    auto b = state.beliefs()[i];
    if (!b) continue;
    Cell c = Cell::from_flat(i);
    if (scope && c.proposal != *scope) continue;
    out.push_back(Fact{c.proposal, c.attribute, *b});
  }
  return out;
}

ValenceVector bot_answer_valence(const BotState& state) { return state.valence(); }

BotReply bot_respond(BotState state, const Classification& classification) {
  ResponsePlan plan;
  const ProposalId before = state.current_choice();

  if (!classification.disclosures.empty()) {
    state = bot_ingest(std::move(state), classification.disclosures);
    plan::Echo echo;
    for (const Claim& c : classification.disclosures) {
      Fact f{c.proposal, c.attribute, *state.belief(c.cell())};
      if (std::find(echo.facts.begin(), echo.facts.end(), f) == echo.facts.end()) echo.facts.push_back(f);
    }
    plan.segments.emplace_back(std::move(echo));
  }
  for (const auto& scope : classification.info_appeals)
    plan.segments.emplace_back(plan::FactAnswer{scope, bot_answer_info(state, scope)});
  if (classification.motivational_appeal)
    plan.segments.emplace_back(plan::ValenceAnswer{bot_answer_valence(state)});
  if (state.current_choice() != before || classification.preference_query)
    plan.segments.emplace_back(plan::PreferenceStatement{state.utilities(), state.current_choice()});
  if (plan.segments.empty()) plan.segments.emplace_back(plan::Generic{});
  return BotReply{std::move(state), std::move(plan)};
}

namespace {

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::string proposals_phrase(const std::vector<ProposalId>& ps) {
  std::vector<std::string> labels;
  for (auto p : ps) labels.push_back(p.name());
  return (ps.size() == 1 ? "proposal " : "proposals ") + join_list(labels);
}

}  // namespace

std::string render_facts(const std::vector<Fact>& facts, const Scenario& scenario) {
  std::map<int, std::vector<Fact>> by_proposal;
  for (const auto& f : facts) by_proposal[f.proposal.index()].push_back(f);
  std::string out;
  for (const auto& [p, list] : by_proposal) {
    std::vector<std::string> clauses;
    for (const auto& f : list)
      clauses.push_back("will " + effect_verb_phrase(f.effect) + " " + scenario.attribute_name(f.attribute));
    if (!out.empty()) out += ' ';
    out += "Proposal " + ProposalId(p).name() + " " + join_list(clauses) + ".";
  }
  return out;
}

std::string render_valence(const ValenceVector& valence, const Scenario& scenario) {
  std::vector<std::string> parts;
  for (int a = 0; a < kAttributes; ++a) {
    const std::string& name = scenario.attribute_names[a];
    switch (valence[a]) {
      case Valence::kLike: parts.push_back("I like " + name); break;
      case Valence::kDislike: parts.push_back("I dislike " + name); break;
      case Valence::kIndifferent: parts.push_back("I am indifferent to " + name); break;
    }
  }
  return join_list(parts) + ".";
}

std::string render_preference(const plan::PreferenceStatement& st) {
  std::map<int, std::vector<ProposalId>, std::greater<>> levels;
  for (int p = 0; p < kProposals; ++p) levels[st.utilities[p]].emplace_back(p);
  std::vector<std::vector<ProposalId>> groups;
  for (auto& [u, ps] : levels) groups.push_back(ps);

  auto tie_note = [&] {
    return "\n\n" + std::string(kTieNote) + " Right now, that is " + st.choice.name() + ".";
  };
  if (groups.size() == 1) return "I prefer " + proposals_phrase(groups[0]) + " the same." + tie_note();
  if (groups.size() == 3)
    return "I prefer " + proposals_phrase(groups[0]) + " over " +
           proposals_phrase({groups[1][0], groups[2][0]}) + ". I prefer " + proposals_phrase(groups[1]) +
           " over " + proposals_phrase(groups[2]) + ".";
  if (groups[0].size() == 1)
    return "I prefer " + proposals_phrase(groups[1]) + " the same. I prefer " + proposals_phrase(groups[0]) +
           " over " + proposals_phrase(groups[1]) + ".";
  return "I prefer " + proposals_phrase(groups[0]) + " the same. I prefer " + proposals_phrase(groups[0]) +
         " over " + proposals_phrase(groups[1]) + "." + tie_note();
}

std::string render_response(const ResponsePlan& plan, const Scenario& scenario) {
  std::string out;
  auto append = [&](const std::string& s) {
    if (s.empty()) return;
    if (!out.empty()) out += ' ';
    out += s;
  };
  for (const auto& seg : plan.segments) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, plan::Echo>) {
            append(render_facts(s.facts, scenario));
          } else if constexpr (std::is_same_v<T, plan::FactAnswer>) {
            if (s.facts.empty())
              append(s.scope ? "I do not know anything about proposal " + s.scope->name() + "."
                             : std::string("I do not know anything about the proposals."));
            else
              append(render_facts(s.facts, scenario));
          } else if constexpr (std::is_same_v<T, plan::ValenceAnswer>) {
            append(render_valence(s.valence, scenario));
          } else if constexpr (std::is_same_v<T, plan::PreferenceStatement>) {
            append(render_preference(s));
          } else {
            append(std::string(kGenericResponse));
          }
        },
        seg);
  }
  return out;
}

}  // namespace mindgames
