#include "mindgames/codec.hpp"

#include <fstream>
#include <sstream>

namespace mindgames {
namespace {

Json proposal_json(ProposalId p) { return p.name(); }

ProposalId proposal_from(const Json& j) {
  auto p = ProposalId::from_label(j.get<std::string>());
  if (!p) throw Error(ErrorCode::kParse, "bad proposal label: " + j.dump());
  return *p;
}

Json optional_proposal(const std::optional<ProposalId>& p) { return p ? Json(p->name()) : Json(nullptr); }

std::optional<ProposalId> optional_proposal_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return proposal_from(j);
}

std::vector<Fact> facts_from_json(const Json& j) {
  std::vector<Fact> out;
  for (const auto& f : j)
    out.push_back(Fact{proposal_from(f.at("proposal")), AttributeId(f.at("attribute").get<int>()),
                       effect_from_int(f.at("effect").get<int>())});
  return out;
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  } catch (const std::out_of_range& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

}  // namespace

Json valence_to_json(const ValenceVector& v) {
  Json j = Json::array();
  for (auto x : v) j.push_back(value_of(x));
  return j;
}

ValenceVector valence_from_json(const Json& j) {
  return guarded([&] {
    if (!j.is_array() || j.size() != kAttributes)
      throw Error(ErrorCode::kParse, "valence must be an array of 3 integers");
    ValenceVector v;
    for (int a = 0; a < kAttributes; ++a) v[a] = valence_from_int(j[a].get<int>());
    return v;
  });
}

Json cells_to_json(CellMask m) {
  Json j = Json::array();
  for (Cell c : m.cells()) j.push_back(Json::array({c.proposal.index(), c.attribute.index()}));
  return j;
}

CellMask cells_from_json(const Json& j) {
  return guarded([&] {
    CellMask m;
    for (const auto& pair : j) {
      if (!pair.is_array() || pair.size() != 2) throw Error(ErrorCode::kParse, "cell must be [p, a]");
      Cell c{ProposalId(pair[0].get<int>()), AttributeId(pair[1].get<int>())};
      if (m.contains(c)) throw Error(ErrorCode::kParse, "duplicate cell in mask");
      m.insert(c);
    }
    return m;
  });
}

Json to_json(const GameInstance& g) {
  Json matrix = Json::array();
  for (int p = 0; p < kProposals; ++p) {
    Json row = Json::array();
    for (int a = 0; a < kAttributes; ++a) row.push_back(value_of(g.matrix.at(ProposalId(p), AttributeId(a))));
    matrix.push_back(row);
  }
  Json j;
  j["scenario_id"] = g.scenario_id;
  j["matrix"] = matrix;
  j["target_valence"] = valence_to_json(g.target_valence);
  j["persuader_valence"] = g.persuader_valence ? valence_to_json(*g.persuader_valence) : Json(nullptr);
  j["persuader_goal"] = proposal_json(g.persuader_goal);
  j["hidden"] = cells_to_json(g.hidden);
  j["witness"] = cells_to_json(g.witness);
  j["p_init"] = proposal_json(g.p_init);
  j["p_full"] = proposal_json(g.p_full);
  return j;
}

GameInstance instance_from_json(const Json& j) {
  return guarded([&] {
    GameInstance g;
    g.scenario_id = j.at("scenario_id").get<std::string>();
    const auto& m = j.at("matrix");
    if (!m.is_array() || m.size() != kProposals) throw Error(ErrorCode::kParse, "matrix must be 3x3");
    for (int p = 0; p < kProposals; ++p) {
      if (!m[p].is_array() || m[p].size() != kAttributes) throw Error(ErrorCode::kParse, "matrix must be 3x3");
      for (int a = 0; a < kAttributes; ++a)
        g.matrix.set(Cell{ProposalId(p), AttributeId(a)}, effect_from_int(m[p][a].get<int>()));
    }
    g.target_valence = valence_from_json(j.at("target_valence"));
    if (j.contains("persuader_valence") && !j.at("persuader_valence").is_null())
      g.persuader_valence = valence_from_json(j.at("persuader_valence"));
    g.persuader_goal = proposal_from(j.at("persuader_goal"));
    g.hidden = cells_from_json(j.at("hidden"));
    g.witness = cells_from_json(j.at("witness"));
    g.p_init = proposal_from(j.at("p_init"));
    g.p_full = proposal_from(j.at("p_full"));
    return g;
  });
}

Json to_json(const ConstraintReport& r) {
  Json j;
  j["c1_full_info_choice"] = r.full_info_choice;
  j["c2_initial_choice"] = r.initial_choice;
  j["c3_witness_choice"] = r.witness_choice;
  j["c4_hidden_size"] = r.hidden_size;
  j["c5_witness_in_hidden"] = r.witness_in_hidden;
  j["distinct"] = r.distinct;
  j["persuader_prefers_goal"] = r.persuader_prefers_goal;
  j["valid"] = r.valid();
  return j;
}

Json to_json(const Fact& f) {
  Json j;
  j["proposal"] = f.proposal.name();
  j["attribute"] = f.attribute.index();
  j["effect"] = value_of(f.effect);
  return j;
}

Json to_json(const Classification& c) {
  Json j;
  Json d = Json::array();
  for (const auto& cl : c.disclosures) d.push_back(to_json(Fact{cl.proposal, cl.attribute, cl.effect}));
  j["disclosures"] = d;
  Json info = Json::array();
  for (const auto& s : c.info_appeals) info.push_back(optional_proposal(s));
  j["info_appeals"] = info;
  j["motivational_appeal"] = c.motivational_appeal;
  j["preference_query"] = c.preference_query;
  j["generic"] = c.generic;
  return j;
}

Classification classification_from_json(const Json& j) {
  return guarded([&] {
    Classification c;
    for (const auto& f : facts_from_json(j.at("disclosures")))
      c.disclosures.push_back(Claim{f.proposal, f.attribute, f.effect});
    for (const auto& s : j.at("info_appeals")) c.info_appeals.push_back(optional_proposal_from(s));
    c.motivational_appeal = j.at("motivational_appeal").get<bool>();
    c.preference_query = j.value("preference_query", false);
    c.generic = j.at("generic").get<bool>();
    if (c.generic && (!c.disclosures.empty() || c.has_appeal()))
      throw Error(ErrorCode::kParse, "generic classification carries content");
    return c;
  });
}

Json to_json(const ResponsePlan& p) {
  Json arr = Json::array();
  for (const auto& seg : p.segments) {
    Json j;
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          auto facts = [](const std::vector<Fact>& fs) {
            Json a = Json::array();
            for (const auto& f : fs) a.push_back(to_json(f));
            return a;
          };
          if constexpr (std::is_same_v<T, plan::Echo>) {
            j["kind"] = "echo";
            j["facts"] = facts(s.facts);
          } else if constexpr (std::is_same_v<T, plan::FactAnswer>) {
            j["kind"] = "fact_answer";
            j["scope"] = optional_proposal(s.scope);
            j["facts"] = facts(s.facts);
          } else if constexpr (std::is_same_v<T, plan::ValenceAnswer>) {
            j["kind"] = "valence_answer";
            j["valence"] = valence_to_json(s.valence);
          } else if constexpr (std::is_same_v<T, plan::PreferenceStatement>) {
            j["kind"] = "preference";
            j["utilities"] = Json::array({s.utilities[0], s.utilities[1], s.utilities[2]});
            j["choice"] = s.choice.name();
          } else {
            j["kind"] = "generic";
          }
        },
        seg);
    arr.push_back(j);
  }
  return arr;
}

ResponsePlan plan_from_json(const Json& j) {
  return guarded([&] {
    ResponsePlan p;
    for (const auto& s : j) {
      auto kind = s.at("kind").get<std::string>();
      if (kind == "echo") {
        p.segments.emplace_back(plan::Echo{facts_from_json(s.at("facts"))});
      } else if (kind == "fact_answer") {
        p.segments.emplace_back(plan::FactAnswer{optional_proposal_from(s.at("scope")), facts_from_json(s.at("facts"))});
      } else if (kind == "valence_answer") {
        p.segments.emplace_back(plan::ValenceAnswer{valence_from_json(s.at("valence"))});
      } else if (kind == "preference") {
        const auto& u = s.at("utilities");
        p.segments.emplace_back(plan::PreferenceStatement{
            Utilities{u.at(0).get<int>(), u.at(1).get<int>(), u.at(2).get<int>()}, proposal_from(s.at("choice"))});
      } else if (kind == "generic") {
        p.segments.emplace_back(plan::Generic{});
      } else {
        throw Error(ErrorCode::kParse, "unknown plan segment: " + kind);
      }
    }
    return p;
  });
}

Json to_json(const SessionConfig& c) {
  Json j;
  j["condition"] = to_string(c.condition);
  j["persuader_kind"] = to_string(c.persuader_kind);
  j["target_kind"] = to_string(c.target_kind);
  j["classifier_kind"] = to_string(c.classifier_kind);
  j["max_persuader_turns"] = c.max_persuader_turns;
  j["seed"] = c.seed;
  j["random_draws"] = c.random_draws;
  j["message_char_limit"] = c.message_char_limit;
  j["human_timeout_seconds"] = c.human_timeout_seconds ? Json(*c.human_timeout_seconds) : Json(nullptr);
  j["persuader_id"] = c.persuader_id;
  j["target_id"] = c.target_id;
  j["inferred_valence"] = c.inferred_valence ? valence_to_json(*c.inferred_valence) : Json(nullptr);
  j["instance"] = to_json(c.instance);
  return j;
}

SessionConfig session_config_from_json(const Json& j) {
  return guarded([&] {
    SessionConfig c;
    c.instance = instance_from_json(j.at("instance"));
    c.condition = parse_condition(j.value("condition", std::string("hidden")));
    c.persuader_kind = parse_persuader_kind(j.value("persuader_kind", std::string("human")));
    c.target_kind = parse_target_kind(j.value("target_kind", std::string("bot")));
    c.classifier_kind = parse_classifier_kind(j.value("classifier_kind", std::string("structured")));
    c.max_persuader_turns = j.value("max_persuader_turns", 10);
    c.seed = j.value("seed", std::uint64_t{0});
    c.random_draws = j.value("random_draws", 6);
    c.message_char_limit = j.value("message_char_limit", 300);
    if (j.contains("human_timeout_seconds") && !j.at("human_timeout_seconds").is_null())
      c.human_timeout_seconds = j.at("human_timeout_seconds").get<double>();
    c.persuader_id = j.value("persuader_id", std::string());
    c.target_id = j.value("target_id", std::string());
    if (j.contains("inferred_valence") && !j.at("inferred_valence").is_null())
      c.inferred_valence = valence_from_json(j.at("inferred_valence"));
    return c;
  });
}

Json to_json(const MessageEvent& e) {
  Json j;
  j["type"] = "message";
  j["turn"] = e.turn;
  j["role"] = to_string(e.role);
  j["text"] = e.text;
  if (e.classification) j["classification"] = to_json(*e.classification);
  if (e.plan) j["plan"] = to_json(*e.plan);
  return j;
}

MessageEvent event_from_json(const Json& j) {
  return guarded([&] {
    MessageEvent e;
    e.turn = j.at("turn").get<int>();
    e.role = parse_role(j.at("role").get<std::string>());
    e.text = j.at("text").get<std::string>();
    if (j.contains("classification")) e.classification = classification_from_json(j.at("classification"));
    if (j.contains("plan")) e.plan = plan_from_json(j.at("plan"));
    return e;
  });
}

namespace {

Json history_json(const std::vector<MessageEvent>& history) {
  Json h = Json::array();
  for (const auto& e : history) {
    Json m;
    m["turn"] = e.turn;
    m["role"] = to_string(e.role);
    m["text"] = e.text;
    h.push_back(m);
  }
  return h;
}

Json facts_json(const std::vector<Fact>& facts) {
  Json a = Json::array();
  for (const auto& f : facts) a.push_back(to_json(f));
  return a;
}

Json scenario_json(const Scenario& s) {
  Json j;
  j["id"] = s.id;
  j["cover_story"] = s.cover_story;
  j["attributes"] = Json::array({s.attribute_names[0], s.attribute_names[1], s.attribute_names[2]});
  return j;
}

}  // namespace

Json to_json(const AgentView& v) {
  Json j;
  j["role"] = "persuader";
  j["condition"] = to_string(v.condition);
  j["scenario"] = scenario_json(*v.scenario);
  std::vector<Fact> all;
  for (int i = 0; i < kCells; ++i) {
    Cell c = Cell::from_flat(i);
    all.push_back(Fact{c.proposal, c.attribute, v.matrix.at(c)});
  }
  j["proposals"] = facts_json(all);
  j["persuader_goal"] = v.persuader_goal.name();
  j["persuader_valence"] = v.persuader_valence ? valence_to_json(*v.persuader_valence) : Json(nullptr);
  if (v.condition == Condition::kRevealed) {
    Json other;
    if (v.target_valence) other["valence"] = valence_to_json(*v.target_valence);
    if (v.target_known) other["known"] = facts_json(*v.target_known);
    j["other_player"] = other;
  }
  j["turns_remaining"] = v.turns_remaining;
  j["history"] = history_json(v.history);
  return j;
}

Json to_json(const TargetView& v) {
  Json j;
  j["role"] = "target";
  j["scenario"] = scenario_json(*v.scenario);
  j["known"] = facts_json(v.known);
  j["valence"] = valence_to_json(v.valence);
  j["instructions"] = v.instructions;
  j["history"] = history_json(v.history);
  return j;
}

std::string transcript_to_jsonl(const Transcript& t) {
  std::string out;
  auto line = [&](const Json& j) {
    out += j.dump();
    out += '\n';
  };
  Json game;
  game["type"] = "game";
  const Json config = to_json(t.config);
  for (auto& [k, v] : config.items()) game[k] = v;
  line(game);
  if (t.pre_choice) line(Json{{"type", "choice"}, {"stage", "pre"}, {"proposal", t.pre_choice->name()}});
  for (const auto& e : t.events) line(to_json(e));
  if (t.final_choice) line(Json{{"type", "choice"}, {"stage", "final"}, {"proposal", t.final_choice->name()}});
  Json outcome{{"type", "outcome"}, {"success", t.success}};
  outcome["status"] = t.status == GameStatus::kComplete ? "complete" : "incomplete";
  if (!t.failure_reason.empty()) outcome["reason"] = t.failure_reason;
  line(outcome);
  return out;
}

std::vector<Transcript> transcripts_from_jsonl(std::string_view text) {
  std::vector<Transcript> out;
  std::optional<Transcript> cur;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      Json j = Json::parse(raw);
      auto type = j.at("type").get<std::string>();
      if (type == "game") {
        if (cur) throw Error(ErrorCode::kParse, "game line before the previous outcome line");
        cur.emplace();
        cur->config = session_config_from_json(j);
      } else {
        if (!cur) throw Error(ErrorCode::kParse, "'" + type + "' line outside a game");
        if (type == "message") {
          cur->events.push_back(event_from_json(j));
        } else if (type == "choice") {
          auto stage = j.at("stage").get<std::string>();
          auto p = proposal_from(j.at("proposal"));
          if (stage == "pre") cur->pre_choice = p;
          else if (stage == "final") cur->final_choice = p;
          else throw Error(ErrorCode::kParse, "unknown choice stage: " + stage);
        } else if (type == "outcome") {
          cur->success = j.at("success").get<bool>();
          cur->status = j.value("status", std::string("complete")) == "complete" ? GameStatus::kComplete
                                                                                  : GameStatus::kIncomplete;
          cur->failure_reason = j.value("reason", std::string());
          out.push_back(std::move(*cur));
          cur.reset();
        } else {
          throw Error(ErrorCode::kParse, "unknown line type: " + type);
        }
      }
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (cur) throw Error(ErrorCode::kParse, "transcript without an outcome line");
  return out;
}

std::string instances_to_jsonl(const std::vector<GameInstance>& instances) {
  std::string out;
  for (const auto& g : instances) {
    out += to_json(g).dump();
    out += '\n';
  }
  return out;
}

std::vector<GameInstance> instances_from_text(std::string_view text) {
  std::vector<GameInstance> out;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return out;
  try {
    if (text[first] == '[') {
      for (const auto& j : Json::parse(text)) out.push_back(instance_from_json(j));
      return out;
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(instance_from_json(Json::parse(raw)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace mindgames
