#include "mindgames/mindgames.h"

#include <cstdlib>
#include <cstring>
#include <memory>

#include "mindgames/analytics.hpp"
#include "mindgames/batch.hpp"
#include "mindgames/bot.hpp"
#include "mindgames/codec.hpp"
#include "mindgames/forge.hpp"
#include "mindgames/server.hpp"
#include "mindgames/session.hpp"

struct mg_session {
  std::unique_ptr<mindgames::Session> session;
};

struct mg_server {
  std::unique_ptr<mindgames::Server> server;
};

namespace {

using namespace mindgames;

thread_local std::string g_last_error;

mg_status fail(mg_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

mg_status status_of(ErrorCode code) { return static_cast<mg_status>(static_cast<int>(code) + 1); }

// Runs `body`, mapping exceptions onto status codes.
template <typename F>
mg_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return MG_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const Json::exception& e) {
    return fail(MG_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MG_ERR_INTERNAL, e.what());
  }
}

char* dup_string(std::string_view s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

Role role_of(mg_role r) {
  if (r == MG_ROLE_PERSUADER) return Role::kPersuader;
  if (r == MG_ROLE_TARGET) return Role::kTarget;
  throw Error(ErrorCode::kUnknownRole, "unknown role " + std::to_string(static_cast<int>(r)));
}

Json parse_json(const char* text, const char* what) {
  require(text, what);
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParse, std::string(what) + " is not valid JSON");
  return j;
}

BatchConfig batch_config_from_json(const Json& j) {
  BatchConfig c;
  if (j.contains("scenarios"))
    for (const auto& s : j.at("scenarios")) c.scenarios.push_back(s.get<std::string>());
  c.instance_seed = j.value("instance_seed", c.instance_seed);
  c.games_per_condition = j.value("games", c.games_per_condition);
  c.instances_per_scenario = j.value("instances_per_scenario", c.instances_per_scenario);
  c.canonical_only = j.value("canonical_only", c.canonical_only);
  c.persuader = parse_persuader_kind(j.value("persuader", std::string("optimal")));
  c.target = parse_target_kind(j.value("target", std::string("bot")));
  c.classifier = parse_classifier_kind(j.value("classifier", std::string("structured")));
  if (j.contains("conditions")) {
    c.conditions.clear();
    for (const auto& s : j.at("conditions")) c.conditions.push_back(parse_condition(s.get<std::string>()));
  }
  c.seed = j.value("seed", c.seed);
  c.random_draws = j.value("random_draws", c.random_draws);
  c.max_persuader_turns = j.value("max_turns", c.max_persuader_turns);
  c.workers = j.value("workers", c.workers);
  c.transcripts_path = j.value("out", std::string());
  c.metrics_path = j.value("metrics_out", std::string());
  return c;
}

Json scenario_to_json(const Scenario& s) {
  Json j;
  j["id"] = s.id;
  j["cover_story"] = s.cover_story;
  Json attrs = Json::array();
  for (const auto& a : s.attribute_names) attrs.push_back(a);
  j["attributes"] = attrs;
  return j;
}

}  // namespace

extern "C" {

const char* mg_version(void) { return "1.0.0"; }

const char* mg_last_error(void) { return g_last_error.c_str(); }

const char* mg_status_name(mg_status status) {
  if (status == MG_OK) return "ok";
  if (status == MG_ERR_INTERNAL) return "internal";
  const int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(ErrorCode::kIo)) return "unknown";
  return to_string(static_cast<ErrorCode>(code)).data();
}

void mg_string_free(char* s) { std::free(s); }

mg_status mg_scenarios(char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    Json arr = Json::array();
    for (const auto& s : scenarios()) arr.push_back(scenario_to_json(s));
    for (const auto& s : scenarios_e1()) arr.push_back(scenario_to_json(s));
    *out_json = dup_string(arr.dump());
  });
}

mg_status mg_generate(uint64_t seed, const char* scenario, int count, int canonical_only, char** out_jsonl) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out_jsonl, "out_jsonl");
    GenerateOptions opts;
    opts.canonical_only = canonical_only != 0;
    *out_jsonl = dup_string(instances_to_jsonl(generate(seed, find_scenario(scenario), count, opts)));
  });
}

mg_status mg_check(const char* instances, char** out_json) {
  return guarded([&] {
    require(instances, "instances");
    require(out_json, "out_json");
    Json arr = Json::array();
    for (const auto& g : instances_from_text(instances)) {
      Json item;
      auto report = check_instance(g);
      item["report"] = to_json(report);
      Json probes;
      if (report.hidden_size && report.witness_in_hidden) {
        auto probe = [&](CellMask revealed) {
          std::vector<Claim> claims;
          for (Cell c : revealed.cells()) claims.push_back(Claim{c.proposal, c.attribute, g.matrix.at(c)});
          return bot_choice(bot_ingest(bot_init(g), claims)).name();
        };
        probes["initial"] = probe(CellMask{});
        probes["witness"] = probe(g.witness);
        probes["full"] = probe(g.hidden);
      }
      item["probes"] = probes;
      bool probes_ok = probes.is_object() && !probes.empty() && probes["initial"] == g.p_init.name() &&
                       probes["witness"] == g.persuader_goal.name() && probes["full"] == g.p_full.name();
      item["valid"] = report.valid() && probes_ok;
      arr.push_back(item);
    }
    *out_json = dup_string(arr.dump());
  });
}

mg_status mg_p_win(int n, double* closed_form, double* dynamic_program) {
  return guarded([&] {
    if (closed_form) *closed_form = p_win_closed(n);
    if (dynamic_program) *dynamic_program = p_win_oracle(n);
  });
}

mg_status mg_p_win_argmax(int n_min, int n_max, int* out_n) {
  return guarded([&] {
    require(out_n, "out_n");
    if (n_min < 0 || n_max < n_min) throw Error(ErrorCode::kInvalidArgument, "need 0 <= n_min <= n_max");
    *out_n = p_win_argmax(n_min, n_max);
  });
}

mg_status mg_session_create(const char* config_json, mg_session** out) {
  return guarded([&] {
    require(out, "out");
    Json j = parse_json(config_json, "config_json");
    auto handle = std::make_unique<mg_session>();
    handle->session = std::make_unique<Session>(session_config_from_json(j));
    *out = handle.release();
  });
}

void mg_session_free(mg_session* session) { delete session; }

mg_status mg_session_post(mg_session* session, mg_role role, const char* text, char** out_events_json) {
  return guarded([&] {
    require(session, "session");
    require(text, "text");
    auto added = session->session->post(role_of(role), text);
    if (out_events_json) {
      Json arr = Json::array();
      for (const auto& e : added) arr.push_back(to_json(e));
      *out_events_json = dup_string(arr.dump());
    }
  });
}

mg_status mg_session_choose(mg_session* session, const char* stage, const char* proposal) {
  return guarded([&] {
    require(session, "session");
    require(stage, "stage");
    require(proposal, "proposal");
    auto p = ProposalId::from_label(std::string_view(proposal));
    if (!p) throw Error(ErrorCode::kInvalidArgument, std::string("unknown proposal: ") + proposal);
    std::string_view st(stage);
    if (st == "pre") session->session->set_pre_choice(*p);
    else if (st == "final") session->session->set_final_choice(*p);
    else throw Error(ErrorCode::kInvalidArgument, "stage must be 'pre' or 'final'");
  });
}

mg_status mg_session_finish(mg_session* session) {
  return guarded([&] {
    require(session, "session");
    session->session->finish();
  });
}

mg_status mg_session_view(const mg_session* session, mg_role role, char** out_json) {
  return guarded([&] {
    require(session, "session");
    require(out_json, "out_json");
    Role r = role_of(role);
    Json j = r == Role::kPersuader ? to_json(session->session->persuader_view())
                                   : to_json(session->session->target_view());
    *out_json = dup_string(j.dump());
  });
}

mg_status mg_session_ended(const mg_session* session, int* out_ended) {
  return guarded([&] {
    require(session, "session");
    require(out_ended, "out_ended");
    *out_ended = session->session->ended() ? 1 : 0;
  });
}

mg_status mg_session_transcript(const mg_session* session, char** out_jsonl) {
  return guarded([&] {
    require(session, "session");
    require(out_jsonl, "out_jsonl");
    *out_jsonl = dup_string(transcript_to_jsonl(session->session->transcript()));
  });
}

mg_status mg_run_batch(const char* config_json, char** out_json) {
  return guarded([&] {
    BatchConfig cfg = batch_config_from_json(parse_json(config_json, "config_json"));
    BatchResult r = run_batch(cfg);
    if (out_json) {
      int incomplete = 0;
      for (const auto& t : r.transcripts) incomplete += t.status == GameStatus::kIncomplete;
      Json j;
      j["games"] = r.transcripts.size();
      j["incomplete"] = incomplete;
      j["metrics"] = metrics_json(r.metrics)["groups"];
      j["metrics_csv"] = metrics_csv(r.metrics, AnalyzeOptions{}.group_by);
      *out_json = dup_string(j.dump());
    }
  });
}

mg_status mg_replay(const char* transcripts_jsonl, char** out_json) {
  return guarded([&] {
    require(transcripts_jsonl, "transcripts_jsonl");
    require(out_json, "out_json");
    Json arr = Json::array();
    for (const auto& t : transcripts_from_jsonl(transcripts_jsonl)) {
      auto r = rational_replay(t);
      Json j;
      j["scenario"] = t.config.instance.scenario_id;
      j["condition"] = to_string(t.config.condition);
      j["recorded_choice"] = t.final_choice ? Json(t.final_choice->name()) : Json(nullptr);
      j["replay_choice"] = r.choice.name();
      j["replay_success"] = r.success;
      j["tie"] = r.tie;
      j["agrees"] = t.final_choice && *t.final_choice == r.choice;
      j["category"] = t.final_choice ? Json(std::string(to_string(utility_category(t)))) : Json(nullptr);
      arr.push_back(j);
    }
    *out_json = dup_string(arr.dump());
  });
}

mg_status mg_analyze(const char* transcripts_jsonl, const char* options_json, char** out_json) {
  return guarded([&] {
    require(transcripts_jsonl, "transcripts_jsonl");
    require(out_json, "out_json");
    AnalyzeOptions opts;
    if (options_json && *options_json) {
      Json o = parse_json(options_json, "options_json");
      if (o.contains("group_by")) {
        opts.group_by.clear();
        for (const auto& g : o.at("group_by")) opts.group_by.push_back(g.get<std::string>());
      }
      opts.bootstrap_iterations = o.value("bootstrap_iters", opts.bootstrap_iterations);
      opts.level = o.value("level", opts.level);
      opts.seed = o.value("seed", opts.seed);
      if (o.contains("exclusion")) {
        auto m = o.at("exclusion").get<std::string>();
        if (m == "assigned") opts.exclusion = ExclusionMode::kAssigned;
        else if (m == "inferred") opts.exclusion = ExclusionMode::kInferred;
        else throw Error(ErrorCode::kInvalidArgument, "exclusion must be 'assigned' or 'inferred'");
      }
    }
    auto transcripts = transcripts_from_jsonl(transcripts_jsonl);
    auto rows = persuasion_success(transcripts, opts);
    Json j;
    j["csv"] = metrics_csv(rows, opts.group_by);
    j["report"] = metrics_json(rows);
    j["success_tidy"] = success_tidy_csv(rows, opts.group_by);
    j["moves_tidy"] = moves_tidy_csv(rows, opts.group_by);
    *out_json = dup_string(j.dump());
  });
}

mg_status mg_exclusion_filter(const char* transcripts_jsonl, const char* mode, char** out_json) {
  return guarded([&] {
    require(transcripts_jsonl, "transcripts_jsonl");
    require(mode, "mode");
    require(out_json, "out_json");
    std::string_view m(mode);
    ExclusionMode em;
    if (m == "assigned") em = ExclusionMode::kAssigned;
    else if (m == "inferred") em = ExclusionMode::kInferred;
    else throw Error(ErrorCode::kInvalidArgument, "mode must be 'assigned' or 'inferred'");
    auto transcripts = transcripts_from_jsonl(transcripts_jsonl);
    auto r = exclusion_filter(transcripts, em);
    Json j;
    j["kept"] = r.kept;
    Json ex = Json::array();
    for (const auto& [i, reason] : r.excluded) ex.push_back(Json{{"index", i}, {"reason", reason}});
    j["excluded"] = ex;
    *out_json = dup_string(j.dump());
  });
}

mg_status mg_likert_to_valence(const char* label, int* out_valence) {
  return guarded([&] {
    require(label, "label");
    require(out_valence, "out_valence");
    *out_valence = value_of(likert_to_valence(parse_likert(label)));
  });
}

mg_status mg_bootstrap_ci(const double* values, size_t count, int iterations, double level, uint64_t seed,
                          double* out_lo, double* out_hi) {
  return guarded([&] {
    require(values, "values");
    require(out_lo, "out_lo");
    require(out_hi, "out_hi");
    auto ci = bootstrap_ci(std::span<const double>(values, count), iterations, level, seed);
    *out_lo = ci.lo;
    *out_hi = ci.hi;
  });
}

mg_status mg_server_start(const char* options_json, mg_server** out) {
  return guarded([&] {
    require(out, "out");
    ServerOptions opts;
    if (options_json && *options_json) {
      Json o = parse_json(options_json, "options_json");
      opts.host = o.value("host", opts.host);
      opts.port = o.value("port", opts.port);
      opts.static_dir = o.value("static_dir", opts.static_dir);
      opts.seed = o.value("seed", opts.seed);
      opts.pool_per_scenario = o.value("pool_per_scenario", opts.pool_per_scenario);
      opts.transcripts_path = o.value("transcripts_out", opts.transcripts_path);
      opts.human_timeout_seconds = o.value("human_timeout_seconds", opts.human_timeout_seconds);
    }
    auto handle = std::make_unique<mg_server>();
    handle->server = std::make_unique<Server>(std::move(opts));
    handle->server->start();
    *out = handle.release();
  });
}

int mg_server_port(const mg_server* server) { return server ? server->server->port() : 0; }

void mg_server_stop(mg_server* server) {
  if (!server) return;
  server->server->stop();
  delete server;
}

}  // extern "C"
