// Command-line front end. Talks to the library only through the C API.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mindgames/mindgames.h"

namespace {

using Json = nlohmann::ordered_json;

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { mg_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

class Failure : public std::runtime_error {
 public:
  Failure(mg_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  mg_status status;
};

void check(mg_status s) {
  if (s != MG_OK) throw Failure(s, std::string(mg_status_name(s)) + ": " + mg_last_error());
}

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(MG_ERR_IO, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure(MG_ERR_IO, "cannot write " + path);
  out << text;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

void print_metrics(const Json& groups) {
  std::printf("%-34s %6s %6s %9s %17s %9s\n", "group", "games", "units", "success", "95% CI", "rational");
  for (const auto& g : groups) {
    std::string key;
    for (const auto& [k, v] : g.at("group").items()) key += (key.empty() ? "" : "/") + v.get<std::string>();
    const auto& ci = g.at("persuasion_ci95");
    std::printf("%-34s %6d %6d %9.4f  [%.4f, %.4f] %9.4f\n", key.c_str(), g.at("games").get<int>(),
                g.at("participants").get<int>(), g.at("persuasion_success").get<double>(), ci[0].get<double>(),
                ci[1].get<double>(), g.at("rational_bot_success").get<double>());
  }
}

volatile std::sig_atomic_t g_stop = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MindGames persuasion-game toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate constraint-satisfying game instances (JSONL)");
  std::uint64_t gen_seed = 0;
  std::string gen_scenario = "llm", gen_out;
  int gen_count = 40;
  bool gen_canonical = false;
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--scenario", gen_scenario, "Scenario id (llm, moon, ocean, education, lunch, or *-e1)");
  gen->add_option("--count", gen_count, "Number of instances");
  gen->add_flag("--canonical-only", gen_canonical, "Keep only instances whose sole winning set is the witness");
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  // check
  auto* chk = app.add_subcommand("check", "Validate instances against the generation constraints");
  std::string chk_in = "-";
  chk->add_option("--in", chk_in, "Instances file (JSON array or JSONL; - for stdin)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run automated persuader vs. bot games");
  std::string sim_persuader = "optimal", sim_target = "bot", sim_classifier = "structured", sim_out, sim_metrics;
  std::vector<std::string> sim_conditions{"hidden", "revealed"}, sim_scenarios;
  int sim_games = 200, sim_draws = 6, sim_workers = 1, sim_instances = 40, sim_turns = 10;
  std::uint64_t sim_seed = 0, sim_instance_seed = 0;
  bool sim_canonical = false;
  sim->add_option("--persuader", sim_persuader, "optimal | random | llm");
  sim->add_option("--target", sim_target, "bot");
  sim->add_option("--condition", sim_conditions, "hidden and/or revealed (repeatable)");
  sim->add_option("--games", sim_games, "Games per condition");
  sim->add_option("--seed", sim_seed, "Game seed");
  sim->add_option("--instance-seed", sim_instance_seed, "Instance generation seed");
  sim->add_option("--scenario", sim_scenarios, "Scenario ids (default: all five)");
  sim->add_option("--instances-per-scenario", sim_instances, "Distinct instances per scenario");
  sim->add_option("--classifier", sim_classifier, "structured | rules | llm");
  sim->add_option("--draws", sim_draws, "Disclosures drawn by the random persuader");
  sim->add_option("--max-turns", sim_turns, "Persuader turn budget");
  sim->add_flag("--canonical-only", sim_canonical, "Use canonical instances only");
  sim->add_option("--workers", sim_workers, "Worker threads");
  sim->add_option("--out", sim_out, "Transcript JSONL path");
  sim->add_option("--metrics-out", sim_metrics, "Metrics CSV path");

  // baseline
  auto* base = app.add_subcommand("baseline", "Random-disclosure win probability by n");
  int base_nmax = 30;
  base->add_option("--n-max", base_nmax, "Largest n to tabulate");

  // replay
  auto* rep = app.add_subcommand("replay", "Replay transcripts through the rational bot");
  std::string rep_in = "-";
  rep->add_option("--in", rep_in, "Transcript JSONL (- for stdin)");

  // analyze
  auto* ana = app.add_subcommand("analyze", "Grouped success metrics with bootstrap CIs");
  std::string ana_in = "-", ana_group = "persuader,condition,mode", ana_out, ana_report, ana_tidy, ana_exclusion;
  int ana_iters = 10000;
  std::uint64_t ana_seed = 0;
  ana->add_option("--in", ana_in, "Transcript JSONL (- for stdin)");
  ana->add_option("--group-by", ana_group, "Comma list of persuader, condition, mode, scenario, target, tie");
  ana->add_option("--bootstrap-iters", ana_iters, "Bootstrap resamples");
  ana->add_option("--seed", ana_seed, "Bootstrap seed");
  ana->add_option("--exclusion", ana_exclusion, "assigned | inferred: drop human targets failing the pre-choice check");
  ana->add_option("--out", ana_out, "Metrics CSV path (default stdout)");
  ana->add_option("--report", ana_report, "JSON report path");
  ana->add_option("--tidy-prefix", ana_tidy, "Write <prefix>success.csv and <prefix>moves.csv");

  // serve
  auto* srv = app.add_subcommand("serve", "Run the HTTP/WebSocket session service");
  int srv_port = 8080;
  std::string srv_host = "127.0.0.1", srv_static, srv_transcripts;
  std::uint64_t srv_seed = 0;
  double srv_timeout = 0;
  srv->add_option("--port", srv_port, "Listen port (0 picks one)");
  srv->add_option("--host", srv_host, "Listen address");
  srv->add_option("--static-dir", srv_static, "Directory of static files for the web client");
  srv->add_option("--seed", srv_seed, "Instance pool seed");
  srv->add_option("--transcripts-out", srv_transcripts, "Append ended sessions here (JSONL)");
  srv->add_option("--human-timeout", srv_timeout, "Seconds before an unfinished human-target game expires");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Owned out;
      check(mg_generate(gen_seed, gen_scenario.c_str(), gen_count, gen_canonical ? 1 : 0, &out.p));
      emit(gen_out, out.str());
    } else if (*chk) {
      std::string text = slurp(chk_in);
      Owned out;
      check(mg_check(text.c_str(), &out.p));
      Json reports = Json::parse(out.str());
      int bad = 0;
      for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        if (!r.at("valid").get<bool>()) {
          ++bad;
          std::printf("instance %zu: INVALID %s probes=%s\n", i, r.at("report").dump().c_str(),
                      r.at("probes").dump().c_str());
        }
      }
      std::printf("%zu instances, %zu valid, %d invalid\n", reports.size(), reports.size() - bad, bad);
      return bad == 0 ? 0 : 1;
    } else if (*sim) {
      Json cfg;
      cfg["persuader"] = sim_persuader;
      cfg["target"] = sim_target;
      cfg["classifier"] = sim_classifier;
      cfg["conditions"] = sim_conditions;
      cfg["games"] = sim_games;
      cfg["seed"] = sim_seed;
      cfg["instance_seed"] = sim_instance_seed;
      if (!sim_scenarios.empty()) cfg["scenarios"] = sim_scenarios;
      cfg["instances_per_scenario"] = sim_instances;
      cfg["random_draws"] = sim_draws;
      cfg["max_turns"] = sim_turns;
      cfg["canonical_only"] = sim_canonical;
      cfg["workers"] = sim_workers;
      if (!sim_out.empty()) cfg["out"] = sim_out;
      if (!sim_metrics.empty()) cfg["metrics_out"] = sim_metrics;
      Owned out;
      check(mg_run_batch(cfg.dump().c_str(), &out.p));
      Json r = Json::parse(out.str());
      std::printf("%d games (%d incomplete)\n", r.at("games").get<int>(), r.at("incomplete").get<int>());
      print_metrics(r.at("metrics"));
    } else if (*base) {
      if (base_nmax < 0) throw Failure(MG_ERR_INVALID_ARGUMENT, "--n-max must be >= 0");
      std::printf("%4s %14s %14s\n", "n", "closed_form", "dp_oracle");
      for (int n = 0; n <= base_nmax; ++n) {
        double closed = 0, dp = 0;
        check(mg_p_win(n, &closed, &dp));
        std::printf("%4d %14.10f %14.10f\n", n, closed, dp);
      }
      if (base_nmax >= 1) {
        int best = 0;
        check(mg_p_win_argmax(1, base_nmax, &best));
        double p = 0;
        check(mg_p_win(best, &p, nullptr));
        std::printf("argmax n = %d, p_win = %.4f\n", best, p);
      }
    } else if (*rep) {
      std::string text = slurp(rep_in);
      Owned out;
      check(mg_replay(text.c_str(), &out.p));
      Json rows = Json::parse(out.str());
      int agree = 0, success = 0, with_choice = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string recorded = r.at("recorded_choice").is_null() ? "-" : r.at("recorded_choice").get<std::string>();
        const std::string category = r.at("category").is_null() ? "-" : r.at("category").get<std::string>();
        std::printf("game %zu %s/%s recorded=%s replay=%s success=%d tie=%d category=%s\n", i,
                    r.at("scenario").get<std::string>().c_str(), r.at("condition").get<std::string>().c_str(),
                    recorded.c_str(), r.at("replay_choice").get<std::string>().c_str(),
                    r.at("replay_success").get<bool>() ? 1 : 0, r.at("tie").get<bool>() ? 1 : 0, category.c_str());
        agree += r.at("agrees").get<bool>();
        success += r.at("replay_success").get<bool>();
        with_choice += !r.at("recorded_choice").is_null();
      }
      std::printf("%zu games; replay agrees with %d of %d recorded choices; rational bot success %d\n", rows.size(),
                  agree, with_choice, success);
    } else if (*ana) {
      std::string text = slurp(ana_in);
      Json opts;
      opts["group_by"] = split_csv(ana_group);
      opts["bootstrap_iters"] = ana_iters;
      opts["seed"] = ana_seed;
      if (!ana_exclusion.empty()) opts["exclusion"] = ana_exclusion;
      Owned out;
      check(mg_analyze(text.c_str(), opts.dump().c_str(), &out.p));
      Json r = Json::parse(out.str());
      emit(ana_out, r.at("csv").get<std::string>());
      if (!ana_report.empty()) emit(ana_report, r.at("report").dump(2) + "\n");
      if (!ana_tidy.empty()) {
        emit(ana_tidy + "success.csv", r.at("success_tidy").get<std::string>());
        emit(ana_tidy + "moves.csv", r.at("moves_tidy").get<std::string>());
      }
    } else if (*srv) {
      Json opts;
      opts["host"] = srv_host;
      opts["port"] = srv_port;
      opts["seed"] = srv_seed;
      if (!srv_static.empty()) opts["static_dir"] = srv_static;
      if (!srv_transcripts.empty()) opts["transcripts_out"] = srv_transcripts;
      if (srv_timeout > 0) opts["human_timeout_seconds"] = srv_timeout;
      mg_server* server = nullptr;
      check(mg_server_start(opts.dump().c_str(), &server));
      std::printf("listening on http://%s:%d\n", srv_host.c_str(), mg_server_port(server));
      std::fflush(stdout);
      std::signal(SIGINT, [](int) { g_stop = 1; });
      std::signal(SIGTERM, [](int) { g_stop = 1; });
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      mg_server_stop(server);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.what());
    return f.status == MG_ERR_INVALID_ARGUMENT || f.status == MG_ERR_PARSE ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
