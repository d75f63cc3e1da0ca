#include "mindgames/batch.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "mindgames/codec.hpp"
#include "mindgames/forge.hpp"
#include "mindgames/random.hpp"

namespace mindgames {

Transcript run_game(const SessionConfig& config, PersuaderAgent& agent, Classifier classifier) {
  Session session(config, std::move(classifier));
  try {
    while (session.can_post(Role::kPersuader)) {
      auto message = agent.next_message(session.persuader_view());
      if (!message) break;
      session.post(Role::kPersuader, std::move(*message));
    }
    if (!session.ended()) session.finish();
  } catch (const Error& e) {
    if (!session.ended()) session.fail(std::string(to_string(e.code())) + ": " + e.what());
  }
  return session.transcript();
}

namespace {

std::uint64_t scenario_stream(const std::string& id) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

BatchResult run_batch(const BatchConfig& config) {
  if (config.games_per_condition < 1) throw Error(ErrorCode::kInvalidArgument, "games per condition must be >= 1");
  if (config.conditions.empty()) throw Error(ErrorCode::kInvalidArgument, "no conditions given");
  if (config.instances_per_scenario < 1) throw Error(ErrorCode::kInvalidArgument, "instances per scenario must be >= 1");
  if (config.target != TargetKind::kBot) throw Error(ErrorCode::kInvalidArgument, "batch games need a bot target");
  if (config.persuader == PersuaderKind::kHuman)
    throw Error(ErrorCode::kInvalidArgument, "batch games need an automated persuader");

  std::vector<std::string> ids = config.scenarios;
  if (ids.empty())
    for (const auto& s : scenarios()) ids.push_back(s.id);

  GenerateOptions gen;
  gen.canonical_only = config.canonical_only;
  std::vector<std::vector<GameInstance>> pools;
  for (const auto& id : ids)
    pools.push_back(generate(mix_seed(config.instance_seed, scenario_stream(id)), find_scenario(id),
                             config.instances_per_scenario, gen));

  std::shared_ptr<ChatBackend> llm = config.llm;
  const bool needs_llm = config.persuader == PersuaderKind::kLlm || config.classifier == ClassifierKind::kLlm;
  if (needs_llm && !llm) llm = std::make_shared<HttpChatBackend>(llm_config_from_env());

  const auto games = static_cast<std::size_t>(config.games_per_condition);
  const std::size_t total = games * config.conditions.size();
  std::vector<Transcript> out(total);

  auto play = [&](std::size_t slot) {
    const std::size_t c = slot / games;
    const std::size_t g = slot % games;
    const std::size_t s = g % ids.size();
    const auto& pool = pools[s];
    SessionConfig sc;
    sc.instance = pool[(g / ids.size()) % pool.size()];
    sc.condition = config.conditions[c];
    sc.persuader_kind = config.persuader;
    sc.target_kind = TargetKind::kBot;
    sc.classifier_kind = config.classifier;
    sc.seed = mix_seed(config.seed, slot);
    sc.random_draws = config.random_draws;
    sc.max_persuader_turns = config.persuader == PersuaderKind::kRandom
                                 ? std::max(config.max_persuader_turns, config.random_draws)
                                 : config.max_persuader_turns;

    Classifier classifier;
    if (config.classifier == ClassifierKind::kLlm) {
      classifier = [llm](std::string_view text, const Scenario& scenario) {
        return classify_llm(text, scenario, *llm, 2);
      };
    }
    std::unique_ptr<PersuaderAgent> agent;
    switch (config.persuader) {
      case PersuaderKind::kOptimal: agent = std::make_unique<OptimalPersuader>(); break;
      case PersuaderKind::kRandom: agent = std::make_unique<RandomPersuader>(sc.seed, sc.random_draws); break;
      case PersuaderKind::kLlm: agent = std::make_unique<LlmPersuader>(llm, 300); break;
      case PersuaderKind::kHuman: break;
    }
    out[slot] = run_game(sc, *agent, std::move(classifier));
  };

  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(total)));
  if (workers == 1) {
    for (std::size_t i = 0; i < total; ++i) play(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < total;) {
          try {
            play(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  BatchResult result;
  result.transcripts = std::move(out);
  AnalyzeOptions opts;
  opts.seed = config.seed;
  result.metrics = persuasion_success(result.transcripts, opts);

  if (!config.transcripts_path.empty()) {
    std::string text;
    for (const auto& t : result.transcripts) text += transcript_to_jsonl(t);
    write_file(config.transcripts_path, text);
  }
  if (!config.metrics_path.empty()) write_file(config.metrics_path, metrics_csv(result.metrics, opts.group_by));
  return result;
}

}  // namespace mindgames
