#include "mindgames/session.hpp"

#include "mindgames/classify.hpp"
#include "mindgames/forge.hpp"

namespace mindgames {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  throw Error(ErrorCode::kInvalidArgument, "unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

constexpr std::array<std::pair<std::string_view, Condition>, 2> kConditions{
    {{"hidden", Condition::kHidden}, {"revealed", Condition::kRevealed}}};
constexpr std::array<std::pair<std::string_view, Role>, 2> kRoles{
    {{"persuader", Role::kPersuader}, {"target", Role::kTarget}}};
constexpr std::array<std::pair<std::string_view, PersuaderKind>, 4> kPersuaders{
    {{"human", PersuaderKind::kHuman},
     {"optimal", PersuaderKind::kOptimal},
     {"random", PersuaderKind::kRandom},
     {"llm", PersuaderKind::kLlm}}};
constexpr std::array<std::pair<std::string_view, TargetKind>, 2> kTargets{
    {{"bot", TargetKind::kBot}, {"human", TargetKind::kHuman}}};
constexpr std::array<std::pair<std::string_view, ClassifierKind>, 3> kClassifiers{
    {{"structured", ClassifierKind::kStructured}, {"rules", ClassifierKind::kRules}, {"llm", ClassifierKind::kLlm}}};

template <typename E, std::size_t N>
std::string_view name_of(E value, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  return "?";
}

}  // namespace

std::string_view to_string(Condition c) { return name_of(c, kConditions); }
std::string_view to_string(Role r) { return name_of(r, kRoles); }
std::string_view to_string(PersuaderKind k) { return name_of(k, kPersuaders); }
std::string_view to_string(TargetKind k) { return name_of(k, kTargets); }
std::string_view to_string(ClassifierKind k) { return name_of(k, kClassifiers); }
Condition parse_condition(std::string_view s) { return parse_enum(s, kConditions, "condition"); }
Role parse_role(std::string_view s) { return parse_enum(s, kRoles, "role"); }
PersuaderKind parse_persuader_kind(std::string_view s) { return parse_enum(s, kPersuaders, "persuader kind"); }
TargetKind parse_target_kind(std::string_view s) { return parse_enum(s, kTargets, "target kind"); }
ClassifierKind parse_classifier_kind(std::string_view s) { return parse_enum(s, kClassifiers, "classifier kind"); }

Classifier default_classifier(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kStructured:
      return [](std::string_view text, const Scenario&) { return classify_structured(text); };
    case ClassifierKind::kRules:
      return [](std::string_view text, const Scenario& s) { return classify_rules(text, s); };
    case ClassifierKind::kLlm:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "the llm classifier needs a configured client");
}

Session::Session(SessionConfig config, Classifier classifier)
    : config_(std::move(config)), scenario_(&find_scenario(config_.instance.scenario_id)),
      started_(Clock::now()) {
  if (config_.max_persuader_turns < 1)
    throw Error(ErrorCode::kInvalidArgument, "max_persuader_turns must be >= 1");
  if (!check_instance(config_.instance).valid())
    throw Error(ErrorCode::kInvalidInstance, "instance fails its constraint check");
  classifier_ = classifier ? std::move(classifier) : default_classifier(config_.classifier_kind);
  if (config_.target_kind == TargetKind::kBot) bot_ = bot_init(config_.instance);
}

void Session::require_open() const {
  if (ended_) throw Error(ErrorCode::kSessionEnded, "session has ended");
}

bool Session::can_post(Role role) const {
  if (ended_) return false;
  if (role == Role::kPersuader) {
    if (persuader_turns_ >= config_.max_persuader_turns) return false;
    if (config_.target_kind == TargetKind::kBot) return true;
    return pre_choice_.has_value() && (events_.empty() || events_.back().role == Role::kTarget);
  }
  return config_.target_kind == TargetKind::kHuman && !events_.empty() &&
         events_.back().role == Role::kPersuader;
}

AgentView Session::persuader_view() const {
  AgentView v;
  v.scenario = scenario_;
  v.matrix = config_.instance.matrix;
  v.persuader_goal = config_.instance.persuader_goal;
  v.persuader_valence = config_.instance.persuader_valence;
  v.condition = config_.condition;
  v.history = events_;
  v.turns_remaining = config_.max_persuader_turns - persuader_turns_;
  if (config_.condition == Condition::kRevealed) {
    v.target_valence = config_.instance.target_valence;
    if (bot_) {
      v.target_known = bot_answer_info(*bot_);
    } else {
      std::vector<Fact> known;
      for (Cell c : config_.instance.hidden.complement().cells())
        known.push_back(Fact{c.proposal, c.attribute, config_.instance.matrix.at(c)});
      v.target_known = std::move(known);
    }
  }
  return v;
}

TargetView Session::target_view() const {
  TargetView v;
  v.scenario = scenario_;
  for (Cell c : config_.instance.hidden.complement().cells())
    v.known.push_back(Fact{c.proposal, c.attribute, config_.instance.matrix.at(c)});
  v.valence = config_.inferred_valence.value_or(config_.instance.target_valence);
  v.instructions = std::string(kTargetInstructions);
  v.history = events_;
  return v;
}

std::vector<MessageEvent> Session::post(Role role, std::string text) {
  require_open();
  if (role == Role::kPersuader) {
    if (persuader_turns_ >= config_.max_persuader_turns)
      throw Error(ErrorCode::kBudgetExhausted, "persuader turn budget exhausted");
    if (config_.target_kind == TargetKind::kHuman && !pre_choice_)
      throw Error(ErrorCode::kOrdering, "the target must make a pre-choice before messages are sent");
    if (config_.target_kind == TargetKind::kHuman && !events_.empty() && events_.back().role == Role::kPersuader)
      throw Error(ErrorCode::kOrdering, "wait for the target's answer");
  } else {
    if (config_.target_kind == TargetKind::kBot)
      throw Error(ErrorCode::kOrdering, "the bot target replies automatically");
    if (events_.empty() || events_.back().role != Role::kPersuader)
      throw Error(ErrorCode::kOrdering, "the target may only answer a persuader message");
  }

  Classification classification = classifier_(text, *scenario_);

  std::vector<MessageEvent> added;
  MessageEvent ev;
  ev.turn = static_cast<int>(events_.size());
  ev.role = role;
  ev.text = std::move(text);
  ev.classification = std::move(classification);
  added.push_back(ev);

  if (role == Role::kPersuader && bot_) {
    BotReply reply = bot_respond(*bot_, *ev.classification);
    bot_ = std::move(reply.state);
    MessageEvent answer;
    answer.turn = ev.turn + 1;
    answer.role = Role::kTarget;
    answer.text = render_response(reply.plan, *scenario_);
    answer.plan = std::move(reply.plan);
    added.push_back(std::move(answer));
  }
  for (auto& e : added) events_.push_back(e);
  if (role == Role::kPersuader) {
    ++persuader_turns_;
    if (bot_ && persuader_turns_ >= config_.max_persuader_turns) finish();
  }
  return added;
}

void Session::set_pre_choice(ProposalId proposal) {
  require_open();
  if (config_.target_kind == TargetKind::kBot)
    throw Error(ErrorCode::kInvalidArgument, "bot targets start from their initial choice");
  if (pre_choice_) throw Error(ErrorCode::kAlreadyChosen, "pre-choice already recorded");
  if (!events_.empty()) throw Error(ErrorCode::kOrdering, "pre-choice must come before any message");
  pre_choice_ = proposal;
}

void Session::set_final_choice(ProposalId proposal) {
  if (final_choice_) throw Error(ErrorCode::kAlreadyChosen, "final choice already recorded");
  require_open();
  if (config_.target_kind == TargetKind::kBot)
    throw Error(ErrorCode::kInvalidArgument, "bot targets take their final choice from the bot");
  final_choice_ = proposal;
  ended_ = true;
}

void Session::finish() {
  require_open();
  if (bot_) {
    final_choice_ = bot_choice(*bot_);
  } else if (!final_choice_) {
    status_ = GameStatus::kIncomplete;
    failure_reason_ = "ended without a final choice";
  }
  ended_ = true;
}

void Session::fail(std::string reason) {
  require_open();
  status_ = GameStatus::kIncomplete;
  failure_reason_ = std::move(reason);
  ended_ = true;
}

bool Session::expire_if_due(Clock::time_point now) {
  if (ended_ || config_.target_kind != TargetKind::kHuman || !config_.human_timeout_seconds) return false;
  std::chrono::duration<double> elapsed = now - started_;
  if (elapsed.count() < *config_.human_timeout_seconds) return false;
  fail("timeout");
  return true;
}

Transcript Session::transcript() const {
  if (!ended_) throw Error(ErrorCode::kSessionOpen, "session is still open");
  Transcript t;
  t.config = config_;
  t.events = events_;
  t.pre_choice = pre_choice_;
  t.final_choice = final_choice_;
  t.status = status_;
  t.failure_reason = failure_reason_;
  t.success = status_ == GameStatus::kComplete && final_choice_ &&
              *final_choice_ == config_.instance.persuader_goal;
  return t;
}

}  // namespace mindgames
