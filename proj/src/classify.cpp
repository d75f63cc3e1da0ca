#include "mindgames/classify.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>

namespace mindgames {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_error(std::string_view token, std::string_view line) {
  throw Error(ErrorCode::kParse,
              "unexpected token '" + std::string(token) + "' in line '" + std::string(line) + "'");
}

ProposalId parse_proposal(std::string_view tok, std::string_view line) {
  if (tok.size() == 1 && tok[0] >= 'A' && tok[0] <= 'C') return ProposalId(tok[0] - 'A');
  parse_error(tok, line);
}

}  // namespace

Classification classify_structured(std::string_view text) {
  Classification c;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;

    auto toks = split_ws(line);
    std::string_view cmd = toks[0];
    if (cmd == "DISCLOSE") {
      if (toks.size() < 4) parse_error(toks.size() < 2 ? "DISCLOSE" : toks.back(), line);
      if (toks.size() > 4) parse_error(toks[4], line);
      ProposalId p = parse_proposal(toks[1], line);
      if (toks[2].size() != 1 || toks[2][0] < '0' || toks[2][0] > '2') parse_error(toks[2], line);
      AttributeId a(toks[2][0] - '0');
      Effect e;
      if (toks[3] == "+1") e = Effect::kIncrease;
      else if (toks[3] == "0") e = Effect::kNone;
      else if (toks[3] == "-1") e = Effect::kDecrease;
      else parse_error(toks[3], line);
      c.disclosures.push_back(Claim{p, a, e});
    } else if (cmd == "ASK-INFO") {
      if (toks.size() > 2) parse_error(toks[2], line);
      if (toks.size() == 2) c.info_appeals.emplace_back(parse_proposal(toks[1], line));
      else c.info_appeals.emplace_back(std::nullopt);
    } else if (cmd == "ASK-VALUES") {
      if (toks.size() > 1) parse_error(toks[1], line);
      c.motivational_appeal = true;
    } else if (cmd == "ASK-CHOICE") {
      if (toks.size() > 1) parse_error(toks[1], line);
      c.preference_query = true;
    } else if (cmd == "CHAT") {
      // Free text carries no game content.
    } else {
      parse_error(cmd, line);
    }
    if (end == text.size()) break;
  }
  c.normalize();
  return c;
}

std::string render_structured(const Classification& c) {
  std::ostringstream out;
  bool first = true;
  auto line = [&](const std::string& s) {
    if (!first) out << '\n';
    out << s;
    first = false;
  };
  for (const auto& d : c.disclosures)
    line("DISCLOSE " + d.proposal.name() + " " + std::to_string(d.attribute.index()) + " " +
         signed_effect(d.effect));
  for (const auto& scope : c.info_appeals) line(scope ? "ASK-INFO " + scope->name() : std::string("ASK-INFO"));
  if (c.motivational_appeal) line("ASK-VALUES");
  if (c.preference_query) line("ASK-CHOICE");
  if (first) line("CHAT");
  return out.str();
}

// ---------------------------------------------------------------------------
// Rule-based free-text classifier.

namespace {

struct Token {
  std::string lower;
  std::string original;
};

enum class EventKind { kProposal, kVerb, kAttribute };
struct Event {
  EventKind kind;
  int value;  // proposal index, effect value, or attribute index
};

struct Sentence {
  std::string text;
  bool question_mark = false;
};

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    bool decimal = ch == '.' && i > 0 && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                   std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if ((ch == '.' && !decimal) || ch == '!' || ch == '?' || ch == ';' || ch == '\n') {
      if (!trim(cur).empty()) out.push_back(Sentence{cur, ch == '?'});
      else if (ch == '?' && !out.empty()) out.back().question_mark = true;
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty()) out.push_back(Sentence{cur, false});
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(Token{to_lower(cur), cur});
    cur.clear();
  };
  for (char ch : s) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '\'' || ch == '+' || ch == '-') cur += ch;
    else flush();
  }
  flush();
  return out;
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

bool is_negation(std::string_view w) {
  return w == "not" || w == "never" || w == "no" || w.ends_with("n't");
}

// +1 / -1 for directional verbs; nullopt otherwise.
std::optional<int> verb_direction(std::string_view w) {
  static const std::array<std::string_view, 10> up = {"increas", "boost", "raise", "rais", "improv",
                                                      "strengthen", "enhanc", "grow", "help", "benefit"};
  static const std::array<std::string_view, 11> down = {"decreas", "reduc", "lower", "hurt", "harm", "weaken",
                                                        "diminish", "worsen", "damag", "cut", "shrink"};
  for (auto p : up)
    if (starts_with(w, p)) return 1;
  for (auto p : down)
    if (starts_with(w, p)) return -1;
  return std::nullopt;
}

bool contains_any(std::string_view s, std::initializer_list<std::string_view> needles) {
  for (auto n : needles)
    if (s.find(n) != std::string_view::npos) return true;
  return false;
}

bool contains_word(const std::vector<Token>& toks, std::initializer_list<std::string_view> words) {
  for (const auto& t : toks)
    for (auto w : words)
      if (t.lower == w) return true;
  return false;
}

const std::set<std::string_view>& verbish_after_a() {
  static const std::set<std::string_view> s = {"will", "would", "increases", "decreases", "raises", "lowers",
                                               "reduces", "boosts", "has", "does", "doesn't", "also", "is",
                                               "improves", "hurts", "harms", "keeps", "gives", "and", "or"};
  return s;
}

void classify_sentence(const Sentence& sentence, const Scenario& scenario, Classification& out) {
  std::string lower = to_lower(sentence.text);

  // Mask attribute phrases first so verbs inside names ("economic benefits")
  // are not read as effects.
  struct Span {
    std::size_t begin, end;
    int attribute;
  };
  std::vector<Span> spans;
  std::vector<std::pair<std::string_view, int>> keywords;
  for (int a = 0; a < kAttributes; ++a)
    for (const auto& k : scenario.attribute_keywords[a]) keywords.emplace_back(k, a);
  std::stable_sort(keywords.begin(), keywords.end(),
                   [](const auto& x, const auto& y) { return x.first.size() > y.first.size(); });
  std::string masked = lower;
  for (const auto& [kw, a] : keywords) {
    std::size_t pos = 0;
    while ((pos = masked.find(kw, pos)) != std::string::npos) {
      spans.push_back(Span{pos, pos + kw.size(), a});
      std::fill(masked.begin() + static_cast<long>(pos), masked.begin() + static_cast<long>(pos + kw.size()), '#');
      pos += kw.size();
    }
  }
  std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) { return x.begin < y.begin; });

  // Rebuild a token stream where each attribute span is one marker token.
  std::vector<Event> events;
  std::vector<Token> toks;
  {
    std::size_t cursor = 0;
    auto emit_text = [&](std::size_t b, std::size_t e) {
      auto part = tokenize(std::string_view(sentence.text).substr(b, e - b));
      for (auto& t : part) toks.push_back(std::move(t));
    };
    for (const auto& sp : spans) {
      emit_text(cursor, sp.begin);
      toks.push_back(Token{"#attr" + std::to_string(sp.attribute), ""});
      cursor = sp.end;
    }
    emit_text(cursor, sentence.text.size());
  }

  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (starts_with(t.lower, "#attr")) {
      events.push_back(Event{EventKind::kAttribute, t.lower.back() - '0'});
      continue;
    }
    if (t.lower == "proposal" || t.lower == "proposals" || t.lower == "option" || t.lower == "options" ||
        t.lower == "policy" || t.lower == "policies") {
      std::size_t j = i + 1;
      while (j < toks.size()) {
        const auto& n = toks[j].lower;
        if (n.size() == 1 && n[0] >= 'a' && n[0] <= 'c') {
          events.push_back(Event{EventKind::kProposal, n[0] - 'a'});
        } else if (n != "and" && n != "or") {
          break;
        }
        ++j;
      }
      i = j - 1;
      continue;
    }
    if (t.original.size() == 1 && t.original[0] >= 'A' && t.original[0] <= 'C') {
      if (t.original[0] == 'A' && i == 0 &&
          (i + 1 >= toks.size() || !verbish_after_a().contains(toks[i + 1].lower)))
        continue;
      events.push_back(Event{EventKind::kProposal, t.original[0] - 'A'});
      continue;
    }
    if (t.lower == "no" && i + 1 < toks.size() && (toks[i + 1].lower == "effect" || toks[i + 1].lower == "impact" ||
                                                  toks[i + 1].lower == "change")) {
      events.push_back(Event{EventKind::kVerb, 0});
      continue;
    }
    if (t.lower == "unchanged" || t.lower == "unaffected") {
      events.push_back(Event{EventKind::kVerb, 0});
      continue;
    }
    if ((t.lower == "affect" || t.lower == "change" || t.lower == "impact") && i > 0 &&
        is_negation(toks[i - 1].lower)) {
      events.push_back(Event{EventKind::kVerb, 0});
      continue;
    }
    if (auto dir = verb_direction(t.lower)) {
      bool negated = i > 0 && is_negation(toks[i - 1].lower);
      events.push_back(Event{EventKind::kVerb, negated ? 0 : *dir});
    }
  }

  // Claims: the latest proposal group, then the latest verb, then an attribute.
  std::vector<int> props;
  bool props_open = false;  // still collecting a run of adjacent proposal mentions
  std::optional<int> verb;
  for (const auto& ev : events) {
    switch (ev.kind) {
      case EventKind::kProposal:
        if (!props_open) {
          props.clear();
          verb.reset();
        }
        props.push_back(ev.value);
        props_open = true;
        break;
      case EventKind::kVerb:
        verb = ev.value;
        props_open = false;
        break;
      case EventKind::kAttribute:
        props_open = false;
        if (!props.empty() && verb) {
          for (int p : props)
            out.disclosures.push_back(Claim{ProposalId(p), AttributeId(ev.value), effect_from_int(*verb)});
        }
        break;
    }
  }

  // Appeals.
  std::vector<Token> words = tokenize(sentence.text);
  static const std::set<std::string_view> openers = {"what", "which", "how", "do", "does", "did", "would",
                                                     "could", "can", "are", "is", "why", "who", "whats",
                                                     "what's", "tell", "any"};
  bool question = sentence.question_mark || (!words.empty() && openers.contains(words.front().lower));
  if (!question) return;

  std::set<int> mentioned;
  for (const auto& ev : events)
    if (ev.kind == EventKind::kProposal) mentioned.insert(ev.value);

  bool pref = contains_any(lower, {"choos", "choice", "pick", "which proposal", "which option", "going with",
                                   "going to go", "favor", "favour"}) ||
              (contains_word(words, {"prefer", "preference", "preferred"}) &&
               (contains_any(lower, {"proposal", "option", "which", "what", "are you"})));
  bool info = contains_any(lower, {"know", "information", "info", "aware", "heard", "told", "tell me about",
                                   "what does", "what do the proposals", "what can you see", "see about"});
  bool motive = contains_word(words, {"like", "dislike", "likes", "dislikes", "value", "values", "care", "feel",
                                      "want", "important", "matter", "matters", "attributes"}) &&
                !pref;
  if (contains_word(words, {"feel"}) && pref) motive = true;

  if (pref) out.preference_query = true;
  if (info) {
    if (mentioned.size() == 1) out.info_appeals.emplace_back(ProposalId(*mentioned.begin()));
    else out.info_appeals.emplace_back(std::nullopt);
  }
  if (motive) out.motivational_appeal = true;
}

}  // namespace

Classification classify_rules(std::string_view text, const Scenario& scenario) {
  Classification c;
  for (const auto& s : split_sentences(text)) classify_sentence(s, scenario, c);
  c.normalize();
  return c;
}

}  // namespace mindgames
