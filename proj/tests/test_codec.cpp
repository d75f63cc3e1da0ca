#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "support.hpp"
#include "mindgames/codec.hpp"
#include "mindgames/session.hpp"

using namespace mgtest;

namespace {
Transcript sample_transcript(bool human) {
  SessionConfig cfg;
  cfg.instance = worked_example();
  cfg.target_kind = human ? TargetKind::kHuman : TargetKind::kBot;
  cfg.persuader_id = "p1";
  cfg.target_id = "t1";
  if (human) cfg.inferred_valence = ValenceVector{Valence::kLike, Valence::kDislike, Valence::kIndifferent};
  Session s(cfg);
  if (human) s.set_pre_choice(P('C'));
  s.post(Role::kPersuader, "DISCLOSE A 1 +1\nASK-INFO B\nASK-VALUES\nASK-CHOICE");
  if (human) {
    s.post(Role::kTarget, "CHAT thanks");
    s.set_final_choice(P('A'));
  } else {
    s.finish();
  }
  return s.transcript();
}
}  // namespace

TEST_CASE("instance round-trip") {
  for (const auto& g : corpus()) REQUIRE(instance_from_json(to_json(g)) == g);
  auto g = worked_example();
  CHECK(instance_from_json(to_json(g)) == g);
  CHECK(to_json(g)["persuader_valence"].is_null());
  CHECK(to_json(g).dump() == to_json(instance_from_json(to_json(g))).dump());
}

TEST_CASE("instance parse errors") {
  auto j = to_json(worked_example());
  j["matrix"] = Json::array();
  CHECK_THROWS_AS(instance_from_json(j), Error);
  auto k = to_json(worked_example());
  k.erase("p_init");
  CHECK_THROWS_AS(instance_from_json(k), Error);
}

TEST_CASE("cells and valence round-trip") {
  Rng rng(501);
  for (int i = 0; i < 500; ++i) {
    auto m = random_mask(rng);
    REQUIRE(cells_from_json(cells_to_json(m)) == m);
    auto v = random_valence(rng);
    REQUIRE(valence_from_json(valence_to_json(v)) == v);
  }
}

TEST_CASE("classification and plan round-trip") {
  Classification c;
  c.disclosures = {Claim{P('A'), AttributeId(2), Effect::kDecrease}};
  c.info_appeals = {std::nullopt, P('C')};
  c.preference_query = true;
  c.normalize();
  CHECK(classification_from_json(to_json(c)) == c);
  auto t = sample_transcript(false);
  for (const auto& e : t.events)
    if (e.plan) CHECK(plan_from_json(to_json(*e.plan)) == *e.plan);
}

TEST_CASE("transcript JSONL round-trip") {
  for (bool human : {false, true}) {
    auto t = sample_transcript(human);
    auto text = transcript_to_jsonl(t);
    auto back = transcripts_from_jsonl(text);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == t);
    CHECK(transcript_to_jsonl(back[0]) == text);
    // First line is the game, last is the outcome.
    CHECK(text.find("\"type\":\"game\"") < text.find("\"type\":\"outcome\""));
  }
  auto two = transcript_to_jsonl(sample_transcript(false)) + transcript_to_jsonl(sample_transcript(true));
  CHECK(transcripts_from_jsonl(two).size() == 2);
}

TEST_CASE("transcript JSONL parse errors") {
  CHECK_THROWS_AS(transcripts_from_jsonl("{not json"), Error);
  auto text = transcript_to_jsonl(sample_transcript(false));
  auto first_nl = text.find('\n');
  try {
    transcripts_from_jsonl(text.substr(first_nl + 1));
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
  }
}

TEST_CASE("instances as JSONL or JSON array") {
  const auto& gs = corpus();
  auto jsonl = instances_to_jsonl(gs);
  CHECK(instances_from_text(jsonl) == gs);
  Json arr = Json::array();
  for (const auto& g : gs) arr.push_back(to_json(g));
  CHECK(instances_from_text(arr.dump()) == gs);
}

TEST_CASE("file helpers") {
  auto path = (std::filesystem::temp_directory_path() / "mg_codec_test.txt").string();
  write_file(path, "abc\n");
  CHECK(read_file(path) == "abc\n");
  std::remove(path.c_str());
  try {
    read_file("/nonexistent/dir/file");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}

TEST_CASE("serialisation is byte-deterministic") {
  CHECK(transcript_to_jsonl(sample_transcript(true)) == transcript_to_jsonl(sample_transcript(true)));
}
