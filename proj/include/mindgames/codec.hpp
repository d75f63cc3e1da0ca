#pragma once

// JSON encodings of instances, classifications, bot plans, views and
// transcripts. Key order is fixed so serialisation is byte-deterministic.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mindgames/dialogue.hpp"
#include "mindgames/forge.hpp"
#include "mindgames/session.hpp"

namespace mindgames {

using Json = nlohmann::ordered_json;

Json to_json(const GameInstance& g);
GameInstance instance_from_json(const Json& j);

Json to_json(const ConstraintReport& r);
Json to_json(const Classification& c);
Classification classification_from_json(const Json& j);
Json to_json(const ResponsePlan& p);
ResponsePlan plan_from_json(const Json& j);
Json to_json(const Fact& f);
Json valence_to_json(const ValenceVector& v);
ValenceVector valence_from_json(const Json& j);
Json cells_to_json(CellMask m);
CellMask cells_from_json(const Json& j);

Json to_json(const SessionConfig& c);
// Reads the config fields; `instance` comes from the same object.
SessionConfig session_config_from_json(const Json& j);
Json to_json(const MessageEvent& e);
MessageEvent event_from_json(const Json& j);

Json to_json(const AgentView& v);
Json to_json(const TargetView& v);

// Transcript JSONL: a "game" line, the message and choice lines in order,
// then an "outcome" line.
std::string transcript_to_jsonl(const Transcript& t);
// Parses a stream of concatenated transcripts. Throws kParse on malformed
// input.
std::vector<Transcript> transcripts_from_jsonl(std::string_view text);

// Instance corpus: a JSON array or JSONL, one object per line.
std::string instances_to_jsonl(const std::vector<GameInstance>& instances);
std::vector<GameInstance> instances_from_text(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace mindgames
