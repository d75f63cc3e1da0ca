/* C interface to the MindGames library.
 *
 * Structured values cross the boundary as UTF-8 JSON or JSONL text. Strings
 * returned through `char**` out-parameters are owned by the caller and must be
 * released with mg_string_free. On failure a function returns a non-zero
 * mg_status and mg_last_error() describes it (per thread, valid until the
 * next call on that thread). */
#ifndef MINDGAMES_H
#define MINDGAMES_H

#include <stddef.h>
#include <stdint.h>

#if defined(MG_BUILDING_LIBRARY)
#define MG_API __attribute__((visibility("default")))
#else
#define MG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mg_status {
  MG_OK = 0,
  MG_ERR_INVALID_ARGUMENT = 1,
  MG_ERR_PARSE = 2,
  MG_ERR_INVALID_INSTANCE = 3,
  MG_ERR_SEARCH_EXHAUSTED = 4,
  MG_ERR_TAXONOMY_UNDEFINED = 5,
  MG_ERR_OUT_OF_TURN = 6,
  MG_ERR_BUDGET_EXHAUSTED = 7,
  MG_ERR_SESSION_ENDED = 8,
  MG_ERR_SESSION_OPEN = 9,
  MG_ERR_ALREADY_CHOSEN = 10,
  MG_ERR_UNKNOWN_ROLE = 11,
  MG_ERR_TRANSPORT = 12,
  MG_ERR_TIMEOUT = 13,
  MG_ERR_SCHEMA = 14,
  MG_ERR_NO_WINNING_SUBSET = 15,
  MG_ERR_POOL_EXHAUSTED = 16,
  MG_ERR_MISSING_CLASSIFICATION = 17,
  MG_ERR_IO = 18,
  MG_ERR_INTERNAL = 99
} mg_status;

typedef enum mg_role { MG_ROLE_PERSUADER = 0, MG_ROLE_TARGET = 1 } mg_role;

typedef struct mg_session mg_session;
typedef struct mg_server mg_server;

MG_API const char* mg_version(void);
MG_API const char* mg_last_error(void);
/* Stable snake_case name, e.g. "out_of_turn". */
MG_API const char* mg_status_name(mg_status status);
MG_API void mg_string_free(char* s);

/* ---- instances ---- */

/* JSON array of {id, cover_story, attributes}. */
MG_API mg_status mg_scenarios(char** out_json);
/* Instances as JSONL, one per line. */
MG_API mg_status mg_generate(uint64_t seed, const char* scenario, int count, int canonical_only, char** out_jsonl);
/* Input: JSON array or JSONL of instances. Output: JSON array with one
 * {"report": {...}, "probes": {...}, "valid": bool} per instance; probes are
 * the bot's choices with nothing, the witness, and everything disclosed. */
MG_API mg_status mg_check(const char* instances, char** out_json);

/* ---- random baseline ---- */

MG_API mg_status mg_p_win(int n, double* closed_form, double* dynamic_program);
MG_API mg_status mg_p_win_argmax(int n_min, int n_max, int* out_n);

/* ---- sessions ---- */

/* config_json: a session config object with the instance under "instance"
 * (the "game" line of a transcript is accepted as is). */
MG_API mg_status mg_session_create(const char* config_json, mg_session** out);
MG_API void mg_session_free(mg_session* session);
/* Appended events as a JSON array (a bot reply is included). */
MG_API mg_status mg_session_post(mg_session* session, mg_role role, const char* text, char** out_events_json);
/* stage: "pre" or "final"; proposal: "A", "B" or "C". */
MG_API mg_status mg_session_choose(mg_session* session, const char* stage, const char* proposal);
MG_API mg_status mg_session_finish(mg_session* session);
MG_API mg_status mg_session_view(const mg_session* session, mg_role role, char** out_json);
MG_API mg_status mg_session_ended(const mg_session* session, int* out_ended);
MG_API mg_status mg_session_transcript(const mg_session* session, char** out_jsonl);

/* ---- batch and analysis ---- */

/* config_json keys: scenarios, instance_seed, games, instances_per_scenario,
 * canonical_only, persuader, target, classifier, conditions, seed,
 * random_draws, max_turns, workers, out, metrics_out. Returns
 * {"games", "incomplete", "metrics": [...]}; the transcripts are written to
 * "out" when given. */
MG_API mg_status mg_run_batch(const char* config_json, char** out_json);
/* Per game: recorded and replayed choices, replay success, tie flag and the
 * utility category. */
MG_API mg_status mg_replay(const char* transcripts_jsonl, char** out_json);
/* options_json keys: group_by (array), bootstrap_iters, level, seed,
 * exclusion ("assigned" | "inferred"). Returns {"csv", "report",
 * "success_tidy", "moves_tidy"}. */
MG_API mg_status mg_analyze(const char* transcripts_jsonl, const char* options_json, char** out_json);
/* mode: "assigned" or "inferred". Returns {"kept": [...], "excluded": [...]}. */
MG_API mg_status mg_exclusion_filter(const char* transcripts_jsonl, const char* mode, char** out_json);
MG_API mg_status mg_likert_to_valence(const char* label, int* out_valence);
MG_API mg_status mg_bootstrap_ci(const double* values, size_t count, int iterations, double level, uint64_t seed,
                                 double* out_lo, double* out_hi);

/* ---- live service ---- */

/* options_json keys: host, port, static_dir, seed, pool_per_scenario,
 * transcripts_out, human_timeout_seconds. */
MG_API mg_status mg_server_start(const char* options_json, mg_server** out);
MG_API int mg_server_port(const mg_server* server);
/* Stops and frees. */
MG_API void mg_server_stop(mg_server* server);

#ifdef __cplusplus
}
#endif

#endif /* MINDGAMES_H */
