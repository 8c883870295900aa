// Copyright 2026 The Thematic Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the thematic analysis engine.
 *
 * Sessions are opaque handles. Every function returns a thematic_status;
 * on failure thematic_last_error() describes the problem for the calling
 * thread. Strings returned through char** out-parameters are owned by the
 * caller and must be released with thematic_string_free(). */

#ifndef THEMATIC_H_
#define THEMATIC_H_

#ifdef __cplusplus
extern "C" {
#endif

#if defined(THEMATIC_BUILDING_LIBRARY)
#define THEMATIC_API __attribute__((visibility("default")))
#else
#define THEMATIC_API
#endif

typedef enum thematic_status {
  THEMATIC_OK = 0,
#define THEMATIC_ERROR(name, value) THEMATIC_ERR_##name = value,
#include "thematic/error_codes.def"
#undef THEMATIC_ERROR
} thematic_status;

typedef struct thematic_session thematic_session;

THEMATIC_API const char* thematic_version(void);
/* "OK" or the domain error name, e.g. "PhaseOrderViolation". */
THEMATIC_API const char* thematic_status_name(thematic_status status);
/* Message for the last failure on this thread; empty after success. */
THEMATIC_API const char* thematic_last_error(void);
THEMATIC_API void thematic_string_free(char* s);

/* coding_mode: "exact_keyword_only" or "exact_plus_descriptive".
 * llm_config_json and settings_json may be NULL for defaults; otherwise they
 * are merged over the defaults. */
THEMATIC_API thematic_status thematic_session_create(const char* research_question,
                                                     const char* coding_mode,
                                                     const char* llm_config_json,
                                                     const char* settings_json,
                                                     thematic_session** out);
THEMATIC_API thematic_status thematic_session_load(const char* path, thematic_session** out);
THEMATIC_API thematic_status thematic_session_save(const thematic_session* session,
                                                   const char* path);
THEMATIC_API void thematic_session_free(thematic_session* session);

/* Replaces the wall clock with one ticking one second per log entry from
 * start (ISO-8601 UTC, e.g. "2026-01-01T00:00:00Z"). */
THEMATIC_API thematic_status thematic_session_use_logical_clock(thematic_session* session,
                                                                const char* start);

THEMATIC_API thematic_status thematic_session_json(const thematic_session* session, char** out);
THEMATIC_API thematic_status thematic_session_phase(const thematic_session* session, char** out);

THEMATIC_API thematic_status thematic_ingest(thematic_session* session, const char* actor,
                                             const char* title, const char* text);

/* A NULL or empty actor means no approval was given. target is a phase name
 * such as "P2_ExactKeyword" or the short form "P2". */
THEMATIC_API thematic_status thematic_advance(thematic_session* session, const char* actor,
                                              const char* target);
THEMATIC_API thematic_status thematic_revert(thematic_session* session, const char* actor,
                                             const char* target);

/* Runs the current phase. fixture_dir, when non-NULL, overrides the mock
 * backend's fixture directory for this call. out receives a JSON summary. */
THEMATIC_API thematic_status thematic_run(thematic_session* session, const char* actor,
                                          const char* fixture_dir, char** out);

/* action_json: {"kind", "target_id", "after", "rationale", "actor_id",
 * "integrity_exempt"}. out receives the recorded action. */
THEMATIC_API thematic_status thematic_apply_action(thematic_session* session,
                                                   const char* action_json, char** out);

THEMATIC_API thematic_status thematic_audit(thematic_session* session, const char* actor,
                                            char** out);
THEMATIC_API thematic_status thematic_reflect(thematic_session* session, const char* actor,
                                              const char* positionality,
                                              const char* fixture_dir, char** out);
THEMATIC_API thematic_status thematic_record_memo(thematic_session* session, const char* actor,
                                                  const char* kind, const char* body,
                                                  char** out);

/* format: "json", "csv" or "markdown". */
THEMATIC_API thematic_status thematic_summary(const thematic_session* session,
                                              const char* format, char** out);
/* format: "csv" or "markdown". */
THEMATIC_API thematic_status thematic_export_code_log(const thematic_session* session,
                                                      const char* format, char** out);
THEMATIC_API thematic_status thematic_import_code_log(const thematic_session* session,
                                                      const char* csv, char** out);
THEMATIC_API thematic_status thematic_export_log(const thematic_session* session, char** out);
THEMATIC_API thematic_status thematic_export_trail(const thematic_session* session, char** out);
THEMATIC_API thematic_status thematic_report(const thematic_session* session, char** out);

/* Rebuilds the session from its own interaction log. */
THEMATIC_API thematic_status thematic_replay(const thematic_session* session,
                                             thematic_session** out);
/* Replays an NDJSON interaction log on top of the initial state of base. */
THEMATIC_API thematic_status thematic_replay_log(const thematic_session* base,
                                                 const char* log_ndjson,
                                                 thematic_session** out);

/* Serves the HTTP API until the process is stopped. config_json holds
 * {"host", "port", "store_dir", "llm", "settings"}; NULL for defaults. */
THEMATIC_API thematic_status thematic_serve(const char* config_json);

#ifdef __cplusplus
}
#endif

#endif /* THEMATIC_H_ */
