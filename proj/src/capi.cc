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

#include "thematic.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "thematic/error.h"
#include "thematic/gateway.h"
#include "thematic/report.h"
#include "thematic/serialize.h"
#include "thematic/service.h"
#include "thematic/store.h"
#include "thematic/workflow.h"

struct thematic_session {
  thematic::Session session;
};

namespace {

using nlohmann::json;
using thematic::ErrorCode;

thread_local std::string g_last_error;

thematic_status to_status(ErrorCode code) { return static_cast<thematic_status>(code); }

template <typename F>
thematic_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return THEMATIC_OK;
  } catch (const thematic::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return THEMATIC_ERR_InvalidArgument;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return THEMATIC_ERR_Internal;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) thematic::fail(ErrorCode::kInternal, "out of memory");
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out != nullptr) *out = dup(s);
}

void require(const void* p, const char* what) {
  if (p == nullptr) thematic::fail(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

std::string str(const char* s) { return s == nullptr ? std::string() : std::string(s); }

json parse_json(const char* s) {
  if (s == nullptr || *s == '\0') return json::object();
  return thematic::with_json_errors(ErrorCode::kInvalidArgument, [&] { return json::parse(s); });
}

thematic::Gateway gateway_for(const thematic::Session& s, const char* fixture_dir) {
  thematic::LlmConfig config = s.llm_config;
  if (fixture_dir != nullptr && *fixture_dir != '\0') config.fixture_dir = fixture_dir;
  return thematic::Gateway(config, thematic::make_backend(config));
}

}  // namespace

extern "C" {

const char* thematic_version(void) { return "1.0.0"; }

const char* thematic_status_name(thematic_status status) {
  if (status == THEMATIC_OK) return "OK";
  return thematic::error_name(static_cast<ErrorCode>(status)).data();
}

const char* thematic_last_error(void) { return g_last_error.c_str(); }

void thematic_string_free(char* s) { std::free(s); }

thematic_status thematic_session_create(const char* research_question, const char* coding_mode,
                                        const char* llm_config_json, const char* settings_json,
                                        thematic_session** out) {
  return guarded([&] {
    require(out, "out");
    json llm = thematic::LlmConfig{};
    llm.merge_patch(parse_json(llm_config_json));
    json settings = thematic::SessionSettings{};
    settings.merge_patch(parse_json(settings_json));
    const thematic::CodingMode mode =
        thematic::parse_coding_mode(coding_mode == nullptr ? "exact_plus_descriptive" : coding_mode);
    auto* handle = new thematic_session{thematic::create_session(
        str(research_question), mode,
        thematic::with_json_errors(ErrorCode::kInvalidArgument,
                                   [&] { return llm.get<thematic::LlmConfig>(); }),
        thematic::with_json_errors(ErrorCode::kInvalidArgument,
                                   [&] { return settings.get<thematic::SessionSettings>(); }))};
    *out = handle;
  });
}

thematic_status thematic_session_load(const char* path, thematic_session** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    thematic::Session s = thematic::load(path);
    s.clock = thematic::system_clock();
    *out = new thematic_session{std::move(s)};
  });
}

thematic_status thematic_session_save(const thematic_session* session, const char* path) {
  return guarded([&] {
    require(session, "session");
    require(path, "path");
    thematic::save(session->session, path);
  });
}

void thematic_session_free(thematic_session* session) { delete session; }

thematic_status thematic_session_use_logical_clock(thematic_session* session, const char* start) {
  return guarded([&] {
    require(session, "session");
    session->session.clock = start == nullptr ? thematic::logical_clock()
                                              : thematic::logical_clock(start);
  });
}

thematic_status thematic_session_json(const thematic_session* session, char** out) {
  return guarded([&] {
    require(session, "session");
    put(out, json(session->session).dump());
  });
}

thematic_status thematic_session_phase(const thematic_session* session, char** out) {
  return guarded([&] {
    require(session, "session");
    put(out, json(session->session.phase).dump());
  });
}

thematic_status thematic_ingest(thematic_session* session, const char* actor, const char* title,
                                const char* text) {
  return guarded([&] {
    require(session, "session");
    require(text, "text");
    thematic::ingest_transcript(session->session, str(actor), text, str(title));
  });
}

thematic_status thematic_advance(thematic_session* session, const char* actor,
                                 const char* target) {
  return guarded([&] {
    require(session, "session");
    std::optional<thematic::Approval> approval;
    if (actor != nullptr && *actor != '\0') {
      require(target, "target");
      approval = thematic::Approval{actor, thematic::parse_phase(target)};
    }
    thematic::advance(session->session, approval);
  });
}

thematic_status thematic_revert(thematic_session* session, const char* actor,
                                const char* target) {
  return guarded([&] {
    require(session, "session");
    std::optional<thematic::Approval> approval;
    if (actor != nullptr && *actor != '\0') {
      require(target, "target");
      approval = thematic::Approval{actor, thematic::parse_phase(target)};
    }
    thematic::revert(session->session, approval);
  });
}

thematic_status thematic_run(thematic_session* session, const char* actor,
                             const char* fixture_dir, char** out) {
  return guarded([&] {
    require(session, "session");
    thematic::Gateway gw = gateway_for(session->session, fixture_dir);
    put(out, thematic::run_current_phase(session->session, gw, str(actor)).dump());
  });
}

thematic_status thematic_apply_action(thematic_session* session, const char* action_json,
                                      char** out) {
  return guarded([&] {
    require(session, "session");
    require(action_json, "action_json");
    const json j = parse_json(action_json);
    const thematic::ActionRequest request = thematic::with_json_errors(
        ErrorCode::kInvalidAction, [&] { return j.get<thematic::ActionRequest>(); });
    put(out, json(thematic::apply_revision(session->session, request)).dump());
  });
}

thematic_status thematic_audit(thematic_session* session, const char* actor, char** out) {
  return guarded([&] {
    require(session, "session");
    thematic::AuditResult r = thematic::audit_session(session->session, str(actor));
    put(out, json{{"integrity", r.integrity}, {"coverage", r.coverage}}.dump());
  });
}

thematic_status thematic_reflect(thematic_session* session, const char* actor,
                                 const char* positionality, const char* fixture_dir,
                                 char** out) {
  return guarded([&] {
    require(session, "session");
    thematic::Gateway gw = gateway_for(session->session, fixture_dir);
    put(out, json(thematic::generate_reflexive_prompt(session->session, gw, str(actor),
                                                      str(positionality)))
                 .dump());
  });
}

thematic_status thematic_record_memo(thematic_session* session, const char* actor,
                                     const char* kind, const char* body, char** out) {
  return guarded([&] {
    require(session, "session");
    const thematic::MemoKind k =
        thematic::parse_memo_kind(kind == nullptr ? "reflexive" : kind);
    put(out, json(thematic::record_memo(session->session, str(actor), k, str(body))).dump());
  });
}

thematic_status thematic_summary(const thematic_session* session, const char* format,
                                 char** out) {
  return guarded([&] {
    require(session, "session");
    const thematic::ActionSummary summary = thematic::summarize(session->session.trail);
    const std::string f = format == nullptr ? "json" : format;
    if (f == "csv") {
      put(out, thematic::summary_csv(summary));
    } else if (f == "markdown" || f == "md") {
      put(out, thematic::summary_markdown(summary));
    } else if (f == "json") {
      put(out, json(summary).dump());
    } else {
      thematic::fail(ErrorCode::kInvalidArgument, "unknown summary format: " + f);
    }
  });
}

thematic_status thematic_export_code_log(const thematic_session* session, const char* format,
                                         char** out) {
  return guarded([&] {
    require(session, "session");
    put(out, thematic::export_code_log(session->session,
                                       thematic::parse_export_format(format == nullptr ? "csv"
                                                                                       : format)));
  });
}

thematic_status thematic_import_code_log(const thematic_session* session, const char* csv,
                                         char** out) {
  return guarded([&] {
    require(session, "session");
    require(csv, "csv");
    const thematic::Transcript& t = session->session.require_transcript();
    put(out, json(thematic::import_code_log(csv, t.id)).dump());
  });
}

thematic_status thematic_export_log(const thematic_session* session, char** out) {
  return guarded([&] {
    require(session, "session");
    put(out, thematic::export_interaction_log(session->session));
  });
}

thematic_status thematic_export_trail(const thematic_session* session, char** out) {
  return guarded([&] {
    require(session, "session");
    put(out, thematic::export_trail(session->session));
  });
}

thematic_status thematic_report(const thematic_session* session, char** out) {
  return guarded([&] {
    require(session, "session");
    const thematic::Session& s = session->session;
    put(out, s.report.empty() ? thematic::render_report(s) : s.report);
  });
}

thematic_status thematic_replay(const thematic_session* session, thematic_session** out) {
  return guarded([&] {
    require(session, "session");
    require(out, "out");
    const thematic::Session& s = session->session;
    *out = new thematic_session{thematic::replay(s.interaction_log, thematic::initial_state(s))};
  });
}

thematic_status thematic_replay_log(const thematic_session* base, const char* log_ndjson,
                                    thematic_session** out) {
  return guarded([&] {
    require(base, "base");
    require(log_ndjson, "log_ndjson");
    require(out, "out");
    const auto log = thematic::parse_interaction_log(log_ndjson);
    *out = new thematic_session{thematic::replay(log, thematic::initial_state(base->session))};
  });
}

thematic_status thematic_serve(const char* config_json) {
  return guarded([&] {
    const json j = parse_json(config_json);
    thematic::ServiceConfig config;
    thematic::with_json_errors(ErrorCode::kInvalidArgument, [&] {
      config.host = j.value("host", config.host);
      config.port = j.value("port", config.port);
      config.store_dir = j.value("store_dir", config.store_dir);
      if (j.contains("llm")) config.llm = j["llm"].get<thematic::LlmConfig>();
      if (j.contains("settings")) config.settings = j["settings"].get<thematic::SessionSettings>();
    });
    config.llm.validate();
    thematic::Service service(config);
    const int port = service.bind();
    std::printf("listening on http://%s:%d\n", config.host.c_str(), port);
    std::fflush(stdout);
    service.run();
  });
}

}  // extern "C"
