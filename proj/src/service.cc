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

#include "thematic/service.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <mutex>
#include <regex>
#include <thread>

#include "httplib.h"
#include "thematic/report.h"
#include "thematic/serialize.h"
#include "thematic/store.h"
#include "thematic/text.h"

namespace thematic {
namespace {

using nlohmann::json;

HttpResponse json_response(int status, const json& body) {
  return HttpResponse{status, "application/json", body.dump()};
}

HttpResponse text_response(std::string content_type, std::string body) {
  return HttpResponse{200, std::move(content_type), std::move(body)};
}

HttpResponse error_response(const Error& e) {
  return json_response(http_status(e.code()),
                       {{"error", std::string(e.name())}, {"message", e.what()}});
}

json parse_body(const HttpRequest& req) {
  if (text::trim(req.body).empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed JSON body: ") + e.what());
  }
}

std::optional<Approval> approval_from(const json& body, const std::string& header_actor) {
  if (!body.contains("approval") || body["approval"].is_null()) return std::nullopt;
  const json& a = body["approval"];
  if (!a.is_object()) fail(ErrorCode::kInvalidArgument, "approval must be an object");
  Approval approval;
  approval.actor_id = a.value("actor_id", header_actor);
  if (!a.contains("target") || !a["target"].is_string()) {
    fail(ErrorCode::kInvalidArgument, "approval.target is required");
  }
  approval.target = parse_phase(a["target"].get<std::string>());
  return approval;
}

json session_summary(const Session& s) {
  return {{"id", s.id},
          {"research_question", s.research_question},
          {"coding_mode", coding_mode_name(s.coding_mode)},
          {"transcript_id", s.transcript ? json(s.transcript->id) : json(nullptr)},
          {"phase", s.phase},
          {"code_log_version", s.code_log.version},
          {"actions", s.trail.size()},
          {"log_entries", s.interaction_log.size()}};
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kTargetNotFound:
      return 404;
    case ErrorCode::kWrongPhase:
    case ErrorCode::kPhaseOrderViolation:
    case ErrorCode::kModeViolation:
    case ErrorCode::kSetupIncomplete:
    case ErrorCode::kTargetNotActive:
    case ErrorCode::kNoActiveCodes:
    case ErrorCode::kNoFamilies:
      return 409;
    case ErrorCode::kGatewayError:
    case ErrorCode::kParseError:
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kMockFixtureMissing:
    case ErrorCode::kAuthenticationFailure:
      return 502;
    case ErrorCode::kIoFailure:
    case ErrorCode::kLogCorruption:
    case ErrorCode::kHashMismatch:
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kInternal:
      return 500;
    default:
      return 422;
  }
}

ServiceConfig load_service_config(const std::string& path) {
  const json j = with_json_errors(ErrorCode::kParseError,
                                  [&] { return json::parse(read_file(path)); });
  ServiceConfig config;
  with_json_errors(ErrorCode::kInvalidArgument, [&] {
    config.host = j.value("host", config.host);
    config.port = j.value("port", config.port);
    config.store_dir = j.value("store_dir", config.store_dir);
    if (j.contains("llm")) config.llm = j["llm"].get<LlmConfig>();
    if (j.contains("settings")) config.settings = j["settings"].get<SessionSettings>();
  });
  config.llm.validate();
  return config;
}

struct Service::Impl {
  struct Slot {
    std::mutex mu;
    Session session;
  };

  ServiceConfig config;
  std::mutex registry_mu;
  std::map<std::string, std::shared_ptr<Slot>> sessions;
  httplib::Server server;
  bool bound = false;

  explicit Impl(ServiceConfig c) : config(std::move(c)) {
    if (!config.clock) config.clock = system_clock();
    if (!config.store_dir.empty()) {
      namespace fs = std::filesystem;
      std::error_code ec;
      fs::create_directories(config.store_dir, ec);
      if (ec) fail(ErrorCode::kIoFailure, "cannot create store directory " + config.store_dir);
      for (const auto& entry : fs::directory_iterator(config.store_dir)) {
        if (entry.path().extension() != ".session") continue;
        Session s = load(entry.path().string());
        s.clock = config.clock;
        auto slot = std::make_shared<Slot>();
        slot->session = std::move(s);
        sessions[slot->session.id] = slot;
      }
    }
  }

  std::shared_ptr<Slot> find(const std::string& id) {
    std::lock_guard<std::mutex> lock(registry_mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) fail(ErrorCode::kUnknownSession, "no session " + id);
    return it->second;
  }

  void persist(const Session& s) {
    if (config.store_dir.empty()) return;
    save(s, (std::filesystem::path(config.store_dir) / (s.id + ".session")).string());
  }

  Gateway gateway_for(const Session& s) {
    std::shared_ptr<ChatBackend> backend =
        config.backend_factory ? config.backend_factory(s) : make_backend(s.llm_config);
    return Gateway(s.llm_config, std::move(backend));
  }

  HttpResponse create(const HttpRequest& req) {
    const json body = parse_body(req);
    LlmConfig llm = config.llm;
    SessionSettings settings = config.settings;
    CodingMode mode = CodingMode::kExactPlusDescriptive;
    std::string question;
    with_json_errors(ErrorCode::kInvalidArgument, [&] {
      question = body.value("research_question", "");
      if (body.contains("coding_mode")) mode = parse_coding_mode(body["coding_mode"].get<std::string>());
      if (body.contains("llm_config")) {
        json merged = llm;
        merged.merge_patch(body["llm_config"]);
        llm = merged.get<LlmConfig>();
      }
      if (body.contains("settings")) {
        json merged = settings;
        merged.merge_patch(body["settings"]);
        settings = merged.get<SessionSettings>();
      }
    });
    Session s = create_session(question, mode, llm, settings, config.clock);
    auto slot = std::make_shared<Slot>();
    slot->session = std::move(s);
    {
      std::lock_guard<std::mutex> lock(registry_mu);
      while (sessions.count(slot->session.id) != 0) slot->session.id += "x";
      sessions[slot->session.id] = slot;
    }
    persist(slot->session);
    return json_response(201, session_summary(slot->session));
  }

  HttpResponse session_route(const HttpRequest& req, const std::string& id,
                             const std::string& rest) {
    auto slot = find(id);
    std::lock_guard<std::mutex> lock(slot->mu);
    Session& s = slot->session;
    const std::string actor = req.headers.count("x-actor") ? req.headers.at("x-actor") : "";
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    auto query = [&](const std::string& key, const std::string& dflt) {
      auto it = req.query.find(key);
      return it == req.query.end() ? dflt : it->second;
    };
    auto mutated = [&](int status, const json& body) {
      persist(s);
      return json_response(status, body);
    };

    if (rest.empty() && get) return json_response(200, s);
    if (rest == "/transcript" && get) {
      if (!s.transcript) fail(ErrorCode::kTargetNotFound, "no transcript loaded");
      return json_response(200, *s.transcript);
    }
    if (rest == "/transcript" && post) {
      const json body = parse_body(req);
      std::string title, raw;
      with_json_errors(ErrorCode::kInvalidArgument, [&] {
        title = body.value("title", "");
        raw = body.value("text", "");
      });
      ingest_transcript(s, actor, raw, title);
      return mutated(201, *s.transcript);
    }
    if (rest == "/phase" && get) return json_response(200, s.phase);
    if (rest == "/phase" && post) {
      advance(s, approval_from(parse_body(req), actor));
      return mutated(200, s.phase);
    }
    if (rest == "/phase/revert" && post) {
      revert(s, approval_from(parse_body(req), actor));
      return mutated(200, s.phase);
    }
    if (rest == "/run" && post) {
      Gateway gw = gateway_for(s);
      json result = run_current_phase(s, gw, actor);
      return mutated(200, result);
    }
    if (rest == "/codes" && get) {
      json table = json::array();
      const CodeLogTable t = render_code_log(s.code_log, s.transcript ? &*s.transcript : nullptr,
                                             s.settings.page_size);
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        table.push_back({{"id", t.code_ids[i]},
                         {std::string(kCodeLogColumns[0]), t.rows[i][0]},
                         {std::string(kCodeLogColumns[1]), t.rows[i][1]},
                         {std::string(kCodeLogColumns[2]), t.rows[i][2]},
                         {std::string(kCodeLogColumns[3]), t.rows[i][3]}});
      }
      return json_response(200, {{"codes", s.code_log.verbatims}, {"table", table},
                                 {"version", s.code_log.version}});
    }
    if (rest == "/gerunds" && get) return json_response(200, s.code_log.gerunds);
    if (rest == "/families" && get) return json_response(200, s.code_log.families);
    if (rest == "/themes" && get) return json_response(200, s.code_log.themes);
    if (rest == "/comments" && get) return json_response(200, s.code_log.comments);
    if (rest == "/memos" && get) return json_response(200, s.memos);
    if (rest == "/memos" && post) {
      const json body = parse_body(req);
      MemoKind kind = MemoKind::kReflexive;
      std::string text_body;
      std::vector<LinkedRef> refs;
      with_json_errors(ErrorCode::kInvalidArgument, [&] {
        if (body.contains("kind")) kind = parse_memo_kind(body["kind"].get<std::string>());
        text_body = body.value("body", "");
        if (body.contains("linked_refs")) refs = body["linked_refs"].get<std::vector<LinkedRef>>();
      });
      Memo m = record_memo(s, actor, kind, text_body, refs);
      return mutated(201, m);
    }
    if (rest == "/reflexive" && post) {
      const json body = parse_body(req);
      const std::string stance = with_json_errors(
          ErrorCode::kInvalidArgument, [&] { return body.value("positionality", std::string()); });
      Gateway gw = gateway_for(s);
      Memo m = generate_reflexive_prompt(s, gw, actor, stance);
      return mutated(201, m);
    }
    if (rest == "/actions" && get) return json_response(200, s.trail);
    if (rest == "/actions" && post) {
      json body = parse_body(req);
      if (!body.contains("actor_id") || body["actor_id"] == "") body["actor_id"] = actor;
      ActionRequest request = with_json_errors(ErrorCode::kInvalidAction,
                                               [&] { return body.get<ActionRequest>(); });
      RevisionAction a = apply_revision(s, request);
      return mutated(201, a);
    }
    if (rest == "/audit" && post) {
      AuditResult r = audit_session(s, actor);
      return mutated(200, {{"integrity", r.integrity}, {"coverage", r.coverage}});
    }
    if (rest == "/integrity" && get) return json_response(200, compute_integrity(s));
    if (rest == "/coverage" && get) return json_response(200, compute_coverage(s));
    if (rest == "/summary" && get) {
      const ActionSummary summary = summarize(s.trail);
      const std::string format = query("format", "json");
      if (format == "csv") return text_response("text/csv", summary_csv(summary));
      if (format == "markdown") return text_response("text/markdown", summary_markdown(summary));
      return json_response(200, summary);
    }
    if (rest == "/export" && get) {
      const ExportFormat f = parse_export_format(query("format", "csv"));
      return text_response(f == ExportFormat::kCsv ? "text/csv" : "text/markdown",
                           export_code_log(s, f));
    }
    if (rest == "/export/session" && get) {
      return text_response("application/octet-stream", serialize_session(s));
    }
    if (rest == "/export/trail" && get) {
      return text_response("application/x-ndjson", export_trail(s));
    }
    if (rest == "/import" && post) {
      if (!s.transcript) fail(ErrorCode::kSetupIncomplete, "no transcript loaded");
      return json_response(200, import_code_log(req.body, s.transcript->id));
    }
    if (rest == "/log" && get) {
      return text_response("application/x-ndjson", export_interaction_log(s));
    }
    if (rest == "/report" && get) {
      return text_response("text/markdown", s.report.empty() ? render_report(s) : s.report);
    }
    return json_response(404, {{"error", "NotFound"}, {"message", "no route " + req.method + " " + req.path}});
  }

  HttpResponse handle(const HttpRequest& req) {
    try {
      if (req.path == "/health" && req.method == "GET") return json_response(200, {{"status", "ok"}});
      if (req.path == "/sessions" && req.method == "POST") return create(req);
      if (req.path == "/sessions" && req.method == "GET") {
        json ids = json::array();
        std::lock_guard<std::mutex> lock(registry_mu);
        for (const auto& [id, slot] : sessions) ids.push_back(id);
        return json_response(200, ids);
      }
      static const std::regex kSessionPath(R"(^/sessions/([A-Za-z0-9_.-]+)(/.*)?$)");
      std::smatch m;
      if (std::regex_match(req.path, m, kSessionPath)) {
        return session_route(req, m[1].str(), m[2].matched ? m[2].str() : "");
      }
      return json_response(404, {{"error", "NotFound"}, {"message", "no route " + req.path}});
    } catch (const Error& e) {
      return error_response(e);
    } catch (const std::exception& e) {
      return json_response(500, {{"error", "Internal"}, {"message", e.what()}});
    }
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    for (const auto& [k, v] : req.headers) {
      std::string key = k;
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      r.headers[key] = v;
    }
    r.body = req.body;
    HttpResponse out = handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  impl_->server.Get(".*", forward);
  impl_->server.Post(".*", forward);
  impl_->server.Put(".*", forward);
  impl_->server.Delete(".*", forward);
}

Service::~Service() { stop(); }

HttpResponse Service::handle(const HttpRequest& request) { return impl_->handle(request); }

int Service::bind() {
  int port = impl_->config.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(impl_->config.host);
    if (port < 0) fail(ErrorCode::kIoFailure, "cannot bind " + impl_->config.host);
  } else if (!impl_->server.bind_to_port(impl_->config.host, port)) {
    fail(ErrorCode::kIoFailure,
         "cannot bind " + impl_->config.host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return port;
}

void Service::run() {
  if (!impl_->bound) fail(ErrorCode::kIoFailure, "service is not bound");
  impl_->server.listen_after_bind();
}

void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace thematic
