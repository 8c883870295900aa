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

// HTTP service over the session engine. Routing lives in Service::handle so
// the same behaviour is reachable with or without a socket.
//
// Endpoints (all bodies JSON unless noted):
//   GET  /health
//   POST /sessions                         create {research_question, coding_mode, ...}
//   GET  /sessions                         list ids
//   GET  /sessions/{id}                    full session document
//   POST /sessions/{id}/transcript         {title, text}
//   GET  /sessions/{id}/transcript
//   GET  /sessions/{id}/phase
//   POST /sessions/{id}/phase              {approval: {actor_id, target}}
//   POST /sessions/{id}/phase/revert       {approval: {actor_id, target}}
//   POST /sessions/{id}/run
//   GET  /sessions/{id}/codes | gerunds | families | themes | comments | memos
//   POST /sessions/{id}/memos              {kind, body, linked_refs}
//   POST /sessions/{id}/reflexive          {positionality}
//   POST /sessions/{id}/actions            ActionRequest
//   GET  /sessions/{id}/actions
//   POST /sessions/{id}/audit
//   GET  /sessions/{id}/integrity | coverage
//   GET  /sessions/{id}/summary[?format=csv|markdown]
//   GET  /sessions/{id}/export?format=csv|markdown   code log as text
//   GET  /sessions/{id}/export/session     session file
//   GET  /sessions/{id}/export/trail       hash-chained NDJSON
//   POST /sessions/{id}/import             CSV body; returns candidates
//   GET  /sessions/{id}/log                NDJSON
//   GET  /sessions/{id}/report             Markdown
//
// The acting user comes from the X-Actor header. Errors are returned as
// {"error": "<DomainErrorName>", "message": "..."}.

#ifndef THEMATIC_SERVICE_H_
#define THEMATIC_SERVICE_H_

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "thematic/error.h"
#include "thematic/gateway.h"
#include "thematic/workflow.h"

namespace thematic {

using BackendFactory = std::function<std::shared_ptr<ChatBackend>(const Session&)>;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  // When set, sessions are loaded from and saved to <store_dir>/<id>.session.
  std::string store_dir;
  LlmConfig llm;  // defaults for new sessions
  SessionSettings settings;
  BackendFactory backend_factory;  // defaults to make_backend(session.llm_config)
  Clock clock;                     // defaults to the system clock
};

// Reads {"host", "port", "store_dir", "llm": {...}, "settings": {...}}.
ServiceConfig load_service_config(const std::string& path);

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

int http_status(ErrorCode code);

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpResponse handle(const HttpRequest& request);

  // Binds the listening socket; returns the bound port. Throws IoFailure.
  int bind();
  // Serves until stop(); bind() must have succeeded.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace thematic

#endif  // THEMATIC_SERVICE_H_
