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

// Command-line front end. Every subcommand loads the session file, performs
// one operation through the C API and writes the session back on success.

#include <pwd.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "thematic.h"

namespace {

using nlohmann::json;

struct CliError {
  thematic_status status;
  std::string message;
};

void check(thematic_status st) {
  if (st != THEMATIC_OK) throw CliError{st, thematic_last_error()};
}

struct SessionDeleter {
  void operator()(thematic_session* s) const { thematic_session_free(s); }
};
using SessionPtr = std::unique_ptr<thematic_session, SessionDeleter>;

// Takes ownership of a returned C string.
std::string take(char* s) {
  std::string out = s == nullptr ? "" : s;
  thematic_string_free(s);
  return out;
}

SessionPtr open_session(const std::string& path) {
  thematic_session* s = nullptr;
  check(thematic_session_load(path.c_str(), &s));
  return SessionPtr(s);
}

void save_session(const SessionPtr& s, const std::string& path) {
  check(thematic_session_save(s.get(), path.c_str()));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{THEMATIC_ERR_IoFailure, "cannot read " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError{THEMATIC_ERR_IoFailure, "cannot write " + out_path};
  out << text;
}

std::string default_actor() {
  if (const char* u = std::getenv("USER"); u != nullptr && *u != '\0') return u;
  if (const passwd* pw = getpwuid(getuid()); pw != nullptr) return pw->pw_name;
  return "unknown";
}

void print_audit(const json& r) {
  const json& sum = r["integrity"]["summary"];
  const json& cov = r["coverage"];
  std::cout << "Exact:" << sum["Exact"].get<int>() << " NearVerbatim:" << sum["NearVerbatim"].get<int>()
            << " NotFound:" << sum["NotFound"].get<int>()
            << " LocationMismatch:" << sum["LocationMismatch"].get<int>() << "\n";
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.3f", cov["coverage_ratio"].get<double>());
  std::cout << "coverage:" << cov["covered_count"].get<int>() << "/"
            << cov["total_paragraphs"].get<int>() << " ratio:" << ratio
            << " gaps:" << cov["uncoded"].size() << "\n";
  for (const auto& p : cov["uncoded"]) std::cout << "uncoded paragraph " << p.get<int>() << "\n";
  for (const auto& e : r["integrity"]["per_code"]) {
    const std::string kind = e["verdict"]["kind"];
    if (kind == "Exact") continue;
    std::cout << e["code_id"].get<std::string>() << " " << kind;
    if (e["verdict"].contains("suggested_exact") && !e["verdict"]["suggested_exact"].is_null()) {
      std::cout << " suggested: \"" << e["verdict"]["suggested_exact"].get<std::string>() << "\"";
    }
    std::cout << "\n";
  }
}

void print_summary_table(const json& summary) {
  std::cout << "actor,comments,insertions,deletions_and_rejections,refinements,total\n";
  for (const auto& [actor, c] : summary["per_actor"].items()) {
    std::cout << actor << "," << c["comments"] << "," << c["insertions"] << ","
              << c["deletions_and_rejections"] << "," << c["refinements"] << "," << c["total"]
              << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-in-the-loop thematic analysis engine"};
  app.require_subcommand(1);
  std::string session_path = "session.thematic";
  std::string actor = default_actor();
  app.add_option("-s,--session", session_path, "Session file")->capture_default_str();
  app.add_option("-a,--actor", actor, "Acting researcher id (defaults to the OS user)");

  // init
  auto* init = app.add_subcommand("init", "Create a new session");
  std::string question, mode = "exact_plus_descriptive", backend = "mock", fixtures, model,
                        llm_json;
  std::optional<double> temperature;
  std::optional<int> page_size;
  init->add_option("-q,--question", question, "Research question")->required();
  init->add_option("-m,--mode", mode, "exact_keyword_only or exact_plus_descriptive")
      ->capture_default_str();
  init->add_option("--backend", backend, "mock or live")->capture_default_str();
  init->add_option("--fixtures", fixtures, "Mock fixture directory");
  init->add_option("--model", model, "Model id");
  init->add_option("--temperature", temperature, "Sampling temperature");
  init->add_option("--page-size", page_size, "Paragraphs per page");
  init->add_option("--llm-config", llm_json, "JSON file with LLM settings");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load the interview transcript");
  std::string title, transcript_file;
  ingest->add_option("-t,--title", title, "Transcript title")->required();
  ingest->add_option("file", transcript_file, "UTF-8 transcript file")->required();

  // run
  auto* run = app.add_subcommand("run", "Run the current phase");
  std::string run_fixtures;
  run->add_option("--fixtures", run_fixtures, "Override the mock fixture directory");

  // approve / revert
  auto* approve = app.add_subcommand("approve", "Authorize moving to the next phase");
  std::string approve_to;
  approve->add_option("--to", approve_to, "Target phase, e.g. P2 or P2_ExactKeyword")->required();
  auto* revert = app.add_subcommand("revert", "Return to an earlier phase");
  std::string revert_to;
  revert->add_option("--to", revert_to, "Target phase")->required();

  // audit
  auto* audit = app.add_subcommand("audit", "Validate verbatim integrity and coverage");
  bool audit_json = false;
  audit->add_flag("--json", audit_json, "Print the full reports as JSON");

  // act
  auto* act = app.add_subcommand("act", "Apply a revision action from a JSON file");
  std::string action_file;
  act->add_option("file", action_file, "Action file ('-' for stdin)")->required();

  // summary
  auto* summary = app.add_subcommand("summary", "Revision counts per actor");
  std::string summary_format = "table";
  summary->add_option("-f,--format", summary_format, "table, csv, markdown or json")
      ->capture_default_str();

  // export
  auto* exp = app.add_subcommand("export", "Export session artifacts");
  std::string export_format = "csv", export_out;
  exp->add_option("-f,--format", export_format,
                  "csv, markdown, log, trail, session or report")
      ->capture_default_str();
  exp->add_option("-o,--out", export_out, "Output file (stdout by default)");

  // import
  auto* imp = app.add_subcommand("import", "Parse a code log CSV into candidate codes");
  std::string import_file;
  imp->add_option("file", import_file, "CSV file")->required();

  // replay
  auto* rep = app.add_subcommand("replay", "Rebuild the session from its interaction log");
  std::string replay_log, replay_out;
  rep->add_option("--log", replay_log, "NDJSON log to replay instead of the session's own");
  rep->add_option("-o,--out", replay_out, "Write the replayed session here");

  // reflect / memo
  auto* reflect = app.add_subcommand("reflect", "Generate a reflexive prompt");
  std::string positionality, reflect_fixtures;
  reflect->add_option("-p,--positionality", positionality, "Positionality statement");
  reflect->add_option("--fixtures", reflect_fixtures, "Override the mock fixture directory");
  auto* memo = app.add_subcommand("memo", "Record a memo");
  std::string memo_kind = "reflexive", memo_body;
  memo->add_option("-k,--kind", memo_kind, "Memo kind")->capture_default_str();
  memo->add_option("body", memo_body, "Memo text")->required();

  // show
  auto* show = app.add_subcommand("show", "Print the current phase or the whole session");
  std::string show_what = "phase";
  show->add_option("what", show_what, "phase or session")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string serve_config, serve_host, serve_store;
  std::optional<int> serve_port;
  serve->add_option("-c,--config", serve_config, "JSON service configuration file");
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port (0 picks a free one)");
  serve->add_option("--store", serve_store, "Session store directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) {
      json llm = json::object();
      if (!llm_json.empty()) llm = json::parse(slurp(llm_json));
      llm["backend"] = backend;
      if (!fixtures.empty()) llm["fixture_dir"] = fixtures;
      if (!model.empty()) llm["model_id"] = model;
      if (temperature) llm["temperature"] = *temperature;
      json settings = json::object();
      if (page_size) settings["page_size"] = *page_size;
      thematic_session* raw = nullptr;
      check(thematic_session_create(question.c_str(), mode.c_str(), llm.dump().c_str(),
                                    settings.dump().c_str(), &raw));
      SessionPtr s(raw);
      save_session(s, session_path);
      char* out = nullptr;
      check(thematic_session_json(s.get(), &out));
      const json state = json::parse(take(out));
      std::cout << "created session " << state["id"].get<std::string>() << " in "
                << session_path << "\n";
    } else if (*ingest) {
      SessionPtr s = open_session(session_path);
      const std::string body = slurp(transcript_file);
      check(thematic_ingest(s.get(), actor.c_str(), title.c_str(), body.c_str()));
      save_session(s, session_path);
      char* out = nullptr;
      check(thematic_session_json(s.get(), &out));
      const json state = json::parse(take(out));
      std::cout << "ingested " << state["transcript"]["id"].get<std::string>() << " ("
                << state["transcript"]["paragraphs"].size() << " paragraphs)\n";
    } else if (*run) {
      SessionPtr s = open_session(session_path);
      char* out = nullptr;
      check(thematic_run(s.get(), actor.c_str(),
                         run_fixtures.empty() ? nullptr : run_fixtures.c_str(), &out));
      save_session(s, session_path);
      std::cout << json::parse(take(out)).dump(2) << "\n";
    } else if (*approve) {
      SessionPtr s = open_session(session_path);
      check(thematic_advance(s.get(), actor.c_str(), approve_to.c_str()));
      save_session(s, session_path);
      char* out = nullptr;
      check(thematic_session_phase(s.get(), &out));
      std::cout << "phase " << json::parse(take(out))["current"].get<std::string>() << "\n";
    } else if (*revert) {
      SessionPtr s = open_session(session_path);
      check(thematic_revert(s.get(), actor.c_str(), revert_to.c_str()));
      save_session(s, session_path);
      char* out = nullptr;
      check(thematic_session_phase(s.get(), &out));
      std::cout << "phase " << json::parse(take(out))["current"].get<std::string>() << "\n";
    } else if (*audit) {
      SessionPtr s = open_session(session_path);
      char* out = nullptr;
      check(thematic_audit(s.get(), actor.c_str(), &out));
      save_session(s, session_path);
      const json r = json::parse(take(out));
      if (audit_json) {
        std::cout << r.dump(2) << "\n";
      } else {
        print_audit(r);
      }
    } else if (*act) {
      SessionPtr s = open_session(session_path);
      json request = json::parse(action_file == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                                    : slurp(action_file));
      if (!request.contains("actor_id") || request["actor_id"] == "") request["actor_id"] = actor;
      char* out = nullptr;
      check(thematic_apply_action(s.get(), request.dump().c_str(), &out));
      save_session(s, session_path);
      const json a = json::parse(take(out));
      std::cout << a["id"].get<std::string>() << " " << a["kind"].get<std::string>() << " "
                << a["target_id"].get<std::string>() << "\n";
    } else if (*summary) {
      SessionPtr s = open_session(session_path);
      char* out = nullptr;
      if (summary_format == "table") {
        check(thematic_summary(s.get(), "json", &out));
        print_summary_table(json::parse(take(out)));
      } else {
        check(thematic_summary(s.get(), summary_format.c_str(), &out));
        emit(take(out), "");
      }
    } else if (*exp) {
      SessionPtr s = open_session(session_path);
      char* out = nullptr;
      if (export_format == "log") {
        check(thematic_export_log(s.get(), &out));
      } else if (export_format == "trail") {
        check(thematic_export_trail(s.get(), &out));
      } else if (export_format == "report") {
        check(thematic_report(s.get(), &out));
      } else if (export_format == "session") {
        check(thematic_session_save(s.get(), export_out.empty() ? "/dev/stdout" : export_out.c_str()));
        return 0;
      } else {
        check(thematic_export_code_log(s.get(), export_format.c_str(), &out));
      }
      emit(take(out), export_out);
    } else if (*imp) {
      SessionPtr s = open_session(session_path);
      char* out = nullptr;
      check(thematic_import_code_log(s.get(), slurp(import_file).c_str(), &out));
      std::cout << json::parse(take(out)).dump(2) << "\n";
    } else if (*rep) {
      SessionPtr s = open_session(session_path);
      thematic_session* raw = nullptr;
      if (replay_log.empty()) {
        check(thematic_replay(s.get(), &raw));
      } else {
        check(thematic_replay_log(s.get(), slurp(replay_log).c_str(), &raw));
      }
      SessionPtr replayed(raw);
      char* a = nullptr;
      char* b = nullptr;
      check(thematic_session_json(s.get(), &a));
      check(thematic_session_json(replayed.get(), &b));
      const json original = json::parse(take(a));
      const json again = json::parse(take(b));
      if (!replay_out.empty()) save_session(replayed, replay_out);
      std::cout << "replayed " << again["interaction_log"].size() << " entries; "
                << (original == again ? "identical to the session file" : "differs from the session file")
                << "\n";
      if (replay_log.empty() && original != again) {
        throw CliError{THEMATIC_ERR_LogCorruption, "replayed session differs from the stored one"};
      }
    } else if (*reflect) {
      SessionPtr s = open_session(session_path);
      char* out = nullptr;
      check(thematic_reflect(s.get(), actor.c_str(), positionality.c_str(),
                             reflect_fixtures.empty() ? nullptr : reflect_fixtures.c_str(), &out));
      save_session(s, session_path);
      const json m = json::parse(take(out));
      std::cout << m["id"].get<std::string>() << ": " << m["body"].get<std::string>() << "\n";
    } else if (*memo) {
      SessionPtr s = open_session(session_path);
      char* out = nullptr;
      check(thematic_record_memo(s.get(), actor.c_str(), memo_kind.c_str(), memo_body.c_str(), &out));
      save_session(s, session_path);
      std::cout << json::parse(take(out))["id"].get<std::string>() << "\n";
    } else if (*show) {
      SessionPtr s = open_session(session_path);
      char* out = nullptr;
      if (show_what == "session") {
        check(thematic_session_json(s.get(), &out));
        std::cout << json::parse(take(out)).dump(2) << "\n";
      } else {
        check(thematic_session_phase(s.get(), &out));
        std::cout << json::parse(take(out))["current"].get<std::string>() << "\n";
      }
    } else if (*serve) {
      json config = json::object();
      if (!serve_config.empty()) config = json::parse(slurp(serve_config));
      if (!serve_host.empty()) config["host"] = serve_host;
      if (serve_port) config["port"] = *serve_port;
      if (!serve_store.empty()) config["store_dir"] = serve_store;
      check(thematic_serve(config.dump().c_str()));
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << thematic_status_name(e.status) << ": " << e.message << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: InvalidArgument: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
