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

// The consent-gated six-phase session.
//
// Every state change goes through one of the functions below. Each records
// itself in the interaction log as a human_action entry whose payload is the
// command that produced it, followed by any prompt/response pairs it
// exchanged with the gateway. replay() re-executes those commands against
// the recorded responses and must arrive at an identical session.
//
// Operations that fail leave the session untouched.

#ifndef THEMATIC_WORKFLOW_H_
#define THEMATIC_WORKFLOW_H_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "thematic/codelog.h"
#include "thematic/coverage.h"
#include "thematic/gateway.h"
#include "thematic/integrity.h"
#include "thematic/model.h"
#include "thematic/revision.h"
#include "thematic/transcript.h"

namespace thematic {

using Clock = std::function<std::string()>;

// ISO-8601 UTC wall clock.
Clock system_clock();
// Deterministic clock: start, start+1s, start+2s, ...
Clock logical_clock(std::string start = "2026-01-01T00:00:00Z");

struct SessionSettings {
  int page_size = kDefaultPageSize;
  int line_width = kDefaultLineWidth;
  double near_threshold = kDefaultNearThreshold;
  int repair_budget = 1;
  std::vector<std::string> gerund_exceptions;

  bool operator==(const SessionSettings&) const = default;
};

struct PhaseState {
  Phase current = Phase::kSetup;
  std::string entered_at;
  std::optional<std::string> authorized_by;

  bool operator==(const PhaseState&) const = default;
};

struct LinkedRef {
  std::string object_id;
  std::optional<LocationRef> location;

  bool operator==(const LinkedRef&) const = default;
};

struct Memo {
  std::string id;
  MemoKind kind = MemoKind::kAnalytic;
  Phase phase = Phase::kSetup;
  std::string body;
  std::vector<LinkedRef> linked_refs;
  Origin author = Origin::kAi;
  std::string author_id;
  std::string timestamp;

  bool operator==(const Memo&) const = default;
};

enum class Direction { kPrompt, kResponse, kHumanAction };

std::string_view direction_name(Direction d);
Direction parse_direction(std::string_view name);

struct InteractionEntry {
  int sequence = 0;
  Direction direction = Direction::kHumanAction;
  Phase phase = Phase::kSetup;
  std::string payload;
  std::string timestamp;
  std::string prev_hash;
  std::string hash;

  bool operator==(const InteractionEntry&) const = default;
};

std::string entry_hash(const InteractionEntry& entry);

struct Session {
  std::string id;
  std::string research_question;
  CodingMode coding_mode = CodingMode::kExactPlusDescriptive;
  std::optional<Transcript> transcript;
  PhaseState phase;
  CodeLog code_log;
  std::vector<Memo> memos;
  int memo_counter = 0;
  std::vector<RevisionAction> trail;
  std::vector<InteractionEntry> interaction_log;
  LlmConfig llm_config;
  SessionSettings settings;
  std::optional<IntegrityReport> integrity_report;
  std::optional<CoverageReport> coverage_report;
  std::string report;

  // Not part of the session state.
  Clock clock;

  const Memo* find_memo(std::string_view id) const;
  const Transcript& require_transcript() const;
};

// Seeds the interaction log with the setup prompt. Throws
// EmptyResearchQuestion.
Session create_session(std::string research_question, CodingMode mode, LlmConfig llm_config,
                       SessionSettings settings = {}, Clock clock = {});

// Setup only; the transcript is immutable once loaded.
void ingest_transcript(Session& s, const std::string& actor, std::string_view raw_text,
                       const std::string& title);

struct Approval {
  std::string actor_id;
  Phase target = Phase::kSetup;
};

// Throws UnauthorizedAdvance, PhaseOrderViolation, ModeViolation,
// SetupIncomplete.
void advance(Session& s, const std::optional<Approval>& approval);

// Moves back to an earlier phase; later forward moves repeat the consent
// gates.
void revert(Session& s, const std::optional<Approval>& approval);

struct Phase1Result {
  Memo narrative;
  std::vector<Memo> segmented;
};

struct Phase3Result {
  std::vector<GerundCode> gerunds;
  std::vector<CodeFamily> families;
  std::vector<GerundMapping> unmatched;
};

struct Phase6Result {
  std::vector<Theme> definitions;
  std::string report;
};

Phase1Result run_phase1(Session& s, Gateway& gateway, const std::string& actor);
std::vector<VerbatimCode> run_phase2(Session& s, Gateway& gateway, const std::string& actor);
Phase3Result run_phase3(Session& s, Gateway& gateway, const std::string& actor);
std::vector<Theme> run_phase4(Session& s, Gateway& gateway, const std::string& actor);
std::vector<Memo> run_phase5(Session& s, Gateway& gateway, const std::string& actor);
Phase6Result run_phase6(Session& s, Gateway& gateway, const std::string& actor);

// Runs whichever phase is current; returns a JSON summary of its output.
nlohmann::json run_current_phase(Session& s, Gateway& gateway, const std::string& actor);

RevisionAction apply_revision(Session& s, const ActionRequest& request);

struct AuditResult {
  IntegrityReport integrity;
  CoverageReport coverage;
};

// Validates every active code, audits coverage and stores both reports.
AuditResult audit_session(Session& s, const std::string& actor);

// Pure variants that do not touch the session.
IntegrityReport compute_integrity(const Session& s);
CoverageReport compute_coverage(const Session& s);

// Methodological memo holding a reflexive question. An empty positionality
// produces a request for one without calling the gateway.
Memo generate_reflexive_prompt(Session& s, Gateway& gateway, const std::string& actor,
                               std::string_view positionality);

Memo record_memo(Session& s, const std::string& actor, MemoKind kind, std::string body,
                 std::vector<LinkedRef> linked_refs = {});

// The session as create_session returned it: same id, question, mode and
// configuration, with only the seed entry in its log.
Session initial_state(const Session& s);

// Re-executes the logged commands on top of initial using only the recorded
// responses. Throws LogCorruption on sequence gaps, hash mismatches or
// divergence.
Session replay(const std::vector<InteractionEntry>& log, const Session& initial);

// Throws LogCorruption unless sequences are contiguous from 1 and every
// hash links to its predecessor.
void verify_log_chain(const std::vector<InteractionEntry>& log);

// Line-delimited JSON, one entry per line.
std::string export_interaction_log(const Session& s);
std::vector<InteractionEntry> parse_interaction_log(std::string_view ndjson);

// Trail as line-delimited JSON with a hash chain over the records.
std::string export_trail(const Session& s);

// Canonical serialized form used for equality checks.
std::string fingerprint(const Session& s);

}  // namespace thematic

#endif  // THEMATIC_WORKFLOW_H_
