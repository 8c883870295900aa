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

#include "thematic/serialize.h"

#include <optional>
#include <string>
#include <vector>

namespace thematic {
namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
void get_opt(const json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    out.reset();
  } else {
    out = it->template get<T>();
  }
}

template <typename T>
void get_or(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it != j.end() && !it->is_null()) out = it->template get<T>();
}

std::string str(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  return it->get<std::string>();
}

}  // namespace

void to_json(json& j, const LocationRef& v) {
  j = json{{"transcript_id", v.transcript_id},
           {"page", opt(v.page)},
           {"paragraph_start", v.paragraph_start},
           {"paragraph_end", v.paragraph_end},
           {"char_start", opt(v.char_start)},
           {"char_end", opt(v.char_end)}};
}

void from_json(const json& j, LocationRef& v) {
  v.transcript_id = str(j, "transcript_id");
  get_opt(j, "page", v.page);
  v.paragraph_start = j.at("paragraph_start").get<int>();
  v.paragraph_end = j.at("paragraph_end").get<int>();
  get_opt(j, "char_start", v.char_start);
  get_opt(j, "char_end", v.char_end);
}

void to_json(json& j, const Paragraph& v) {
  j = json{{"index", v.index}, {"text", v.text}, {"line_offsets", v.line_offsets}};
}

void from_json(const json& j, Paragraph& v) {
  v.index = j.at("index").get<int>();
  v.text = j.at("text").get<std::string>();
  get_or(j, "line_offsets", v.line_offsets);
}

void to_json(json& j, const Page& v) {
  j = json{{"number", v.number},
           {"first_paragraph", v.first_paragraph},
           {"last_paragraph", v.last_paragraph}};
}

void from_json(const json& j, Page& v) {
  v.number = j.at("number").get<int>();
  v.first_paragraph = j.at("first_paragraph").get<int>();
  v.last_paragraph = j.at("last_paragraph").get<int>();
}

void to_json(json& j, const Transcript& v) {
  j = json{{"id", v.id},
           {"title", v.title},
           {"paragraphs", v.paragraphs},
           {"normalization_version", v.normalization_version},
           {"line_width", v.line_width}};
}

void from_json(const json& j, Transcript& v) {
  v.id = j.at("id").get<std::string>();
  v.title = str(j, "title");
  v.paragraphs = j.at("paragraphs").get<std::vector<Paragraph>>();
  get_or(j, "normalization_version", v.normalization_version);
  get_or(j, "line_width", v.line_width);
}

void to_json(json& j, const IntegrityVerdict& v) {
  j = json{{"kind", verdict_name(v.kind)},
           {"matched_location", opt(v.matched_location)},
           {"normalized_distance", opt(v.normalized_distance)},
           {"suggested_exact", opt(v.suggested_exact)}};
}

void from_json(const json& j, IntegrityVerdict& v) {
  v.kind = parse_verdict(j.at("kind").get<std::string>());
  get_opt(j, "matched_location", v.matched_location);
  get_opt(j, "normalized_distance", v.normalized_distance);
  get_opt(j, "suggested_exact", v.suggested_exact);
}

void to_json(json& j, const VerbatimCode& v) {
  j = json{{"type", "verbatim"},
           {"id", v.id},
           {"seq", v.seq},
           {"exact_phrase", v.exact_phrase},
           {"location", v.location},
           {"paragraph_context", v.paragraph_context},
           {"rationale", v.rationale},
           {"status", status_name(v.status)},
           {"origin", origin_name(v.origin)},
           {"integrity", opt(v.integrity)},
           {"needs_human", v.needs_human}};
}

void from_json(const json& j, VerbatimCode& v) {
  v.id = str(j, "id");
  get_or(j, "seq", v.seq);
  v.exact_phrase = j.at("exact_phrase").get<std::string>();
  v.location = j.at("location").get<LocationRef>();
  v.paragraph_context = str(j, "paragraph_context");
  v.rationale = str(j, "rationale");
  if (j.contains("status")) v.status = parse_status(j.at("status").get<std::string>());
  if (j.contains("origin")) v.origin = parse_origin(j.at("origin").get<std::string>());
  get_opt(j, "integrity", v.integrity);
  get_or(j, "needs_human", v.needs_human);
}

void to_json(json& j, const GerundCode& v) {
  j = json{{"type", "gerund"},
           {"id", v.id},
           {"seq", v.seq},
           {"label", v.label},
           {"source_verbatim_ids", v.source_verbatim_ids},
           {"family_id", opt(v.family_id)},
           {"status", status_name(v.status)},
           {"origin", origin_name(v.origin)},
           {"gerund_form", v.gerund_form},
           {"gerund_diagnostic", v.gerund_diagnostic},
           {"needs_human", v.needs_human}};
}

void from_json(const json& j, GerundCode& v) {
  v.id = str(j, "id");
  get_or(j, "seq", v.seq);
  v.label = j.at("label").get<std::string>();
  get_or(j, "source_verbatim_ids", v.source_verbatim_ids);
  get_opt(j, "family_id", v.family_id);
  if (j.contains("status")) v.status = parse_status(j.at("status").get<std::string>());
  if (j.contains("origin")) v.origin = parse_origin(j.at("origin").get<std::string>());
  get_or(j, "gerund_form", v.gerund_form);
  get_or(j, "gerund_diagnostic", v.gerund_diagnostic);
  get_or(j, "needs_human", v.needs_human);
}

void to_json(json& j, const CodeFamily& v) {
  j = json{{"type", "family"},
           {"id", v.id},
           {"seq", v.seq},
           {"label", v.label},
           {"member_gerund_ids", v.member_gerund_ids},
           {"dimension", dimension_name(v.dimension)},
           {"status", status_name(v.status)},
           {"origin", origin_name(v.origin)}};
}

void from_json(const json& j, CodeFamily& v) {
  v.id = str(j, "id");
  get_or(j, "seq", v.seq);
  v.label = j.at("label").get<std::string>();
  get_or(j, "member_gerund_ids", v.member_gerund_ids);
  if (j.contains("dimension")) v.dimension = parse_dimension(j.at("dimension").get<std::string>());
  if (j.contains("status")) v.status = parse_status(j.at("status").get<std::string>());
  if (j.contains("origin")) v.origin = parse_origin(j.at("origin").get<std::string>());
}

void to_json(json& j, const Theme& v) {
  j = json{{"type", "theme"},
           {"id", v.id},
           {"seq", v.seq},
           {"label", v.label},
           {"family_ids", v.family_ids},
           {"definition", v.definition},
           {"supporting_verbatim_ids", v.supporting_verbatim_ids},
           {"dimension", dimension_name(v.dimension)},
           {"status", status_name(v.status)},
           {"origin", origin_name(v.origin)},
           {"evidence_gap", v.evidence_gap}};
}

void from_json(const json& j, Theme& v) {
  v.id = str(j, "id");
  get_or(j, "seq", v.seq);
  v.label = j.at("label").get<std::string>();
  get_or(j, "family_ids", v.family_ids);
  get_or(j, "definition", v.definition);
  get_or(j, "supporting_verbatim_ids", v.supporting_verbatim_ids);
  if (j.contains("dimension")) v.dimension = parse_dimension(j.at("dimension").get<std::string>());
  if (j.contains("status")) v.status = parse_status(j.at("status").get<std::string>());
  if (j.contains("origin")) v.origin = parse_origin(j.at("origin").get<std::string>());
  get_or(j, "evidence_gap", v.evidence_gap);
}

void to_json(json& j, const Comment& v) {
  j = json{{"type", "comment"},
           {"id", v.id},
           {"target_id", v.target_id},
           {"body", v.body},
           {"author_id", v.author_id},
           {"timestamp", v.timestamp}};
}

void from_json(const json& j, Comment& v) {
  v.id = str(j, "id");
  v.target_id = j.at("target_id").get<std::string>();
  v.body = j.at("body").get<std::string>();
  v.author_id = str(j, "author_id");
  v.timestamp = str(j, "timestamp");
}

void to_json(json& j, const IdCounters& v) {
  j = json{{"verbatim", v.verbatim},
           {"gerund", v.gerund},
           {"family", v.family},
           {"theme", v.theme},
           {"comment", v.comment}};
}

void from_json(const json& j, IdCounters& v) {
  get_or(j, "verbatim", v.verbatim);
  get_or(j, "gerund", v.gerund);
  get_or(j, "family", v.family);
  get_or(j, "theme", v.theme);
  get_or(j, "comment", v.comment);
}

void to_json(json& j, const CodeLog& v) {
  j = json{{"transcript_id", v.transcript_id},
           {"verbatims", v.verbatims},
           {"gerunds", v.gerunds},
           {"families", v.families},
           {"themes", v.themes},
           {"comments", v.comments},
           {"version", v.version},
           {"counters", v.counters}};
}

void from_json(const json& j, CodeLog& v) {
  v.transcript_id = str(j, "transcript_id");
  get_or(j, "verbatims", v.verbatims);
  get_or(j, "gerunds", v.gerunds);
  get_or(j, "families", v.families);
  get_or(j, "themes", v.themes);
  get_or(j, "comments", v.comments);
  get_or(j, "version", v.version);
  get_or(j, "counters", v.counters);
}

void to_json(json& j, const IntegritySummary& v) {
  j = json{{"Exact", v.exact},
           {"NearVerbatim", v.near_verbatim},
           {"NotFound", v.not_found},
           {"LocationMismatch", v.location_mismatch}};
}

void from_json(const json& j, IntegritySummary& v) {
  get_or(j, "Exact", v.exact);
  get_or(j, "NearVerbatim", v.near_verbatim);
  get_or(j, "NotFound", v.not_found);
  get_or(j, "LocationMismatch", v.location_mismatch);
}

void to_json(json& j, const IntegrityReport& v) {
  json per = json::array();
  for (const auto& [id, verdict] : v.per_code) per.push_back({{"code_id", id}, {"verdict", verdict}});
  j = json{{"per_code", per}, {"summary", v.summary}};
}

void from_json(const json& j, IntegrityReport& v) {
  v.per_code.clear();
  for (const auto& e : j.at("per_code")) {
    v.per_code.emplace_back(e.at("code_id").get<std::string>(),
                            e.at("verdict").get<IntegrityVerdict>());
  }
  v.summary = j.at("summary").get<IntegritySummary>();
}

void to_json(json& j, const CoverageReport& v) {
  j = json{{"per_paragraph", v.per_paragraph},
           {"uncoded", v.uncoded},
           {"covered_count", v.covered_count},
           {"total_paragraphs", v.total_paragraphs},
           {"coverage_ratio", v.coverage_ratio},
           {"generated_at_phase", phase_name(v.generated_at_phase)}};
}

void from_json(const json& j, CoverageReport& v) {
  v.per_paragraph = j.at("per_paragraph").get<std::vector<std::vector<std::string>>>();
  v.uncoded = j.at("uncoded").get<std::vector<int>>();
  v.covered_count = j.at("covered_count").get<int>();
  v.total_paragraphs = j.at("total_paragraphs").get<int>();
  v.coverage_ratio = j.at("coverage_ratio").get<double>();
  v.generated_at_phase = parse_phase(j.at("generated_at_phase").get<std::string>());
}

void to_json(json& j, const PhaseOverride& v) {
  j = json{{"temperature", opt(v.temperature)}, {"max_tokens", opt(v.max_tokens)}};
}

void from_json(const json& j, PhaseOverride& v) {
  get_opt(j, "temperature", v.temperature);
  get_opt(j, "max_tokens", v.max_tokens);
}

void to_json(json& j, const LlmConfig& v) {
  j = json{{"model_id", v.model_id},
           {"temperature", v.temperature},
           {"max_tokens", v.max_tokens},
           {"system_role", v.system_role},
           {"endpoint", v.endpoint},
           {"backend", v.backend == BackendKind::kLive ? "live" : "mock"},
           {"api_key_env", v.api_key_env},
           {"fixture_dir", v.fixture_dir},
           {"max_in_flight", v.max_in_flight},
           {"max_retries", v.max_retries},
           {"backoff_initial_ms", v.backoff_initial_ms},
           {"timeout_seconds", v.timeout_seconds},
           {"phase_overrides", v.phase_overrides}};
}

void from_json(const json& j, LlmConfig& v) {
  get_or(j, "model_id", v.model_id);
  get_or(j, "temperature", v.temperature);
  get_or(j, "max_tokens", v.max_tokens);
  get_or(j, "system_role", v.system_role);
  get_or(j, "endpoint", v.endpoint);
  if (j.contains("backend")) {
    std::string b = j.at("backend").get<std::string>();
    if (b == "live") {
      v.backend = BackendKind::kLive;
    } else if (b == "mock") {
      v.backend = BackendKind::kMock;
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown backend: " + b);
    }
  }
  get_or(j, "api_key_env", v.api_key_env);
  get_or(j, "fixture_dir", v.fixture_dir);
  get_or(j, "max_in_flight", v.max_in_flight);
  get_or(j, "max_retries", v.max_retries);
  get_or(j, "backoff_initial_ms", v.backoff_initial_ms);
  get_or(j, "timeout_seconds", v.timeout_seconds);
  get_or(j, "phase_overrides", v.phase_overrides);
}

void to_json(json& j, const RawCompletion& v) {
  j = json{{"request_hash", v.request_hash},
           {"template_id", v.template_id},
           {"response_text", v.response_text},
           {"usage", v.usage},
           {"timestamp", v.timestamp}};
}

void from_json(const json& j, RawCompletion& v) {
  v.request_hash = j.at("request_hash").get<std::string>();
  v.template_id = str(j, "template_id");
  v.response_text = j.at("response_text").get<std::string>();
  v.usage = j.value("usage", json::object());
  v.timestamp = str(j, "timestamp");
}

void to_json(json& j, const CandidateCode& v) {
  j = json{{"code_phrase", v.code_phrase},
           {"passage", v.passage},
           {"page", v.page},
           {"rationale", v.rationale}};
}

void from_json(const json& j, CandidateCode& v) {
  v.code_phrase = str(j, "code_phrase");
  v.passage = str(j, "passage");
  get_or(j, "page", v.page);
  v.rationale = str(j, "rationale");
}

void to_json(json& j, const GerundMapping& v) {
  j = json{{"verbatim_phrase", v.verbatim_phrase},
           {"gerund_label", v.gerund_label},
           {"family_label", v.family_label},
           {"matched_code_id", opt(v.matched_code_id)},
           {"unmatched", v.unmatched}};
}

void from_json(const json& j, GerundMapping& v) {
  v.verbatim_phrase = str(j, "verbatim_phrase");
  v.gerund_label = str(j, "gerund_label");
  v.family_label = str(j, "family_label");
  get_opt(j, "matched_code_id", v.matched_code_id);
  get_or(j, "unmatched", v.unmatched);
}

void to_json(json& j, const ThemeProposal& v) {
  j = json{{"label", v.label},
           {"family_labels", v.family_labels},
           {"dimension", dimension_name(v.dimension)}};
}

void from_json(const json& j, ThemeProposal& v) {
  v.label = str(j, "label");
  get_or(j, "family_labels", v.family_labels);
  if (j.contains("dimension")) v.dimension = parse_dimension(j.at("dimension").get<std::string>());
}

void to_json(json& j, const RevisionAction& v) {
  j = json{{"id", v.id},
           {"kind", action_kind_name(v.kind)},
           {"target_id", v.target_id},
           {"before", v.before},
           {"after", v.after},
           {"rationale", v.rationale},
           {"actor_id", v.actor_id},
           {"phase", phase_name(v.phase)},
           {"timestamp", v.timestamp},
           {"sequence", v.sequence},
           {"base_version", v.base_version},
           {"integrity_exempt", v.integrity_exempt}};
}

void from_json(const json& j, RevisionAction& v) {
  v.id = j.at("id").get<std::string>();
  v.kind = parse_action_kind(j.at("kind").get<std::string>());
  v.target_id = str(j, "target_id");
  v.before = j.value("before", json());
  v.after = j.value("after", json());
  v.rationale = str(j, "rationale");
  v.actor_id = str(j, "actor_id");
  v.phase = parse_phase(j.at("phase").get<std::string>());
  v.timestamp = str(j, "timestamp");
  v.sequence = j.at("sequence").get<int>();
  get_or(j, "base_version", v.base_version);
  get_or(j, "integrity_exempt", v.integrity_exempt);
}

void to_json(json& j, const ActionRequest& v) {
  j = json{{"kind", action_kind_name(v.kind)},
           {"target_id", v.target_id},
           {"after", v.after},
           {"rationale", v.rationale},
           {"actor_id", v.actor_id},
           {"integrity_exempt", v.integrity_exempt}};
}

void from_json(const json& j, ActionRequest& v) {
  v.kind = parse_action_kind(j.at("kind").get<std::string>());
  v.target_id = str(j, "target_id");
  v.after = j.value("after", json());
  v.rationale = str(j, "rationale");
  v.actor_id = str(j, "actor_id");
  get_or(j, "integrity_exempt", v.integrity_exempt);
}

void to_json(json& j, const ActionCounts& v) {
  j = json{{"comments", v.comments},
           {"insertions", v.insertions},
           {"deletions_and_rejections", v.deletions_and_rejections},
           {"refinements", v.refinements},
           {"total", v.total}};
}

void from_json(const json& j, ActionCounts& v) {
  get_or(j, "comments", v.comments);
  get_or(j, "insertions", v.insertions);
  get_or(j, "deletions_and_rejections", v.deletions_and_rejections);
  get_or(j, "refinements", v.refinements);
  get_or(j, "total", v.total);
}

void to_json(json& j, const ActionSummary& v) { j = json{{"per_actor", v.per_actor}}; }

void from_json(const json& j, ActionSummary& v) { get_or(j, "per_actor", v.per_actor); }

void to_json(json& j, const SessionSettings& v) {
  j = json{{"page_size", v.page_size},
           {"line_width", v.line_width},
           {"near_threshold", v.near_threshold},
           {"repair_budget", v.repair_budget},
           {"gerund_exceptions", v.gerund_exceptions}};
}

void from_json(const json& j, SessionSettings& v) {
  get_or(j, "page_size", v.page_size);
  get_or(j, "line_width", v.line_width);
  get_or(j, "near_threshold", v.near_threshold);
  get_or(j, "repair_budget", v.repair_budget);
  get_or(j, "gerund_exceptions", v.gerund_exceptions);
}

void to_json(json& j, const PhaseState& v) {
  j = json{{"current", phase_name(v.current)},
           {"entered_at", v.entered_at},
           {"authorized_by", opt(v.authorized_by)}};
}

void from_json(const json& j, PhaseState& v) {
  v.current = parse_phase(j.at("current").get<std::string>());
  v.entered_at = str(j, "entered_at");
  get_opt(j, "authorized_by", v.authorized_by);
}

void to_json(json& j, const LinkedRef& v) {
  j = json{{"object_id", v.object_id}, {"location", opt(v.location)}};
}

void from_json(const json& j, LinkedRef& v) {
  v.object_id = str(j, "object_id");
  get_opt(j, "location", v.location);
}

void to_json(json& j, const Memo& v) {
  j = json{{"id", v.id},
           {"kind", memo_kind_name(v.kind)},
           {"phase", phase_name(v.phase)},
           {"body", v.body},
           {"linked_refs", v.linked_refs},
           {"author", origin_name(v.author)},
           {"author_id", v.author_id},
           {"timestamp", v.timestamp}};
}

void from_json(const json& j, Memo& v) {
  v.id = j.at("id").get<std::string>();
  v.kind = parse_memo_kind(j.at("kind").get<std::string>());
  v.phase = parse_phase(j.at("phase").get<std::string>());
  v.body = str(j, "body");
  get_or(j, "linked_refs", v.linked_refs);
  v.author = parse_origin(j.at("author").get<std::string>());
  v.author_id = str(j, "author_id");
  v.timestamp = str(j, "timestamp");
}

void to_json(json& j, const InteractionEntry& v) {
  j = json{{"sequence", v.sequence},
           {"direction", direction_name(v.direction)},
           {"phase", phase_name(v.phase)},
           {"payload", v.payload},
           {"timestamp", v.timestamp},
           {"prev_hash", v.prev_hash},
           {"hash", v.hash}};
}

void from_json(const json& j, InteractionEntry& v) {
  v.sequence = j.at("sequence").get<int>();
  v.direction = parse_direction(j.at("direction").get<std::string>());
  v.phase = parse_phase(j.at("phase").get<std::string>());
  v.payload = j.at("payload").get<std::string>();
  v.timestamp = str(j, "timestamp");
  v.prev_hash = str(j, "prev_hash");
  v.hash = str(j, "hash");
}

void to_json(json& j, const Session& v) {
  j = json{{"id", v.id},
           {"research_question", v.research_question},
           {"coding_mode", coding_mode_name(v.coding_mode)},
           {"transcript", opt(v.transcript)},
           {"phase", v.phase},
           {"code_log", v.code_log},
           {"memos", v.memos},
           {"memo_counter", v.memo_counter},
           {"revision_trail", v.trail},
           {"interaction_log", v.interaction_log},
           {"llm_config", v.llm_config},
           {"settings", v.settings},
           {"integrity_report", opt(v.integrity_report)},
           {"coverage_report", opt(v.coverage_report)},
           {"report", v.report}};
}

void from_json(const json& j, Session& v) {
  v.id = j.at("id").get<std::string>();
  v.research_question = str(j, "research_question");
  v.coding_mode = parse_coding_mode(j.at("coding_mode").get<std::string>());
  get_opt(j, "transcript", v.transcript);
  v.phase = j.at("phase").get<PhaseState>();
  get_or(j, "code_log", v.code_log);
  get_or(j, "memos", v.memos);
  get_or(j, "memo_counter", v.memo_counter);
  get_or(j, "revision_trail", v.trail);
  get_or(j, "interaction_log", v.interaction_log);
  get_or(j, "llm_config", v.llm_config);
  get_or(j, "settings", v.settings);
  get_opt(j, "integrity_report", v.integrity_report);
  get_opt(j, "coverage_report", v.coverage_report);
  get_or(j, "report", v.report);
}

json code_object_json(const CodeLog& log, std::string_view id) {
  if (const auto* v = log.find_verbatim(id)) return *v;
  if (const auto* g = log.find_gerund(id)) return *g;
  if (const auto* f = log.find_family(id)) return *f;
  if (const auto* t = log.find_theme(id)) return *t;
  if (const auto* c = log.find_comment(id)) return *c;
  fail(ErrorCode::kTargetNotFound, "no object with id " + std::string(id));
}

}  // namespace thematic
