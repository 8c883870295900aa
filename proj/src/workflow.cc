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

#include "thematic/workflow.h"

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <future>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <utility>

#include "thematic/error.h"
#include "thematic/report.h"
#include "thematic/serialize.h"
#include "thematic/text.h"

namespace thematic {
namespace {

using nlohmann::json;

constexpr std::string_view kSetupPrompt =
    "Session setup. Provide the research question, the interview transcript to analyse, and "
    "the coding mode: exact_keyword_only (stop after verbatim coding) or "
    "exact_plus_descriptive (continue to gerund-based descriptive coding and themes).";

constexpr std::string_view kPositionalityRequest =
    "Before reflexive prompts can be generated, describe your positionality: your professional "
    "background, your relationship to the participants or setting, and any experiences that "
    "may shape what you notice in the data.";

std::string format_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::time_t parse_utc(const std::string& s) {
  std::tm tm{};
  std::istringstream in(s);
  in >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  if (in.fail()) fail(ErrorCode::kInvalidArgument, "bad timestamp: " + s);
  return timegm(&tm);
}

std::string now(Session& s) {
  if (!s.clock) s.clock = system_clock();
  return s.clock();
}

InteractionEntry& append(Session& s, Direction direction, std::string payload,
                         std::optional<std::string> timestamp = std::nullopt) {
  InteractionEntry e;
  e.sequence = static_cast<int>(s.interaction_log.size()) + 1;
  e.direction = direction;
  e.phase = s.phase.current;
  e.payload = std::move(payload);
  e.timestamp = timestamp ? *timestamp : now(s);
  e.prev_hash = s.interaction_log.empty() ? std::string() : s.interaction_log.back().hash;
  e.hash = entry_hash(e);
  s.interaction_log.push_back(std::move(e));
  return s.interaction_log.back();
}

std::string log_human(Session& s, const json& command) {
  return append(s, Direction::kHumanAction, command.dump()).timestamp;
}

void require_actor(const std::string& actor) {
  if (text::trim(actor).empty()) fail(ErrorCode::kInvalidArgument, "an actor id is required");
}

void require_phase(const Session& s, Phase p) {
  if (s.phase.current != p) {
    fail(ErrorCode::kWrongPhase, std::string(phase_name(p)) + " outputs cannot be produced in " +
                                     std::string(phase_name(s.phase.current)));
  }
}

void require_started(const Session& s) {
  if (s.phase.current == Phase::kSetup) {
    fail(ErrorCode::kWrongPhase, "the session has not left Setup");
  }
}

Memo& add_memo(Session& s, MemoKind kind, std::string body, std::vector<LinkedRef> refs,
               Origin author, std::string author_id, std::string timestamp) {
  Memo m;
  m.id = "M" + std::to_string(++s.memo_counter);
  m.kind = kind;
  m.phase = s.phase.current;
  m.body = std::move(body);
  m.linked_refs = std::move(refs);
  m.author = author;
  m.author_id = std::move(author_id);
  m.timestamp = std::move(timestamp);
  s.memos.push_back(std::move(m));
  return s.memos.back();
}

struct Exchange {
  std::string template_id;
  std::string prompt;
  RawCompletion completion;
};

Bindings base_bindings(const Session& s) { return {{"research_question", s.research_question}}; }

Exchange exchange(Gateway& gw, std::string_view template_id, const Bindings& bindings,
                  Phase phase) {
  Exchange ex;
  ex.template_id = std::string(template_id);
  ex.prompt = render_prompt(builtin_template(template_id), bindings);
  ex.completion = gw.complete(template_id, ex.prompt, phase);
  return ex;
}

// Appends the prompt and response records; returns the response timestamp.
std::string log_exchange(Session& s, Exchange& ex) {
  json prompt = {{"template_id", ex.template_id},
                 {"request_hash", ex.completion.request_hash},
                 {"prompt", ex.prompt}};
  append(s, Direction::kPrompt, prompt.dump());
  const std::string ts = now(s);
  ex.completion.timestamp = ts;
  append(s, Direction::kResponse, json(ex.completion).dump(), ts);
  return ts;
}

// Runs tasks either concurrently or in order; results keep task order and
// the first failure (in task order) is rethrown after all tasks finish.
template <typename T>
std::vector<T> run_all(std::vector<std::function<T()>> tasks, bool concurrent) {
  std::vector<T> results;
  results.reserve(tasks.size());
  if (!concurrent) {
    for (auto& t : tasks) results.push_back(t());
    return results;
  }
  std::vector<std::future<T>> futures;
  futures.reserve(tasks.size());
  for (auto& t : tasks) futures.push_back(std::async(std::launch::async, t));
  std::exception_ptr first;
  for (auto& f : futures) {
    try {
      results.push_back(f.get());
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return results;
}

// ---- Phase 1 -----------------------------------------------------------------

Phase1Result do_phase1(Session& s, Gateway& gw, const std::string& actor, bool concurrent) {
  require_actor(actor);
  require_phase(s, Phase::kFamiliarization);
  const Transcript& t = s.require_transcript();
  const std::vector<Page> pages = segment_pages(t, s.settings.page_size);
  const Phase phase = s.phase.current;

  std::vector<std::function<Exchange()>> tasks;
  tasks.push_back([&] {
    Bindings b = base_bindings(s);
    b["text_segment"] = render(t);
    return exchange(gw, "p1_narrative", b, phase);
  });
  for (const Page& page : pages) {
    tasks.push_back([&, page] {
      Bindings b = base_bindings(s);
      b["page_number"] = std::to_string(page.number);
      b["text_segment"] = page_text(t, page);
      return exchange(gw, "p1_segment", b, phase);
    });
  }
  std::vector<Exchange> exchanges = run_all(std::move(tasks), concurrent);

  log_human(s, {{"op", "run"}, {"actor", actor}, {"phase", phase_name(phase)}});
  Phase1Result result;
  {
    const std::string ts = log_exchange(s, exchanges[0]);
    result.narrative =
        add_memo(s, MemoKind::kPhaseSummary, exchanges[0].completion.response_text,
                 {{t.id, LocationRef::paragraphs(t.id, 1, t.paragraph_count())}}, Origin::kAi,
                 actor, ts);
  }
  for (std::size_t i = 0; i < pages.size(); ++i) {
    Exchange& ex = exchanges[i + 1];
    const std::string ts = log_exchange(s, ex);
    LocationRef loc = LocationRef::paragraphs(t.id, pages[i].first_paragraph,
                                              pages[i].last_paragraph);
    loc.page = pages[i].number;
    result.segmented.push_back(add_memo(s, MemoKind::kSegmentedSummary,
                                        ex.completion.response_text, {{t.id, loc}}, Origin::kAi,
                                        actor, ts));
  }
  return result;
}

// ---- Phase 2 -----------------------------------------------------------------

struct PageOutcome {
  std::vector<Exchange> exchanges;
  std::vector<VerbatimCode> codes;
};

std::string combine_rationale(const CandidateCode& c) {
  if (c.code_phrase.empty()) return c.rationale;
  if (c.rationale.empty()) return c.code_phrase;
  return c.code_phrase + ": " + c.rationale;
}

PageOutcome extract_page(const Session& s, Gateway& gw, const Page& page) {
  const Transcript& t = *s.transcript;
  const Phase phase = s.phase.current;
  PageOutcome out;
  Bindings b = base_bindings(s);
  b["page_number"] = std::to_string(page.number);
  b["text_segment"] = page_text(t, page);

  std::optional<Parsed<CandidateCode>> parsed;
  for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
    out.exchanges.push_back(exchange(gw, "p2_extract", b, phase));
    try {
      parsed = parse_code_entries(out.exchanges.back().completion.response_text, page);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kParseError || attempt == 1) throw;
    }
  }

  const LocationRef page_range =
      LocationRef::paragraphs(t.id, page.first_paragraph, page.last_paragraph);
  for (CandidateCode cand : parsed->items) {
    IntegrityVerdict verdict = check_exact(cand.passage, t, page_range);
    for (int r = 0; r < s.settings.repair_budget && verdict.kind == VerdictKind::kNotFound; ++r) {
      Bindings rb = b;
      rb["prior_codes"] = emit_code_entries({cand});
      out.exchanges.push_back(exchange(gw, "p2_repair", rb, phase));
      try {
        Parsed<CandidateCode> fixed =
            parse_code_entries(out.exchanges.back().completion.response_text, page);
        if (!fixed.items.empty() && !fixed.items.front().passage.empty()) {
          cand.passage = fixed.items.front().passage;
          if (!fixed.items.front().code_phrase.empty()) {
            cand.code_phrase = fixed.items.front().code_phrase;
          }
          if (!fixed.items.front().rationale.empty()) {
            cand.rationale = fixed.items.front().rationale;
          }
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kParseError) throw;
      }
      verdict = check_exact(cand.passage, t, page_range);
    }
    if (verdict.kind == VerdictKind::kNotFound) {
      verdict = detect_near_verbatim(cand.passage, t, s.settings.near_threshold);
    }
    const std::string phrase = text::normalize(cand.passage);
    if (phrase.empty()) continue;
    VerbatimCode code;
    code.exact_phrase = phrase;
    code.location = verdict.matched_location ? *verdict.matched_location : page_range;
    code.location.page = page_of(code.location.paragraph_start, s.settings.page_size);
    code.paragraph_context =
        verdict.matched_location ? t.paragraph(code.location.paragraph_start).text : "";
    code.rationale = combine_rationale(cand);
    code.origin = Origin::kAi;
    code.status = CodeStatus::kAiProposed;
    code.needs_human = verdict.kind != VerdictKind::kExact;
    code.integrity = verdict;
    bool duplicate = false;
    for (const auto& c : out.codes) {
      duplicate = duplicate || (c.exact_phrase == code.exact_phrase && c.location == code.location);
    }
    if (!duplicate) out.codes.push_back(std::move(code));
  }
  return out;
}

std::vector<VerbatimCode> do_phase2(Session& s, Gateway& gw, const std::string& actor,
                                    bool concurrent) {
  require_actor(actor);
  require_phase(s, Phase::kExactKeyword);
  const Transcript& t = s.require_transcript();
  const std::vector<Page> pages = segment_pages(t, s.settings.page_size);

  std::vector<std::function<PageOutcome()>> tasks;
  for (const Page& page : pages) {
    tasks.push_back([&, page] { return extract_page(s, gw, page); });
  }
  std::vector<PageOutcome> outcomes = run_all(std::move(tasks), concurrent);

  log_human(s, {{"op", "run"}, {"actor", actor}, {"phase", phase_name(s.phase.current)}});
  std::vector<VerbatimCode> created;
  for (PageOutcome& outcome : outcomes) {
    for (Exchange& ex : outcome.exchanges) log_exchange(s, ex);
    for (VerbatimCode& code : outcome.codes) created.push_back(s.code_log.add_verbatim(code));
  }
  ++s.code_log.version;
  return created;
}

// ---- Phase 3 -----------------------------------------------------------------

Phase3Result do_phase3(Session& s, Gateway& gw, const std::string& actor) {
  require_actor(actor);
  require_phase(s, Phase::kDescriptivePattern);
  if (s.coding_mode == CodingMode::kExactKeywordOnly) {
    fail(ErrorCode::kModeViolation, "descriptive coding is disabled for this session");
  }
  const auto active = s.code_log.active_verbatims();
  if (active.empty()) fail(ErrorCode::kNoActiveCodes, "no active verbatim codes to describe");

  std::string listing;
  for (const VerbatimCode* c : active) listing += "- \"" + c->exact_phrase + "\"\n";
  Bindings b = base_bindings(s);
  b["prior_codes"] = listing;
  Exchange ex = exchange(gw, "p3_gerunds", b, s.phase.current);
  Parsed<GerundMapping> parsed = parse_gerund_mappings(ex.completion.response_text, &s.code_log);

  log_human(s, {{"op", "run"}, {"actor", actor}, {"phase", phase_name(s.phase.current)}});
  log_exchange(s, ex);
  Phase3Result result;
  std::vector<std::string> gerund_ids;
  std::vector<std::string> family_ids;
  for (const GerundMapping& m : parsed.items) {
    if (m.unmatched || !m.matched_code_id) {
      result.unmatched.push_back(m);
      continue;
    }
    if (text::normalize(m.gerund_label).empty()) continue;
    const std::string gid = derive_gerund(s.code_log, {*m.matched_code_id}, m.gerund_label,
                                          Origin::kAi, s.settings.gerund_exceptions)
                                .id;
    gerund_ids.push_back(gid);
    const std::string family_label = text::normalize(m.family_label);
    if (family_label.empty()) continue;
    std::string fid;
    if (const CodeFamily* existing = s.code_log.family_by_label(family_label)) {
      fid = existing->id;
    } else {
      CodeFamily f;
      f.label = family_label;
      f.origin = Origin::kAi;
      f.status = CodeStatus::kAiProposed;
      fid = s.code_log.add_family(std::move(f)).id;
      family_ids.push_back(fid);
    }
    s.code_log.assign_family(gid, fid);
  }
  ++s.code_log.version;
  for (const auto& id : gerund_ids) result.gerunds.push_back(*s.code_log.find_gerund(id));
  for (const auto& id : family_ids) result.families.push_back(*s.code_log.find_family(id));
  return result;
}

// ---- Phase 4 -----------------------------------------------------------------

std::vector<Theme> do_phase4(Session& s, Gateway& gw, const std::string& actor) {
  require_actor(actor);
  require_phase(s, Phase::kThemeDevelopment);
  std::string listing;
  for (const CodeFamily& f : s.code_log.families) {
    if (!is_active(f.status)) continue;
    listing += "- " + f.label + ":";
    std::string sep = " ";
    for (const auto& gid : f.member_gerund_ids) {
      const GerundCode* g = s.code_log.find_gerund(gid);
      if (g == nullptr || !is_active(g->status)) continue;
      listing += sep + g->label;
      sep = "; ";
    }
    listing += "\n";
  }
  if (listing.empty()) fail(ErrorCode::kNoFamilies, "no active code families to cluster");

  Bindings b = base_bindings(s);
  b["prior_codes"] = listing;
  Exchange ex = exchange(gw, "p4_themes", b, s.phase.current);
  Parsed<ThemeProposal> parsed = parse_theme_proposals(ex.completion.response_text);

  log_human(s, {{"op", "run"}, {"actor", actor}, {"phase", phase_name(s.phase.current)}});
  log_exchange(s, ex);
  std::vector<std::string> theme_ids;
  for (const ThemeProposal& p : parsed.items) {
    const std::string label = text::normalize(p.label);
    if (label.empty() || s.code_log.theme_by_label(label) != nullptr) continue;
    Theme theme;
    theme.label = label;
    theme.dimension = p.dimension;
    theme.origin = Origin::kAi;
    theme.status = CodeStatus::kAiProposed;
    std::set<std::string> seen;
    for (const auto& fl : p.family_labels) {
      const CodeFamily* f = s.code_log.family_by_label(fl);
      if (f == nullptr || !seen.insert(f->id).second) continue;
      theme.family_ids.push_back(f->id);
    }
    if (theme.family_ids.empty()) continue;
    std::set<std::string> quoted;
    for (const auto& fid : theme.family_ids) {
      CodeFamily* f = s.code_log.find_family(fid);
      if (f->dimension == Dimension::kUnassigned) f->dimension = theme.dimension;
      for (const auto& gid : f->member_gerund_ids) {
        const GerundCode* g = s.code_log.find_gerund(gid);
        if (g == nullptr || !is_active(g->status)) continue;
        for (const auto& vid : g->source_verbatim_ids) {
          if (quoted.insert(vid).second) theme.supporting_verbatim_ids.push_back(vid);
        }
      }
    }
    theme_ids.push_back(s.code_log.add_theme(std::move(theme)).id);
  }
  ++s.code_log.version;
  std::vector<Theme> themes;
  for (const auto& id : theme_ids) themes.push_back(*s.code_log.find_theme(id));
  return themes;
}

// ---- Phases 5 and 6 ------------------------------------------------------------

bool resolvable(const Session& s, const std::string& verbatim_id) {
  const VerbatimCode* v = s.code_log.find_verbatim(verbatim_id);
  if (v == nullptr || !is_active(v->status)) return false;
  try {
    check_location(*s.transcript, v->location);
  } catch (const Error&) {
    return false;
  }
  return true;
}

std::string theme_block(const Session& s, const Theme& theme) {
  std::string out = "Label: " + theme.label + "\n";
  out += "Dimension: " + std::string(dimension_name(theme.dimension)) + "\n";
  out += "Families:";
  std::string sep = " ";
  for (const auto& fid : theme.family_ids) {
    if (const CodeFamily* f = s.code_log.find_family(fid)) {
      out += sep + f->label;
      sep = "; ";
    }
  }
  out += "\nSupporting evidence:\n";
  bool any = false;
  for (const auto& vid : theme.supporting_verbatim_ids) {
    if (!resolvable(s, vid)) continue;
    const VerbatimCode* v = s.code_log.find_verbatim(vid);
    out += "- \"" + v->exact_phrase + "\" (" +
           trace_reference(*s.transcript, v->location, s.settings.page_size) + ")\n";
    any = true;
  }
  if (!any) out += "- none\n";
  return out;
}

std::vector<const Theme*> active_themes(const Session& s) {
  std::vector<const Theme*> out;
  for (const Theme& t : s.code_log.themes) {
    if (is_active(t.status)) out.push_back(&t);
  }
  return out;
}

std::vector<Memo> do_phase5(Session& s, Gateway& gw, const std::string& actor) {
  require_actor(actor);
  require_phase(s, Phase::kThemeReview);
  std::vector<std::pair<std::string, Exchange>> exchanges;
  for (const Theme* theme : active_themes(s)) {
    Bindings b = base_bindings(s);
    b["prior_codes"] = theme_block(s, *theme);
    exchanges.emplace_back(theme->id, exchange(gw, "p5_review", b, s.phase.current));
  }

  log_human(s, {{"op", "run"}, {"actor", actor}, {"phase", phase_name(s.phase.current)}});
  std::vector<Memo> memos;
  for (auto& [theme_id, ex] : exchanges) {
    const std::string ts = log_exchange(s, ex);
    Theme* theme = s.code_log.find_theme(theme_id);
    bool supported = false;
    for (const auto& vid : theme->supporting_verbatim_ids) supported = supported || resolvable(s, vid);
    theme->evidence_gap = !supported;
    memos.push_back(add_memo(s, MemoKind::kAnalytic, ex.completion.response_text,
                             {{theme_id, std::nullopt}}, Origin::kAi, actor, ts));
  }
  ++s.code_log.version;
  return memos;
}

Phase6Result do_phase6(Session& s, Gateway& gw, const std::string& actor) {
  require_actor(actor);
  require_phase(s, Phase::kDefineReport);
  std::vector<std::pair<std::string, Exchange>> exchanges;
  for (const Theme* theme : active_themes(s)) {
    Bindings b = base_bindings(s);
    b["prior_codes"] = theme_block(s, *theme);
    exchanges.emplace_back(theme->id, exchange(gw, "p6_define", b, s.phase.current));
  }

  log_human(s, {{"op", "run"}, {"actor", actor}, {"phase", phase_name(s.phase.current)}});
  Phase6Result result;
  for (auto& [theme_id, ex] : exchanges) {
    log_exchange(s, ex);
    Theme* theme = s.code_log.find_theme(theme_id);
    theme->definition = text::trim(ex.completion.response_text);
    result.definitions.push_back(*theme);
  }
  s.integrity_report = validate_session(s.code_log, *s.transcript, s.settings.near_threshold);
  s.coverage_report =
      audit(*s.transcript, s.code_log.verbatims, default_coverage_statuses(), s.phase.current);
  ++s.code_log.version;
  s.report = render_report(s);
  result.report = s.report;
  return result;
}

// ---- Human actions -------------------------------------------------------------

void do_ingest(Session& s, const std::string& actor, std::string_view raw, const std::string& title) {
  require_actor(actor);
  require_phase(s, Phase::kSetup);
  if (s.transcript) fail(ErrorCode::kInvalidArgument, "the transcript is already loaded");
  Transcript t = ingest(raw, title, s.settings.page_size, s.settings.line_width);
  log_human(s, {{"op", "ingest"}, {"actor", actor}, {"title", title}, {"raw_text", raw}});
  s.code_log.transcript_id = t.id;
  s.transcript = std::move(t);
}

void do_advance(Session& s, const std::optional<Approval>& approval) {
  if (!approval || text::trim(approval->actor_id).empty()) {
    fail(ErrorCode::kUnauthorizedAdvance, "advancing requires an explicit approval with an actor");
  }
  const std::optional<Phase> next = next_phase(s.phase.current);
  if (!next || approval->target != *next) {
    fail(ErrorCode::kPhaseOrderViolation,
         "cannot move from " + std::string(phase_name(s.phase.current)) + " to " +
             std::string(phase_name(approval->target)));
  }
  if (approval->target == Phase::kDescriptivePattern &&
      s.coding_mode == CodingMode::kExactKeywordOnly) {
    fail(ErrorCode::kModeViolation, "this session stays at the exact keyword stage");
  }
  if (s.phase.current == Phase::kSetup &&
      (!s.transcript || text::trim(s.research_question).empty())) {
    fail(ErrorCode::kSetupIncomplete, "a transcript and research question are required");
  }
  const std::string ts = log_human(s, {{"op", "advance"},
                                       {"actor", approval->actor_id},
                                       {"target", phase_name(approval->target)}});
  s.phase = PhaseState{approval->target, ts, approval->actor_id};
}

void do_revert(Session& s, const std::optional<Approval>& approval) {
  if (!approval || text::trim(approval->actor_id).empty()) {
    fail(ErrorCode::kUnauthorizedAdvance, "reverting requires an explicit approval with an actor");
  }
  if (static_cast<int>(approval->target) >= static_cast<int>(s.phase.current)) {
    fail(ErrorCode::kPhaseOrderViolation, "revert target must precede the current phase");
  }
  const std::string ts = log_human(s, {{"op", "revert"},
                                       {"actor", approval->actor_id},
                                       {"target", phase_name(approval->target)}});
  s.phase = PhaseState{approval->target, ts, approval->actor_id};
}

RevisionAction do_revision(Session& s, const ActionRequest& request) {
  require_started(s);
  const std::string ts = now(s);
  RevisionContext ctx;
  ctx.phase = s.phase.current;
  ctx.timestamp = ts;
  ctx.sequence = static_cast<int>(s.trail.size()) + 1;
  ctx.near_threshold = s.settings.near_threshold;
  ctx.gerund_exceptions = s.settings.gerund_exceptions;
  ctx.page_size = s.settings.page_size;
  ctx.external_exists = [&s](std::string_view id) { return s.find_memo(id) != nullptr; };
  RevisionAction action = prepare_action(s.code_log, s.require_transcript(), request, ctx);
  append(s, Direction::kHumanAction, json{{"op", "act"}, {"request", request}}.dump(), ts);
  apply_recorded(s.code_log, action);
  s.trail.push_back(action);
  return action;
}

AuditResult do_audit(Session& s, const std::string& actor) {
  require_actor(actor);
  require_started(s);
  const Transcript& t = s.require_transcript();
  const CodeLog before = s.code_log;
  AuditResult result;
  result.integrity = validate_session(s.code_log, t, s.settings.near_threshold);
  result.coverage = audit(t, s.code_log.verbatims, default_coverage_statuses(), s.phase.current);
  log_human(s, {{"op", "audit"}, {"actor", actor}});
  if (!(before == s.code_log)) ++s.code_log.version;
  s.integrity_report = result.integrity;
  s.coverage_report = result.coverage;
  return result;
}

Memo do_reflect(Session& s, Gateway* gw, const std::string& actor, std::string_view positionality) {
  require_actor(actor);
  require_started(s);
  const std::string stance = text::trim(positionality);
  const json command = {{"op", "reflect"}, {"actor", actor}, {"positionality", stance}};
  if (stance.empty()) {
    const std::string ts = log_human(s, command);
    return add_memo(s, MemoKind::kMethodological, std::string(kPositionalityRequest), {},
                    Origin::kAi, actor, ts);
  }
  if (gw == nullptr) fail(ErrorCode::kBackendUnavailable, "no gateway available");
  Bindings b = base_bindings(s);
  b["positionality"] = stance;
  Exchange ex = exchange(*gw, "reflexive", b, s.phase.current);
  log_human(s, command);
  const std::string ts = log_exchange(s, ex);
  return add_memo(s, MemoKind::kMethodological, ex.completion.response_text, {}, Origin::kAi,
                  actor, ts);
}

Memo do_memo(Session& s, const std::string& actor, MemoKind kind, std::string body,
             std::vector<LinkedRef> refs) {
  require_actor(actor);
  if (text::trim(body).empty()) fail(ErrorCode::kInvalidArgument, "memo body is empty");
  for (const LinkedRef& r : refs) {
    const bool known = r.object_id.empty() ||
                       (s.transcript && r.object_id == s.transcript->id) ||
                       s.code_log.contains(r.object_id) || s.find_memo(r.object_id) != nullptr;
    if (!known) fail(ErrorCode::kTargetNotFound, "no object with id " + r.object_id);
    if (r.location) {
      if (!s.transcript) fail(ErrorCode::kOutOfBounds, "no transcript loaded");
      check_location(*s.transcript, *r.location);
    }
  }
  const std::string ts = log_human(s, {{"op", "memo"},
                                       {"actor", actor},
                                       {"kind", memo_kind_name(kind)},
                                       {"body", body},
                                       {"linked_refs", refs}});
  return add_memo(s, kind, std::move(body), std::move(refs), Origin::kHuman, actor, ts);
}

json run_summary(Session& s, Gateway& gw, const std::string& actor, bool concurrent) {
  switch (s.phase.current) {
    case Phase::kFamiliarization: {
      Phase1Result r = do_phase1(s, gw, actor, concurrent);
      return {{"phase", phase_name(Phase::kFamiliarization)},
              {"narrative_summary", r.narrative},
              {"segmented_summaries", r.segmented}};
    }
    case Phase::kExactKeyword:
      return {{"phase", phase_name(Phase::kExactKeyword)},
              {"codes", do_phase2(s, gw, actor, concurrent)}};
    case Phase::kDescriptivePattern: {
      Phase3Result r = do_phase3(s, gw, actor);
      return {{"phase", phase_name(Phase::kDescriptivePattern)},
              {"gerund_codes", r.gerunds},
              {"families", r.families},
              {"unmatched", r.unmatched}};
    }
    case Phase::kThemeDevelopment:
      return {{"phase", phase_name(Phase::kThemeDevelopment)}, {"themes", do_phase4(s, gw, actor)}};
    case Phase::kThemeReview:
      return {{"phase", phase_name(Phase::kThemeReview)}, {"review_memos", do_phase5(s, gw, actor)}};
    case Phase::kDefineReport: {
      Phase6Result r = do_phase6(s, gw, actor);
      return {{"phase", phase_name(Phase::kDefineReport)},
              {"definitions", r.definitions},
              {"report", r.report}};
    }
    default:
      fail(ErrorCode::kWrongPhase,
           "no phase run exists for " + std::string(phase_name(s.phase.current)));
  }
}

// Re-executes one logged human command.
void execute(Session& s, const json& cmd, Gateway& gw) {
  const std::string op = cmd.at("op").get<std::string>();
  const std::string actor = cmd.value("actor", "");
  if (op == "ingest") {
    do_ingest(s, actor, cmd.at("raw_text").get<std::string>(), cmd.at("title").get<std::string>());
  } else if (op == "advance") {
    do_advance(s, Approval{actor, parse_phase(cmd.at("target").get<std::string>())});
  } else if (op == "revert") {
    do_revert(s, Approval{actor, parse_phase(cmd.at("target").get<std::string>())});
  } else if (op == "run") {
    if (parse_phase(cmd.at("phase").get<std::string>()) != s.phase.current) {
      fail(ErrorCode::kLogCorruption, "logged run does not match the replayed phase");
    }
    run_summary(s, gw, actor, false);
  } else if (op == "act") {
    do_revision(s, cmd.at("request").get<ActionRequest>());
  } else if (op == "audit") {
    do_audit(s, actor);
  } else if (op == "reflect") {
    do_reflect(s, &gw, actor, cmd.at("positionality").get<std::string>());
  } else if (op == "memo") {
    do_memo(s, actor, parse_memo_kind(cmd.at("kind").get<std::string>()),
            cmd.at("body").get<std::string>(),
            cmd.at("linked_refs").get<std::vector<LinkedRef>>());
  } else {
    fail(ErrorCode::kLogCorruption, "unknown logged command: " + op);
  }
}

template <typename F>
auto transact(Session& s, F&& f) {
  Session work = s;
  if constexpr (std::is_void_v<decltype(f(work))>) {
    f(work);
    s = std::move(work);
  } else {
    auto result = f(work);
    s = std::move(work);
    return result;
  }
}

// Serves recorded completions in log order, matched by request hash.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(std::vector<RawCompletion> recorded) : recorded_(std::move(recorded)) {
    used_.assign(recorded_.size(), false);
  }

  ChatReply send(const ChatRequest& request) override {
    std::lock_guard<std::mutex> lock(mu_);
    for (std::size_t i = 0; i < recorded_.size(); ++i) {
      if (!used_[i] && recorded_[i].request_hash == request.request_hash) {
        used_[i] = true;
        return ChatReply{recorded_[i].response_text, recorded_[i].usage};
      }
    }
    fail(ErrorCode::kLogCorruption,
         "no recorded response for request " + request.request_hash.substr(0, 12));
  }

 private:
  std::mutex mu_;
  std::vector<RawCompletion> recorded_;
  std::vector<bool> used_;
};

}  // namespace

// ---- Public API ------------------------------------------------------------------

Clock system_clock() {
  return [] { return format_utc(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())); };
}

Clock logical_clock(std::string start) {
  auto base = parse_utc(start);
  auto counter = std::make_shared<std::atomic<long>>(0);
  return [base, counter] { return format_utc(base + counter->fetch_add(1)); };
}

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::kPrompt: return "prompt";
    case Direction::kResponse: return "response";
    case Direction::kHumanAction: return "human_action";
  }
  return "human_action";
}

Direction parse_direction(std::string_view name) {
  if (name == "prompt") return Direction::kPrompt;
  if (name == "response") return Direction::kResponse;
  if (name == "human_action") return Direction::kHumanAction;
  fail(ErrorCode::kInvalidArgument, "unknown direction: " + std::string(name));
}

std::string entry_hash(const InteractionEntry& e) {
  const json body = {{"sequence", e.sequence},
                     {"direction", direction_name(e.direction)},
                     {"phase", phase_name(e.phase)},
                     {"payload", e.payload},
                     {"timestamp", e.timestamp},
                     {"prev_hash", e.prev_hash}};
  return text::sha256_hex(body.dump());
}

const Memo* Session::find_memo(std::string_view memo_id) const {
  for (const Memo& m : memos) {
    if (m.id == memo_id) return &m;
  }
  return nullptr;
}

const Transcript& Session::require_transcript() const {
  if (!transcript) fail(ErrorCode::kSetupIncomplete, "no transcript loaded");
  return *transcript;
}

Session create_session(std::string research_question, CodingMode mode, LlmConfig llm_config,
                       SessionSettings settings, Clock clock) {
  research_question = text::trim(research_question);
  if (research_question.empty()) {
    fail(ErrorCode::kEmptyResearchQuestion, "the research question is empty");
  }
  llm_config.validate();
  if (settings.page_size < 1) fail(ErrorCode::kInvalidArgument, "page_size must be positive");
  if (settings.repair_budget < 0) fail(ErrorCode::kInvalidArgument, "repair_budget is negative");
  Session s;
  s.research_question = std::move(research_question);
  s.coding_mode = mode;
  s.llm_config = std::move(llm_config);
  s.settings = std::move(settings);
  s.clock = clock ? std::move(clock) : system_clock();
  const InteractionEntry& seed = append(s, Direction::kPrompt, std::string(kSetupPrompt));
  s.phase = PhaseState{Phase::kSetup, seed.timestamp, std::nullopt};
  s.id = "s-" + text::sha256_hex(s.research_question + "\x1f" + seed.timestamp).substr(0, 12);
  return s;
}

void ingest_transcript(Session& s, const std::string& actor, std::string_view raw_text,
                       const std::string& title) {
  transact(s, [&](Session& w) { do_ingest(w, actor, raw_text, title); });
}

void advance(Session& s, const std::optional<Approval>& approval) {
  transact(s, [&](Session& w) { do_advance(w, approval); });
}

void revert(Session& s, const std::optional<Approval>& approval) {
  transact(s, [&](Session& w) { do_revert(w, approval); });
}

Phase1Result run_phase1(Session& s, Gateway& gateway, const std::string& actor) {
  return transact(s, [&](Session& w) { return do_phase1(w, gateway, actor, true); });
}

std::vector<VerbatimCode> run_phase2(Session& s, Gateway& gateway, const std::string& actor) {
  return transact(s, [&](Session& w) { return do_phase2(w, gateway, actor, true); });
}

Phase3Result run_phase3(Session& s, Gateway& gateway, const std::string& actor) {
  return transact(s, [&](Session& w) { return do_phase3(w, gateway, actor); });
}

std::vector<Theme> run_phase4(Session& s, Gateway& gateway, const std::string& actor) {
  return transact(s, [&](Session& w) { return do_phase4(w, gateway, actor); });
}

std::vector<Memo> run_phase5(Session& s, Gateway& gateway, const std::string& actor) {
  return transact(s, [&](Session& w) { return do_phase5(w, gateway, actor); });
}

Phase6Result run_phase6(Session& s, Gateway& gateway, const std::string& actor) {
  return transact(s, [&](Session& w) { return do_phase6(w, gateway, actor); });
}

json run_current_phase(Session& s, Gateway& gateway, const std::string& actor) {
  return transact(s, [&](Session& w) { return run_summary(w, gateway, actor, true); });
}

RevisionAction apply_revision(Session& s, const ActionRequest& request) {
  return transact(s, [&](Session& w) { return do_revision(w, request); });
}

AuditResult audit_session(Session& s, const std::string& actor) {
  return transact(s, [&](Session& w) { return do_audit(w, actor); });
}

IntegrityReport compute_integrity(const Session& s) {
  CodeLog copy = s.code_log;
  return validate_session(copy, s.require_transcript(), s.settings.near_threshold);
}

CoverageReport compute_coverage(const Session& s) {
  return audit(s.require_transcript(), s.code_log.verbatims, default_coverage_statuses(),
               s.phase.current);
}

Memo generate_reflexive_prompt(Session& s, Gateway& gateway, const std::string& actor,
                               std::string_view positionality) {
  return transact(s, [&](Session& w) { return do_reflect(w, &gateway, actor, positionality); });
}

Memo record_memo(Session& s, const std::string& actor, MemoKind kind, std::string body,
                 std::vector<LinkedRef> linked_refs) {
  return transact(s, [&](Session& w) {
    return do_memo(w, actor, kind, std::move(body), std::move(linked_refs));
  });
}

Session initial_state(const Session& s) {
  if (s.interaction_log.empty()) fail(ErrorCode::kLogCorruption, "the session log is empty");
  Session init;
  init.id = s.id;
  init.research_question = s.research_question;
  init.coding_mode = s.coding_mode;
  init.llm_config = s.llm_config;
  init.settings = s.settings;
  init.interaction_log = {s.interaction_log.front()};
  init.phase = PhaseState{Phase::kSetup, s.interaction_log.front().timestamp, std::nullopt};
  init.clock = s.clock;
  return init;
}

void verify_log_chain(const std::vector<InteractionEntry>& log) {
  for (std::size_t i = 0; i < log.size(); ++i) {
    const InteractionEntry& e = log[i];
    if (e.sequence != static_cast<int>(i) + 1) {
      fail(ErrorCode::kLogCorruption, "sequence gap at entry " + std::to_string(i + 1) +
                                          " (found " + std::to_string(e.sequence) + ")");
    }
    const std::string expected_prev = i == 0 ? std::string() : log[i - 1].hash;
    if (e.prev_hash != expected_prev || e.hash != entry_hash(e)) {
      fail(ErrorCode::kLogCorruption, "hash mismatch at entry " + std::to_string(e.sequence));
    }
  }
}

Session replay(const std::vector<InteractionEntry>& log, const Session& initial) {
  if (log.empty()) return initial;
  verify_log_chain(log);
  const std::size_t prefix = initial.interaction_log.size();
  if (log.size() < prefix ||
      !std::equal(initial.interaction_log.begin(), initial.interaction_log.end(), log.begin())) {
    fail(ErrorCode::kLogCorruption, "the log does not extend the initial session");
  }
  Session s = initial;
  auto cursor = std::make_shared<std::size_t>(prefix);
  auto stamps = std::make_shared<std::vector<std::string>>();
  for (const auto& e : log) stamps->push_back(e.timestamp);
  s.clock = [cursor, stamps] {
    if (*cursor >= stamps->size()) fail(ErrorCode::kLogCorruption, "replay ran past the log");
    return (*stamps)[(*cursor)++];
  };

  std::size_t i = prefix;
  while (i < log.size()) {
    if (log[i].direction != Direction::kHumanAction) {
      fail(ErrorCode::kLogCorruption,
           "entry " + std::to_string(log[i].sequence) + " is not caused by a human action");
    }
    std::size_t j = i + 1;
    std::vector<RawCompletion> recorded;
    for (; j < log.size() && log[j].direction != Direction::kHumanAction; ++j) {
      if (log[j].direction != Direction::kResponse) continue;
      recorded.push_back(with_json_errors(ErrorCode::kLogCorruption, [&] {
        return json::parse(log[j].payload).get<RawCompletion>();
      }));
    }
    *cursor = i;
    Gateway gw(s.llm_config, std::make_shared<ReplayBackend>(std::move(recorded)));
    const json cmd = with_json_errors(ErrorCode::kLogCorruption,
                                      [&] { return json::parse(log[i].payload); });
    try {
      with_json_errors(ErrorCode::kLogCorruption, [&] { execute(s, cmd, gw); });
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kLogCorruption) throw;
      fail(ErrorCode::kLogCorruption, "entry " + std::to_string(log[i].sequence) +
                                          " failed on replay: " + std::string(e.name()) + ": " + e.what());
    }
    if (s.interaction_log.size() != j) {
      fail(ErrorCode::kLogCorruption,
           "replay of entry " + std::to_string(log[i].sequence) + " diverged from the log");
    }
    for (std::size_t k = i; k < j; ++k) {
      if (!(s.interaction_log[k] == log[k])) {
        fail(ErrorCode::kLogCorruption,
             "replayed entry " + std::to_string(k + 1) + " differs from the log");
      }
    }
    i = j;
  }
  s.clock = initial.clock;
  return s;
}

std::string export_interaction_log(const Session& s) {
  std::string out;
  for (const auto& e : s.interaction_log) out += json(e).dump() + "\n";
  return out;
}

std::vector<InteractionEntry> parse_interaction_log(std::string_view ndjson) {
  std::vector<InteractionEntry> entries;
  std::istringstream in{std::string(ndjson)};
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    entries.push_back(with_json_errors(ErrorCode::kParseError,
                                       [&] { return json::parse(line).get<InteractionEntry>(); }));
  }
  return entries;
}

std::string export_trail(const Session& s) {
  std::string out;
  std::string prev;
  for (const auto& a : s.trail) {
    json record = a;
    record["prev_hash"] = prev;
    const std::string hash = text::sha256_hex(record.dump());
    record["hash"] = hash;
    out += record.dump() + "\n";
    prev = hash;
  }
  return out;
}

std::string fingerprint(const Session& s) { return json(s).dump(); }

}  // namespace thematic
