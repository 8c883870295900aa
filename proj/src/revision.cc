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

#include "thematic/revision.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "thematic/error.h"
#include "thematic/integrity.h"
#include "thematic/serialize.h"
#include "thematic/text.h"

namespace thematic {
namespace {

using nlohmann::json;

const std::set<std::string>& immutable_fields() {
  static const std::set<std::string> fields = {"id", "type", "seq", "origin", "status",
                                               "integrity", "gerund_form",
                                               "gerund_diagnostic"};
  return fields;
}

bool is_code_kind(ObjectKind k) {
  return k == ObjectKind::kVerbatim || k == ObjectKind::kGerund || k == ObjectKind::kFamily ||
         k == ObjectKind::kTheme;
}

CodeStatus status_of(const CodeLog& log, std::string_view id) {
  if (const auto* v = log.find_verbatim(id)) return v->status;
  if (const auto* g = log.find_gerund(id)) return g->status;
  if (const auto* f = log.find_family(id)) return f->status;
  if (const auto* t = log.find_theme(id)) return t->status;
  fail(ErrorCode::kTargetNotFound, "no code with id " + std::string(id));
}

Origin origin_of(const CodeLog& log, std::string_view id) {
  if (const auto* v = log.find_verbatim(id)) return v->origin;
  if (const auto* g = log.find_gerund(id)) return g->origin;
  if (const auto* f = log.find_family(id)) return f->origin;
  return log.find_theme(id)->origin;
}

template <typename T>
T decode_object(const json& j) {
  return with_json_errors(ErrorCode::kInvalidAction, [&] { return j.get<T>(); });
}

void require_label(const std::string& label, const char* what) {
  if (label.empty()) fail(ErrorCode::kEmptyLabel, std::string(what) + " label is empty");
}

void check_family_label(const CodeLog& log, const std::string& label, std::string_view self_id) {
  require_label(label, "family");
  const CodeFamily* other = log.family_by_label(label);
  if (other != nullptr && other->id != self_id) {
    fail(ErrorCode::kDuplicateLabel, "family label already used by " + other->id);
  }
}

void check_theme_label(const CodeLog& log, const std::string& label, std::string_view self_id) {
  require_label(label, "theme");
  const Theme* other = log.theme_by_label(label);
  if (other != nullptr && other->id != self_id) {
    fail(ErrorCode::kDuplicateLabel, "theme label already used by " + other->id);
  }
}

void check_active_family(const CodeLog& log, const std::string& id) {
  const CodeFamily* f = log.find_family(id);
  if (f == nullptr) fail(ErrorCode::kTargetNotFound, "no code family " + id);
  if (!is_active(f->status)) fail(ErrorCode::kTargetNotActive, "code family " + id + " is not active");
}

void check_sources(const CodeLog& log, const std::vector<std::string>& ids, bool require_one) {
  if (require_one && ids.empty()) {
    fail(ErrorCode::kUnknownVerbatimId, "no source verbatim codes given");
  }
  for (const auto& id : ids) {
    const VerbatimCode* v = log.find_verbatim(id);
    if (v == nullptr || !is_active(v->status)) {
      fail(ErrorCode::kUnknownVerbatimId, "unknown or inactive verbatim code " + id);
    }
  }
}

// Re-establishes exactness for a verbatim code whose wording or location is
// new. Exempt codes keep their best verdict and are flagged for review.
void settle_verbatim(VerbatimCode& code, const Transcript& transcript, const ActionRequest& req,
                     const RevisionContext& ctx, bool location_given) {
  code.exact_phrase = text::normalize(code.exact_phrase);
  if (code.exact_phrase.empty()) fail(ErrorCode::kEmptyPhrase, "verbatim phrase is empty");
  std::optional<LocationRef> hint;
  if (location_given) {
    if (code.location.transcript_id.empty()) code.location.transcript_id = transcript.id;
    check_location(transcript, code.location);
    hint = LocationRef::paragraphs(code.location.transcript_id, code.location.paragraph_start,
                                   code.location.paragraph_end);
  }
  IntegrityVerdict verdict = check_exact(code.exact_phrase, transcript, hint);
  if (verdict.kind != VerdictKind::kExact) {
    if (!req.integrity_exempt) {
      fail(ErrorCode::kIntegrityRequired,
           "phrase is not an exact transcript substring at the given location (" +
               std::string(verdict_name(verdict.kind)) + ")");
    }
    verdict = verify_phrase(code.exact_phrase, transcript, hint, ctx.near_threshold);
  }
  if (verdict.matched_location) {
    code.location = *verdict.matched_location;
  } else if (!location_given) {
    code.location = LocationRef::paragraphs(transcript.id, 1, transcript.paragraph_count());
  }
  code.location.page = page_of(code.location.paragraph_start, ctx.page_size);
  code.needs_human = verdict.kind != VerdictKind::kExact;
  code.integrity = verdict;
}

// Builds a brand-new human object of the given wire type from `j`. The id
// and sequence are the ones the code log will assign next.
json build_new_object(const CodeLog& log, const Transcript& transcript, const json& input,
                      const ActionRequest& req, const RevisionContext& ctx) {
  if (!input.is_object()) fail(ErrorCode::kInvalidAction, "object expected");
  const std::string type = input.contains("type") && input["type"].is_string()
                               ? input["type"].get<std::string>()
                               : std::string();
  ObjectKind kind = ObjectKind::kUnknown;
  for (auto k : {ObjectKind::kVerbatim, ObjectKind::kGerund, ObjectKind::kFamily,
                 ObjectKind::kTheme}) {
    if (object_kind_name(k) == type) kind = k;
  }
  if (kind == ObjectKind::kUnknown) {
    fail(ErrorCode::kInvalidAction, "type must be verbatim, gerund, family or theme");
  }
  json j = input;
  j.erase("type");
  for (const char* k : {"id", "seq", "origin", "status", "integrity"}) j.erase(k);
  const std::string id = log.peek_id(kind);
  const int seq = std::stoi(id.substr(1));
  switch (kind) {
    case ObjectKind::kVerbatim: {
      const bool location_given = j.contains("location") && !j["location"].is_null();
      if (!location_given) j["location"] = LocationRef::paragraphs(transcript.id, 1, 1);
      if (!j.contains("exact_phrase")) fail(ErrorCode::kEmptyPhrase, "exact_phrase is required");
      VerbatimCode v = decode_object<VerbatimCode>(j);
      settle_verbatim(v, transcript, req, ctx, location_given);
      if (!j.contains("paragraph_context")) {
        v.paragraph_context = transcript.paragraph(v.location.paragraph_start).text;
      }
      v.location.transcript_id = transcript.id;
      v.id = id;
      v.seq = seq;
      v.origin = Origin::kHuman;
      v.status = CodeStatus::kHumanInserted;
      return v;
    }
    case ObjectKind::kGerund: {
      if (!j.contains("label")) j["label"] = "";
      GerundCode g = decode_object<GerundCode>(j);
      g.label = text::normalize(g.label);
      require_label(g.label, "gerund");
      check_sources(log, g.source_verbatim_ids, true);
      if (g.family_id) check_active_family(log, *g.family_id);
      const GerundCheck check = check_gerund(g.label, ctx.gerund_exceptions);
      g.gerund_form = check.ok;
      g.gerund_diagnostic = check.diagnostic;
      g.needs_human = !check.ok;
      g.id = id;
      g.seq = seq;
      g.origin = Origin::kHuman;
      g.status = CodeStatus::kHumanInserted;
      return g;
    }
    case ObjectKind::kFamily: {
      if (!j.contains("label")) j["label"] = "";
      CodeFamily f = decode_object<CodeFamily>(j);
      f.label = text::normalize(f.label);
      check_family_label(log, f.label, "");
      for (const auto& m : f.member_gerund_ids) {
        const GerundCode* g = log.find_gerund(m);
        if (g == nullptr || !is_active(g->status)) {
          fail(ErrorCode::kTargetNotFound, "unknown or inactive gerund code " + m);
        }
      }
      f.id = id;
      f.seq = seq;
      f.origin = Origin::kHuman;
      f.status = CodeStatus::kHumanInserted;
      return f;
    }
    case ObjectKind::kTheme: {
      if (!j.contains("label")) j["label"] = "";
      Theme t = decode_object<Theme>(j);
      t.label = text::normalize(t.label);
      check_theme_label(log, t.label, "");
      for (const auto& f : t.family_ids) check_active_family(log, f);
      check_sources(log, t.supporting_verbatim_ids, false);
      t.id = id;
      t.seq = seq;
      t.origin = Origin::kHuman;
      t.status = CodeStatus::kHumanInserted;
      return t;
    }
    default:
      fail(ErrorCode::kInvalidAction, "type must be verbatim, gerund, family or theme");
  }
}

json modify_object(const CodeLog& log, const Transcript& transcript, const json& before,
                   const ActionRequest& req, const RevisionContext& ctx) {
  const json& patch = req.after;
  if (!patch.is_object() || patch.empty()) {
    fail(ErrorCode::kInvalidAction, "modification needs a non-empty JSON merge patch");
  }
  const ObjectKind kind = kind_of_id(req.target_id);
  for (const auto& [key, value] : patch.items()) {
    if (immutable_fields().count(key) != 0) {
      fail(ErrorCode::kInvalidAction, "field '" + key + "' cannot be modified");
    }
    if (kind == ObjectKind::kFamily && key == "member_gerund_ids") {
      fail(ErrorCode::kInvalidAction, "family membership changes through the gerund's family_id");
    }
  }
  json merged = before;
  merged.merge_patch(patch);
  json result;
  switch (kind) {
    case ObjectKind::kVerbatim: {
      VerbatimCode old = decode_object<VerbatimCode>(before);
      VerbatimCode v = decode_object<VerbatimCode>(merged);
      v.exact_phrase = text::normalize(v.exact_phrase);
      if (v.exact_phrase != old.exact_phrase || !(v.location == old.location)) {
        settle_verbatim(v, transcript, req, ctx, true);
        if (!patch.contains("paragraph_context") &&
            v.location.paragraph_start != old.location.paragraph_start) {
          v.paragraph_context = transcript.paragraph(v.location.paragraph_start).text;
        }
      }
      result = v;
      break;
    }
    case ObjectKind::kGerund: {
      GerundCode old = decode_object<GerundCode>(before);
      GerundCode g = decode_object<GerundCode>(merged);
      g.label = text::normalize(g.label);
      require_label(g.label, "gerund");
      if (g.source_verbatim_ids != old.source_verbatim_ids) {
        check_sources(log, g.source_verbatim_ids, true);
      }
      if (g.family_id && g.family_id != old.family_id) check_active_family(log, *g.family_id);
      if (g.label != old.label) {
        const GerundCheck check = check_gerund(g.label, ctx.gerund_exceptions);
        g.gerund_form = check.ok;
        g.gerund_diagnostic = check.diagnostic;
        g.needs_human = !check.ok;
      }
      result = g;
      break;
    }
    case ObjectKind::kFamily: {
      CodeFamily f = decode_object<CodeFamily>(merged);
      f.label = text::normalize(f.label);
      check_family_label(log, f.label, f.id);
      result = f;
      break;
    }
    case ObjectKind::kTheme: {
      Theme old = decode_object<Theme>(before);
      Theme t = decode_object<Theme>(merged);
      t.label = text::normalize(t.label);
      check_theme_label(log, t.label, t.id);
      if (t.family_ids != old.family_ids) {
        for (const auto& f : t.family_ids) check_active_family(log, f);
      }
      if (t.supporting_verbatim_ids != old.supporting_verbatim_ids) {
        check_sources(log, t.supporting_verbatim_ids, false);
      }
      result = t;
      break;
    }
    default:
      fail(ErrorCode::kInvalidAction, "only codes, families and themes can be modified");
  }
  if (result == before) fail(ErrorCode::kNoOpModification, "modification changes nothing");
  result["status"] = status_name(CodeStatus::kModified);
  return result;
}

void put_existing(CodeLog& log, const json& j) {
  const std::string id = j.at("id").get<std::string>();
  switch (kind_of_id(id)) {
    case ObjectKind::kVerbatim: *log.find_verbatim(id) = j.get<VerbatimCode>(); break;
    case ObjectKind::kGerund: *log.find_gerund(id) = j.get<GerundCode>(); break;
    case ObjectKind::kFamily: *log.find_family(id) = j.get<CodeFamily>(); break;
    case ObjectKind::kTheme: *log.find_theme(id) = j.get<Theme>(); break;
    default: fail(ErrorCode::kPreconditionReplayFailure, "cannot replace object " + id);
  }
}

void expect_id(const std::string& assigned, const std::string& recorded) {
  if (assigned != recorded) {
    fail(ErrorCode::kPreconditionReplayFailure,
         "recorded id " + recorded + " but the code log assigned " + assigned);
  }
}

// Appends a new object and wires its family links.
void put_new(CodeLog& log, const json& j) {
  const std::string id = j.at("id").get<std::string>();
  switch (kind_of_id(id)) {
    case ObjectKind::kVerbatim: {
      expect_id(log.add_verbatim(j.get<VerbatimCode>()).id, id);
      break;
    }
    case ObjectKind::kGerund: {
      GerundCode g = j.get<GerundCode>();
      std::optional<std::string> family = g.family_id;
      g.family_id.reset();
      expect_id(log.add_gerund(std::move(g)).id, id);
      if (family) log.assign_family(id, family);
      break;
    }
    case ObjectKind::kFamily: {
      CodeFamily f = j.get<CodeFamily>();
      std::vector<std::string> members = std::move(f.member_gerund_ids);
      f.member_gerund_ids.clear();
      expect_id(log.add_family(std::move(f)).id, id);
      for (const auto& m : members) log.assign_family(m, id);
      break;
    }
    case ObjectKind::kTheme: {
      expect_id(log.add_theme(j.get<Theme>()).id, id);
      break;
    }
    case ObjectKind::kComment: {
      expect_id(log.add_comment(j.get<Comment>()).id, id);
      break;
    }
    default:
      fail(ErrorCode::kPreconditionReplayFailure, "cannot insert object " + id);
  }
}

}  // namespace

std::string_view action_kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::kModification: return "Modification";
    case ActionKind::kDeletion: return "Deletion";
    case ActionKind::kRejection: return "Rejection";
    case ActionKind::kInsertion: return "Insertion";
    case ActionKind::kCommenting: return "Commenting";
  }
  return "Commenting";
}

ActionKind parse_action_kind(std::string_view name) {
  const std::string lower = text::to_lower_ascii(name);
  if (lower == "modification" || lower == "modify") return ActionKind::kModification;
  if (lower == "deletion" || lower == "delete") return ActionKind::kDeletion;
  if (lower == "rejection" || lower == "reject") return ActionKind::kRejection;
  if (lower == "insertion" || lower == "insert") return ActionKind::kInsertion;
  if (lower == "commenting" || lower == "comment") return ActionKind::kCommenting;
  fail(ErrorCode::kInvalidAction, "unknown action kind: " + std::string(name));
}

json object_snapshot(const CodeLog& log, std::string_view id) { return code_object_json(log, id); }

RevisionAction prepare_action(const CodeLog& log, const Transcript& transcript,
                              const ActionRequest& request, const RevisionContext& ctx) {
  if (text::trim(request.actor_id).empty()) {
    fail(ErrorCode::kInvalidAction, "an action needs an actor");
  }
  RevisionAction action;
  action.id = "A" + std::to_string(ctx.sequence);
  action.kind = request.kind;
  action.target_id = request.target_id;
  action.rationale = request.rationale;
  action.actor_id = request.actor_id;
  action.phase = ctx.phase;
  action.timestamp = ctx.timestamp;
  action.sequence = ctx.sequence;
  action.base_version = log.version;
  action.integrity_exempt = request.integrity_exempt;
  action.before = nullptr;

  const ObjectKind target_kind = kind_of_id(request.target_id);
  auto require_code_target = [&] {
    if (!is_code_kind(target_kind) || !log.contains(request.target_id)) {
      fail(ErrorCode::kTargetNotFound, "no code with id " + request.target_id);
    }
    if (!is_active(status_of(log, request.target_id))) {
      fail(ErrorCode::kTargetNotActive, request.target_id + " is deleted or rejected");
    }
  };

  switch (request.kind) {
    case ActionKind::kModification: {
      require_code_target();
      action.before = object_snapshot(log, request.target_id);
      action.after = modify_object(log, transcript, action.before, request, ctx);
      break;
    }
    case ActionKind::kDeletion:
    case ActionKind::kRejection: {
      require_code_target();
      if (request.kind == ActionKind::kRejection &&
          origin_of(log, request.target_id) != Origin::kAi) {
        fail(ErrorCode::kInvalidAction, "only AI proposals can be rejected");
      }
      action.before = object_snapshot(log, request.target_id);
      json after = action.before;
      after["status"] = status_name(request.kind == ActionKind::kDeletion ? CodeStatus::kDeleted
                                                                           : CodeStatus::kRejected);
      if (target_kind == ObjectKind::kGerund) after["family_id"] = nullptr;
      if (target_kind == ObjectKind::kFamily) after["member_gerund_ids"] = json::array();
      if (!request.after.is_null()) {
        json input = request.after;
        if (!input.is_object()) fail(ErrorCode::kInvalidAction, "replacement must be an object");
        if (!input.contains("type")) input["type"] = object_kind_name(target_kind);
        if (input["type"] != object_kind_name(target_kind)) {
          fail(ErrorCode::kInvalidAction, "replacement must have the same type as the target");
        }
        if (target_kind == ObjectKind::kFamily) {
          const std::string label = text::normalize(input.value("label", ""));
          const CodeFamily* other = log.family_by_label(label);
          if (other != nullptr && other->id != request.target_id) {
            fail(ErrorCode::kDuplicateLabel, "family label already used by " + other->id);
          }
          input["member_gerund_ids"] = json::array();
        }
        if (target_kind == ObjectKind::kTheme) {
          const std::string label = text::normalize(input.value("label", ""));
          const Theme* other = log.theme_by_label(label);
          if (other != nullptr && other->id != request.target_id) {
            fail(ErrorCode::kDuplicateLabel, "theme label already used by " + other->id);
          }
        }
        // Build against a log where the target's label is already free.
        CodeLog scratch = log;
        put_existing(scratch, after);
        json replacement = build_new_object(scratch, transcript, input, request, ctx);
        if (target_kind == ObjectKind::kFamily) {
          replacement["member_gerund_ids"] = action.before["member_gerund_ids"];
        }
        if (target_kind == ObjectKind::kGerund && !input.contains("family_id")) {
          replacement["family_id"] = action.before["family_id"];
        }
        after["replacement"] = replacement;
      }
      action.after = std::move(after);
      break;
    }
    case ActionKind::kInsertion: {
      if (!request.target_id.empty()) {
        fail(ErrorCode::kInvalidAction, "insertion takes no target");
      }
      action.after = build_new_object(log, transcript, request.after, request, ctx);
      action.target_id = action.after["id"].get<std::string>();
      break;
    }
    case ActionKind::kCommenting: {
      const bool exists = log.contains(request.target_id) ||
                          (ctx.external_exists && ctx.external_exists(request.target_id));
      if (request.target_id.empty() || !exists) {
        fail(ErrorCode::kTargetNotFound, "no object with id " + request.target_id);
      }
      std::string body;
      if (request.after.is_string()) {
        body = request.after.get<std::string>();
      } else if (request.after.is_object()) {
        body = request.after.value("body", "");
      }
      if (text::trim(body).empty()) body = request.rationale;
      if (text::trim(body).empty()) fail(ErrorCode::kInvalidAction, "comment body is empty");
      Comment c;
      c.id = log.peek_id(ObjectKind::kComment);
      c.target_id = request.target_id;
      c.body = std::move(body);
      c.author_id = request.actor_id;
      c.timestamp = ctx.timestamp;
      action.after = c;
      break;
    }
  }
  return action;
}

void apply_recorded(CodeLog& log, const RevisionAction& action) {
  with_json_errors(ErrorCode::kPreconditionReplayFailure, [&] {
    switch (action.kind) {
      case ActionKind::kCommenting:
      case ActionKind::kInsertion:
        put_new(log, action.after);
        break;
      case ActionKind::kModification: {
        if (kind_of_id(action.target_id) == ObjectKind::kGerund) {
          json stripped = action.after;
          const json new_family = stripped["family_id"];
          stripped["family_id"] = action.before["family_id"];
          put_existing(log, stripped);
          if (new_family != action.before["family_id"]) {
            log.assign_family(action.target_id,
                              new_family.is_null() ? std::nullopt
                                                   : std::optional(new_family.get<std::string>()));
          }
        } else {
          put_existing(log, action.after);
        }
        break;
      }
      case ActionKind::kDeletion:
      case ActionKind::kRejection: {
        json target = action.after;
        json replacement = target.contains("replacement") ? target["replacement"] : json();
        target.erase("replacement");
        const ObjectKind kind = kind_of_id(action.target_id);
        if (kind == ObjectKind::kGerund) {
          log.assign_family(action.target_id, std::nullopt);
        }
        std::vector<std::string> members;
        if (kind == ObjectKind::kFamily) {
          members = action.before["member_gerund_ids"].get<std::vector<std::string>>();
          for (const auto& m : members) log.assign_family(m, std::nullopt);
        }
        put_existing(log, target);
        if (!replacement.is_null()) put_new(log, replacement);
        break;
      }
    }
  });
  ++log.version;
}

RevisionAction apply(CodeLog& log, std::vector<RevisionAction>& trail,
                     const Transcript& transcript, const ActionRequest& request,
                     const RevisionContext& ctx) {
  RevisionAction action = prepare_action(log, transcript, request, ctx);
  apply_recorded(log, action);
  trail.push_back(action);
  return action;
}

CategoryMap default_category_map() {
  return {{ActionKind::kCommenting, SummaryCategory::kComments},
          {ActionKind::kInsertion, SummaryCategory::kInsertions},
          {ActionKind::kDeletion, SummaryCategory::kDeletionsAndRejections},
          {ActionKind::kRejection, SummaryCategory::kDeletionsAndRejections},
          {ActionKind::kModification, SummaryCategory::kRefinements}};
}

ActionSummary summarize(const std::vector<RevisionAction>& trail, const CategoryMap& category_map) {
  ActionSummary summary;
  for (const auto& a : trail) {
    auto it = category_map.find(a.kind);
    if (it == category_map.end()) continue;
    ActionCounts& c = summary.per_actor[a.actor_id];
    switch (it->second) {
      case SummaryCategory::kComments: ++c.comments; break;
      case SummaryCategory::kInsertions: ++c.insertions; break;
      case SummaryCategory::kDeletionsAndRejections: ++c.deletions_and_rejections; break;
      case SummaryCategory::kRefinements: ++c.refinements; break;
    }
    ++c.total;
  }
  return summary;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\\' || c == '|') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

std::string summary_csv(const ActionSummary& summary) {
  std::ostringstream out;
  out << "actor,comments,insertions,deletions_and_rejections,refinements,total\r\n";
  for (const auto& [actor, c] : summary.per_actor) {
    out << csv_field(actor) << ',' << c.comments << ',' << c.insertions << ','
        << c.deletions_and_rejections << ',' << c.refinements << ',' << c.total << "\r\n";
  }
  return out.str();
}

std::string summary_markdown(const ActionSummary& summary) {
  std::ostringstream out;
  out << "| Action type |";
  for (const auto& [actor, c] : summary.per_actor) out << ' ' << md_cell(actor) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < summary.per_actor.size(); ++i) out << "---|";
  out << '\n';
  auto row = [&](const char* label, int ActionCounts::*field) {
    out << "| " << label << " |";
    for (const auto& [actor, c] : summary.per_actor) out << ' ' << c.*field << " |";
    out << '\n';
  };
  row("Comments (feedback and rationales)", &ActionCounts::comments);
  row("Insertions (new codes or verbatim quotes)", &ActionCounts::insertions);
  row("Deletions and categorical revisions", &ActionCounts::deletions_and_rejections);
  row("Phrase or gerund refinements (edits)", &ActionCounts::refinements);
  row("Total substantive actions", &ActionCounts::total);
  return out.str();
}

CodeLog rebuild(const CodeLog& initial, const std::vector<RevisionAction>& trail) {
  CodeLog log = initial;
  for (std::size_t i = 0; i < trail.size(); ++i) {
    const RevisionAction& a = trail[i];
    if (i > 0 && a.sequence != trail[i - 1].sequence + 1) {
      fail(ErrorCode::kSequenceGap, "action " + a.id + " does not follow " + trail[i - 1].id);
    }
    if (a.base_version != log.version) {
      fail(ErrorCode::kSequenceGap, "action " + a.id + " expects code log version " +
                                        std::to_string(a.base_version) + ", have " +
                                        std::to_string(log.version));
    }
    apply_recorded(log, a);
  }
  return log;
}

}  // namespace thematic
