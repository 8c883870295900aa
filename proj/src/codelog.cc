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

#include "thematic/codelog.h"

#include <algorithm>
#include <tuple>

#include "thematic/error.h"
#include "thematic/integrity.h"
#include "thematic/text.h"

namespace thematic {
namespace {

template <typename T>
T* find_by_id(std::vector<T>& items, std::string_view id) {
  for (auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
  for (const auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

}  // namespace

ObjectKind kind_of_id(std::string_view id) {
  if (id.size() < 2) return ObjectKind::kUnknown;
  switch (id[0]) {
    case 'V': return ObjectKind::kVerbatim;
    case 'G': return ObjectKind::kGerund;
    case 'F': return ObjectKind::kFamily;
    case 'T': return ObjectKind::kTheme;
    case 'C': return ObjectKind::kComment;
    case 'M': return ObjectKind::kMemo;
    default: return ObjectKind::kUnknown;
  }
}

std::string_view object_kind_name(ObjectKind k) {
  switch (k) {
    case ObjectKind::kVerbatim: return "verbatim";
    case ObjectKind::kGerund: return "gerund";
    case ObjectKind::kFamily: return "family";
    case ObjectKind::kTheme: return "theme";
    case ObjectKind::kComment: return "comment";
    case ObjectKind::kMemo: return "memo";
    case ObjectKind::kUnknown: break;
  }
  return "unknown";
}

ObjectKind parse_object_kind(std::string_view name) {
  for (auto k : {ObjectKind::kVerbatim, ObjectKind::kGerund, ObjectKind::kFamily,
                 ObjectKind::kTheme, ObjectKind::kComment, ObjectKind::kMemo}) {
    if (object_kind_name(k) == name) return k;
  }
  fail(ErrorCode::kInvalidArgument, "unknown object type '" + std::string(name) + "'");
}

VerbatimCode* CodeLog::find_verbatim(std::string_view id) { return find_by_id(verbatims, id); }
const VerbatimCode* CodeLog::find_verbatim(std::string_view id) const {
  return find_by_id(verbatims, id);
}
GerundCode* CodeLog::find_gerund(std::string_view id) { return find_by_id(gerunds, id); }
const GerundCode* CodeLog::find_gerund(std::string_view id) const {
  return find_by_id(gerunds, id);
}
CodeFamily* CodeLog::find_family(std::string_view id) { return find_by_id(families, id); }
const CodeFamily* CodeLog::find_family(std::string_view id) const {
  return find_by_id(families, id);
}
Theme* CodeLog::find_theme(std::string_view id) { return find_by_id(themes, id); }
const Theme* CodeLog::find_theme(std::string_view id) const { return find_by_id(themes, id); }
const Comment* CodeLog::find_comment(std::string_view id) const {
  return find_by_id(comments, id);
}

bool CodeLog::contains(std::string_view id) const {
  switch (kind_of_id(id)) {
    case ObjectKind::kVerbatim: return find_verbatim(id) != nullptr;
    case ObjectKind::kGerund: return find_gerund(id) != nullptr;
    case ObjectKind::kFamily: return find_family(id) != nullptr;
    case ObjectKind::kTheme: return find_theme(id) != nullptr;
    case ObjectKind::kComment: return find_comment(id) != nullptr;
    default: return false;
  }
}

std::string CodeLog::peek_id(ObjectKind kind) const {
  switch (kind) {
    case ObjectKind::kVerbatim: return "V" + std::to_string(counters.verbatim + 1);
    case ObjectKind::kGerund: return "G" + std::to_string(counters.gerund + 1);
    case ObjectKind::kFamily: return "F" + std::to_string(counters.family + 1);
    case ObjectKind::kTheme: return "T" + std::to_string(counters.theme + 1);
    case ObjectKind::kComment: return "C" + std::to_string(counters.comment + 1);
    default: fail(ErrorCode::kInvalidArgument, "code log does not hold this object type");
  }
}

VerbatimCode& CodeLog::add_verbatim(VerbatimCode code) {
  code.id = peek_id(ObjectKind::kVerbatim);
  code.seq = ++counters.verbatim;
  if (code.location.transcript_id.empty()) code.location.transcript_id = transcript_id;
  verbatims.push_back(std::move(code));
  return verbatims.back();
}

GerundCode& CodeLog::add_gerund(GerundCode code) {
  code.id = peek_id(ObjectKind::kGerund);
  code.seq = ++counters.gerund;
  gerunds.push_back(std::move(code));
  return gerunds.back();
}

CodeFamily& CodeLog::add_family(CodeFamily family) {
  family.id = peek_id(ObjectKind::kFamily);
  family.seq = ++counters.family;
  families.push_back(std::move(family));
  return families.back();
}

Theme& CodeLog::add_theme(Theme theme) {
  theme.id = peek_id(ObjectKind::kTheme);
  theme.seq = ++counters.theme;
  themes.push_back(std::move(theme));
  return themes.back();
}

Comment& CodeLog::add_comment(Comment comment) {
  comment.id = peek_id(ObjectKind::kComment);
  ++counters.comment;
  comments.push_back(std::move(comment));
  return comments.back();
}

std::vector<const VerbatimCode*> CodeLog::active_verbatims() const {
  std::vector<const VerbatimCode*> out;
  for (const auto& c : verbatims) {
    if (is_active(c.status)) out.push_back(&c);
  }
  std::stable_sort(out.begin(), out.end(), [](const VerbatimCode* a, const VerbatimCode* b) {
    return std::make_tuple(a->location.paragraph_start, a->location.char_start.value_or(0), a->seq) <
           std::make_tuple(b->location.paragraph_start, b->location.char_start.value_or(0), b->seq);
  });
  return out;
}

std::string label_key(std::string_view label) {
  return text::encode(text::fold_case(text::collapse_whitespace(text::decode(text::to_nfc(label)))));
}

const CodeFamily* CodeLog::family_by_label(std::string_view label) const {
  const std::string key = label_key(label);
  for (const auto& f : families) {
    if (is_active(f.status) && label_key(f.label) == key) return &f;
  }
  return nullptr;
}

const Theme* CodeLog::theme_by_label(std::string_view label) const {
  const std::string key = label_key(label);
  for (const auto& t : themes) {
    if (is_active(t.status) && label_key(t.label) == key) return &t;
  }
  return nullptr;
}

void CodeLog::assign_family(std::string_view gerund_id,
                            const std::optional<std::string>& family_id) {
  GerundCode* g = find_gerund(gerund_id);
  if (g == nullptr) fail(ErrorCode::kTargetNotFound, "no gerund code " + std::string(gerund_id));
  if (g->family_id) {
    if (CodeFamily* old = find_family(*g->family_id)) {
      std::erase(old->member_gerund_ids, g->id);
    }
  }
  g->family_id = family_id;
  if (family_id) {
    CodeFamily* f = find_family(*family_id);
    if (f == nullptr) fail(ErrorCode::kTargetNotFound, "no code family " + *family_id);
    if (std::find(f->member_gerund_ids.begin(), f->member_gerund_ids.end(), g->id) ==
        f->member_gerund_ids.end()) {
      f->member_gerund_ids.push_back(g->id);
    }
  }
}

VerbatimCode make_verbatim_code(std::string_view phrase, LocationRef location,
                                std::string context, std::string rationale, Origin origin) {
  VerbatimCode code;
  code.exact_phrase = text::normalize(phrase);
  if (code.exact_phrase.empty()) fail(ErrorCode::kEmptyPhrase, "verbatim phrase is empty");
  code.location = std::move(location);
  code.paragraph_context = std::move(context);
  code.rationale = std::move(rationale);
  code.origin = origin;
  code.status = initial_status(origin);
  return code;
}

VerbatimCode& new_verbatim_code(CodeLog& log, std::string_view phrase, LocationRef location,
                                std::string context, std::string rationale, Origin origin) {
  return log.add_verbatim(
      make_verbatim_code(phrase, std::move(location), std::move(context), std::move(rationale), origin));
}

GerundCode& derive_gerund(CodeLog& log, const std::vector<std::string>& verbatim_ids,
                          std::string_view label, Origin origin,
                          const std::vector<std::string>& gerund_exceptions) {
  const std::string normalized = text::normalize(label);
  if (normalized.empty()) fail(ErrorCode::kEmptyLabel, "gerund label is empty");
  if (verbatim_ids.empty()) fail(ErrorCode::kUnknownVerbatimId, "no source verbatim codes given");
  for (const auto& id : verbatim_ids) {
    const VerbatimCode* v = log.find_verbatim(id);
    if (v == nullptr || v->status == CodeStatus::kDeleted) {
      fail(ErrorCode::kUnknownVerbatimId, "unknown or deleted verbatim code " + id);
    }
  }
  GerundCode g;
  g.label = normalized;
  g.source_verbatim_ids = verbatim_ids;
  g.origin = origin;
  g.status = initial_status(origin);
  const GerundCheck check = check_gerund(normalized, gerund_exceptions);
  g.gerund_form = check.ok;
  g.gerund_diagnostic = check.diagnostic;
  g.needs_human = !check.ok;
  return log.add_gerund(std::move(g));
}

CodeLogTable render_code_log(const CodeLog& log, const Transcript* transcript, int page_size) {
  CodeLogTable table;
  for (const VerbatimCode* c : log.active_verbatims()) {
    std::string trace;
    if (transcript != nullptr) {
      trace = trace_reference(*transcript, c->location, page_size);
    } else {
      trace = "para." + std::to_string(c->location.paragraph_start);
    }
    table.rows.push_back({c->exact_phrase, std::move(trace), c->paragraph_context, c->rationale});
    table.code_ids.push_back(c->id);
  }
  return table;
}

}  // namespace thematic
