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

// The analytic ladder: verbatim codes, gerund codes, code families and
// themes, plus comments. Objects are never physically removed; deletion and
// rejection leave tombstones so every reference stays resolvable.

#ifndef THEMATIC_CODELOG_H_
#define THEMATIC_CODELOG_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thematic/model.h"
#include "thematic/transcript.h"

namespace thematic {

struct VerbatimCode {
  std::string id;
  int seq = 0;  // creation order
  std::string exact_phrase;
  LocationRef location;
  std::string paragraph_context;
  std::string rationale;
  CodeStatus status = CodeStatus::kAiProposed;
  Origin origin = Origin::kAi;
  std::optional<IntegrityVerdict> integrity;
  bool needs_human = false;

  bool operator==(const VerbatimCode&) const = default;
};

struct GerundCode {
  std::string id;
  int seq = 0;
  std::string label;
  std::vector<std::string> source_verbatim_ids;
  std::optional<std::string> family_id;
  CodeStatus status = CodeStatus::kAiProposed;
  Origin origin = Origin::kAi;
  bool gerund_form = false;
  std::string gerund_diagnostic;
  bool needs_human = false;

  bool operator==(const GerundCode&) const = default;
};

struct CodeFamily {
  std::string id;
  int seq = 0;
  std::string label;
  std::vector<std::string> member_gerund_ids;
  Dimension dimension = Dimension::kUnassigned;
  CodeStatus status = CodeStatus::kAiProposed;
  Origin origin = Origin::kAi;

  bool operator==(const CodeFamily&) const = default;
};

struct Theme {
  std::string id;
  int seq = 0;
  std::string label;
  std::vector<std::string> family_ids;
  std::string definition;
  std::vector<std::string> supporting_verbatim_ids;
  Dimension dimension = Dimension::kUnassigned;
  CodeStatus status = CodeStatus::kAiProposed;
  Origin origin = Origin::kAi;
  bool evidence_gap = false;

  bool operator==(const Theme&) const = default;
};

struct Comment {
  std::string id;
  std::string target_id;
  std::string body;
  std::string author_id;
  std::string timestamp;

  bool operator==(const Comment&) const = default;
};

enum class ObjectKind { kVerbatim, kGerund, kFamily, kTheme, kComment, kMemo, kUnknown };

// Ids carry a type prefix: V12, G3, F1, T2, C7, M4.
ObjectKind kind_of_id(std::string_view id);
std::string_view object_kind_name(ObjectKind k);  // "verbatim", "gerund", ...
ObjectKind parse_object_kind(std::string_view name);

struct IdCounters {
  int verbatim = 0;
  int gerund = 0;
  int family = 0;
  int theme = 0;
  int comment = 0;

  bool operator==(const IdCounters&) const = default;
};

struct CodeLog {
  std::string transcript_id;
  std::vector<VerbatimCode> verbatims;
  std::vector<GerundCode> gerunds;
  std::vector<CodeFamily> families;
  std::vector<Theme> themes;
  std::vector<Comment> comments;
  // Incremented by every committed mutation (phase output or revision).
  int version = 0;
  IdCounters counters;

  VerbatimCode* find_verbatim(std::string_view id);
  const VerbatimCode* find_verbatim(std::string_view id) const;
  GerundCode* find_gerund(std::string_view id);
  const GerundCode* find_gerund(std::string_view id) const;
  CodeFamily* find_family(std::string_view id);
  const CodeFamily* find_family(std::string_view id) const;
  Theme* find_theme(std::string_view id);
  const Theme* find_theme(std::string_view id) const;
  const Comment* find_comment(std::string_view id) const;

  bool contains(std::string_view id) const;

  // Next id that add_* would assign.
  std::string peek_id(ObjectKind kind) const;

  // Assign fresh id and creation sequence, then append.
  VerbatimCode& add_verbatim(VerbatimCode code);
  GerundCode& add_gerund(GerundCode code);
  CodeFamily& add_family(CodeFamily family);
  Theme& add_theme(Theme theme);
  Comment& add_comment(Comment comment);

  // Active (non-deleted, non-rejected) codes in transcript order:
  // (paragraph_start, char_start or 0, creation sequence).
  std::vector<const VerbatimCode*> active_verbatims() const;

  // Active family / theme with this label, compared case-insensitively.
  const CodeFamily* family_by_label(std::string_view label) const;
  const Theme* theme_by_label(std::string_view label) const;

  // Moves a gerund between families keeping both sides of the link in sync.
  void assign_family(std::string_view gerund_id, const std::optional<std::string>& family_id);

  bool operator==(const CodeLog&) const = default;
};

// Case-insensitive label key (NFC, whitespace collapsed, case folded).
std::string label_key(std::string_view label);

VerbatimCode make_verbatim_code(std::string_view phrase, LocationRef location,
                                std::string context, std::string rationale, Origin origin);

// Creates and records a verbatim code. Throws EmptyPhrase.
VerbatimCode& new_verbatim_code(CodeLog& log, std::string_view phrase, LocationRef location,
                                std::string context, std::string rationale, Origin origin);

// Links active verbatim sources to a descriptive code and records the
// gerund-form check. Throws UnknownVerbatimId, EmptyLabel.
GerundCode& derive_gerund(CodeLog& log, const std::vector<std::string>& verbatim_ids,
                          std::string_view label, Origin origin = Origin::kAi,
                          const std::vector<std::string>& gerund_exceptions = {});

inline constexpr std::array<std::string_view, 4> kCodeLogColumns{
    "Exact Keyword / Phrase (verbatim)",
    "Transcript + Line Reference",
    "Paragraph Context",
    "Rationale / Interpretation",
};

struct CodeLogTable {
  std::vector<std::array<std::string, 4>> rows;
  std::vector<std::string> code_ids;  // parallel to rows; empty after parsing

  bool operator==(const CodeLogTable& other) const { return rows == other.rows; }
};

// Four-column table of active verbatim codes in transcript order.
CodeLogTable render_code_log(const CodeLog& log, const Transcript* transcript, int page_size);

}  // namespace thematic

#endif  // THEMATIC_CODELOG_H_
