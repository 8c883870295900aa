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

// The five human analytic actions and the append-only trail they form.
//
// An ActionRequest is what a researcher submits. prepare_action validates it
// against the current code log and produces a fully specified
// RevisionAction carrying complete before/after snapshots, so the trail can
// be replayed by apply_recorded without consulting the transcript again.

#ifndef THEMATIC_REVISION_H_
#define THEMATIC_REVISION_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "thematic/codelog.h"
#include "thematic/model.h"
#include "thematic/transcript.h"

namespace thematic {

enum class ActionKind { kModification, kDeletion, kRejection, kInsertion, kCommenting };

std::string_view action_kind_name(ActionKind k);
ActionKind parse_action_kind(std::string_view name);

struct ActionRequest {
  ActionKind kind = ActionKind::kCommenting;
  std::string target_id;  // empty for Insertion
  // Modification: JSON merge patch over the target. Insertion: the new
  // object with a "type" member. Commenting: the comment body (string).
  // Deletion/Rejection: optional replacement object (categorical revision).
  nlohmann::json after;
  std::string rationale;
  std::string actor_id;
  bool integrity_exempt = false;
};

struct RevisionAction {
  std::string id;
  ActionKind kind = ActionKind::kCommenting;
  std::string target_id;
  nlohmann::json before;  // null for Insertion and Commenting
  nlohmann::json after;
  std::string rationale;
  std::string actor_id;
  Phase phase = Phase::kSetup;
  std::string timestamp;
  int sequence = 0;
  int base_version = 0;  // code log version the action applies to
  bool integrity_exempt = false;

  bool operator==(const RevisionAction&) const = default;
};

struct RevisionContext {
  Phase phase = Phase::kSetup;
  std::string timestamp;
  int sequence = 1;
  double near_threshold = 0.15;
  std::vector<std::string> gerund_exceptions;
  int page_size = kDefaultPageSize;
  // Existence check for ids held outside the code log (memos).
  std::function<bool(std::string_view)> external_exists;
};

// Full serialized state of a code-log object, tagged with "type".
nlohmann::json object_snapshot(const CodeLog& log, std::string_view id);

// Throws TargetNotFound, TargetNotActive, NoOpModification,
// IntegrityRequired, InvalidAction, EmptyLabel, EmptyPhrase, DuplicateLabel,
// UnknownVerbatimId.
RevisionAction prepare_action(const CodeLog& log, const Transcript& transcript,
                              const ActionRequest& request, const RevisionContext& ctx);

// Pure state transition from a recorded action. Throws SequenceGap when the
// action does not apply to the log's version and PreconditionReplayFailure
// when the before snapshot disagrees with the log.
void apply_recorded(CodeLog& log, const RevisionAction& action);

// prepare_action + apply_recorded; returns the recorded action.
RevisionAction apply(CodeLog& log, std::vector<RevisionAction>& trail,
                     const Transcript& transcript, const ActionRequest& request,
                     const RevisionContext& ctx);

enum class SummaryCategory { kComments, kInsertions, kDeletionsAndRejections, kRefinements };

using CategoryMap = std::map<ActionKind, SummaryCategory>;

// Commenting -> comments, Insertion -> insertions, Deletion and Rejection ->
// deletions_and_rejections, Modification -> refinements.
CategoryMap default_category_map();

struct ActionCounts {
  int comments = 0;
  int insertions = 0;
  int deletions_and_rejections = 0;
  int refinements = 0;
  int total = 0;

  bool operator==(const ActionCounts&) const = default;
};

struct ActionSummary {
  std::map<std::string, ActionCounts> per_actor;

  bool operator==(const ActionSummary&) const = default;
};

ActionSummary summarize(const std::vector<RevisionAction>& trail,
                        const CategoryMap& category_map = default_category_map());

// Rows are action categories, columns are actors (sorted).
std::string summary_csv(const ActionSummary& summary);
std::string summary_markdown(const ActionSummary& summary);

// Event-sourced reconstruction. Throws SequenceGap or
// PreconditionReplayFailure.
CodeLog rebuild(const CodeLog& initial, const std::vector<RevisionAction>& trail);

}  // namespace thematic

#endif  // THEMATIC_REVISION_H_
