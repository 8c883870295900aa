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

// Enumerations shared across modules, with their stable wire names.

#ifndef THEMATIC_MODEL_H_
#define THEMATIC_MODEL_H_

#include <optional>
#include <string>
#include <string_view>

#include "thematic/transcript.h"

namespace thematic {

enum class Phase {
  kSetup,
  kFamiliarization,
  kExactKeyword,
  kDescriptivePattern,
  kThemeDevelopment,
  kThemeReview,
  kDefineReport,
  kComplete,
};

std::string_view phase_name(Phase p);  // "Setup", "P1_Familiarization", ...
Phase parse_phase(std::string_view name);  // also accepts "P1".."P6"
std::optional<Phase> next_phase(Phase p);

enum class CodeStatus { kAiProposed, kAccepted, kModified, kRejected, kDeleted, kHumanInserted };
enum class Origin { kAi, kHuman };
enum class Dimension { kUnassigned, kStructural, kPersonal };
enum class MemoKind { kPhaseSummary, kSegmentedSummary, kAnalytic, kReflexive, kMethodological };
enum class CodingMode { kExactKeywordOnly, kExactPlusDescriptive };

std::string_view status_name(CodeStatus s);
CodeStatus parse_status(std::string_view name);
std::string_view origin_name(Origin o);
Origin parse_origin(std::string_view name);
std::string_view dimension_name(Dimension d);
Dimension parse_dimension(std::string_view name);
std::string_view memo_kind_name(MemoKind k);
MemoKind parse_memo_kind(std::string_view name);
std::string_view coding_mode_name(CodingMode m);
CodingMode parse_coding_mode(std::string_view name);

inline bool is_active(CodeStatus s) {
  return s != CodeStatus::kRejected && s != CodeStatus::kDeleted;
}

inline CodeStatus initial_status(Origin o) {
  return o == Origin::kAi ? CodeStatus::kAiProposed : CodeStatus::kHumanInserted;
}

enum class VerdictKind { kExact, kNearVerbatim, kNotFound, kLocationMismatch };

std::string_view verdict_name(VerdictKind k);
VerdictKind parse_verdict(std::string_view name);

struct IntegrityVerdict {
  VerdictKind kind = VerdictKind::kNotFound;
  std::optional<LocationRef> matched_location;
  std::optional<double> normalized_distance;
  std::optional<std::string> suggested_exact;

  bool operator==(const IntegrityVerdict&) const = default;
};

}  // namespace thematic

#endif  // THEMATIC_MODEL_H_
