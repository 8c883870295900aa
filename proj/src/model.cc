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

#include "thematic/model.h"

#include <array>
#include <utility>

#include "thematic/error.h"

namespace thematic {
namespace {

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "unknown";
}

template <typename E, std::size_t N>
E parse_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view name,
           std::string_view what) {
  for (const auto& [e, n] : table) {
    if (n == name) return e;
  }
  fail(ErrorCode::kInvalidArgument,
       "unknown " + std::string(what) + " '" + std::string(name) + "'");
}

constexpr std::array<std::pair<Phase, std::string_view>, 8> kPhases{{
    {Phase::kSetup, "Setup"},
    {Phase::kFamiliarization, "P1_Familiarization"},
    {Phase::kExactKeyword, "P2_ExactKeyword"},
    {Phase::kDescriptivePattern, "P3_DescriptivePattern"},
    {Phase::kThemeDevelopment, "P4_ThemeDevelopment"},
    {Phase::kThemeReview, "P5_ThemeReview"},
    {Phase::kDefineReport, "P6_DefineReport"},
    {Phase::kComplete, "Complete"},
}};

constexpr std::array<std::pair<CodeStatus, std::string_view>, 6> kStatuses{{
    {CodeStatus::kAiProposed, "ai_proposed"},
    {CodeStatus::kAccepted, "accepted"},
    {CodeStatus::kModified, "modified"},
    {CodeStatus::kRejected, "rejected"},
    {CodeStatus::kDeleted, "deleted"},
    {CodeStatus::kHumanInserted, "human_inserted"},
}};

constexpr std::array<std::pair<Origin, std::string_view>, 2> kOrigins{{
    {Origin::kAi, "ai"},
    {Origin::kHuman, "human"},
}};

constexpr std::array<std::pair<Dimension, std::string_view>, 3> kDimensions{{
    {Dimension::kUnassigned, "unassigned"},
    {Dimension::kStructural, "structural"},
    {Dimension::kPersonal, "personal"},
}};

constexpr std::array<std::pair<MemoKind, std::string_view>, 5> kMemoKinds{{
    {MemoKind::kPhaseSummary, "phase_summary"},
    {MemoKind::kSegmentedSummary, "segmented_summary"},
    {MemoKind::kAnalytic, "analytic"},
    {MemoKind::kReflexive, "reflexive"},
    {MemoKind::kMethodological, "methodological"},
}};

constexpr std::array<std::pair<CodingMode, std::string_view>, 2> kModes{{
    {CodingMode::kExactKeywordOnly, "exact_keyword_only"},
    {CodingMode::kExactPlusDescriptive, "exact_plus_descriptive"},
}};

constexpr std::array<std::pair<VerdictKind, std::string_view>, 4> kVerdicts{{
    {VerdictKind::kExact, "Exact"},
    {VerdictKind::kNearVerbatim, "NearVerbatim"},
    {VerdictKind::kNotFound, "NotFound"},
    {VerdictKind::kLocationMismatch, "LocationMismatch"},
}};

}  // namespace

std::string_view phase_name(Phase p) { return name_of(kPhases, p); }

Phase parse_phase(std::string_view name) {
  if (name.size() == 2 && name[0] == 'P' && name[1] >= '1' && name[1] <= '6') {
    return static_cast<Phase>(name[1] - '0');
  }
  return parse_of(kPhases, name, "phase");
}

std::optional<Phase> next_phase(Phase p) {
  if (p == Phase::kComplete) return std::nullopt;
  return static_cast<Phase>(static_cast<int>(p) + 1);
}

std::string_view status_name(CodeStatus s) { return name_of(kStatuses, s); }
CodeStatus parse_status(std::string_view name) { return parse_of(kStatuses, name, "status"); }
std::string_view origin_name(Origin o) { return name_of(kOrigins, o); }
Origin parse_origin(std::string_view name) { return parse_of(kOrigins, name, "origin"); }
std::string_view dimension_name(Dimension d) { return name_of(kDimensions, d); }
Dimension parse_dimension(std::string_view name) {
  return parse_of(kDimensions, name, "dimension");
}
std::string_view memo_kind_name(MemoKind k) { return name_of(kMemoKinds, k); }
MemoKind parse_memo_kind(std::string_view name) {
  return parse_of(kMemoKinds, name, "memo kind");
}
std::string_view coding_mode_name(CodingMode m) { return name_of(kModes, m); }
CodingMode parse_coding_mode(std::string_view name) {
  return parse_of(kModes, name, "coding mode");
}
std::string_view verdict_name(VerdictKind k) { return name_of(kVerdicts, k); }
VerdictKind parse_verdict(std::string_view name) {
  return parse_of(kVerdicts, name, "verdict");
}

}  // namespace thematic
