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

// Transcript coverage audit.

#ifndef THEMATIC_COVERAGE_H_
#define THEMATIC_COVERAGE_H_

#include <set>
#include <string>
#include <vector>

#include "thematic/codelog.h"
#include "thematic/model.h"
#include "thematic/transcript.h"

namespace thematic {

using StatusSet = std::set<CodeStatus>;

// ai_proposed, accepted, modified, human_inserted.
StatusSet default_coverage_statuses();

struct CoverageReport {
  // Index i holds the codes covering paragraph i+1.
  std::vector<std::vector<std::string>> per_paragraph;
  std::vector<int> uncoded;
  int covered_count = 0;
  int total_paragraphs = 0;
  double coverage_ratio = 0.0;
  Phase generated_at_phase = Phase::kSetup;

  bool operator==(const CoverageReport&) const = default;
};

// A paragraph is covered when some code with an included status intersects
// it. Throws ForeignCode for codes of another transcript.
CoverageReport audit(const Transcript& transcript, const std::vector<VerbatimCode>& codes,
                     const StatusSet& include_statuses = default_coverage_statuses(),
                     Phase phase = Phase::kSetup);

inline constexpr std::size_t kGapSnippetLength = 80;

// Gap list quoting the first 80 characters of each uncoded paragraph.
std::string coverage_gaps_prompt(const CoverageReport& report, const Transcript& transcript);

}  // namespace thematic

#endif  // THEMATIC_COVERAGE_H_
