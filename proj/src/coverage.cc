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

#include "thematic/coverage.h"

#include <algorithm>

#include "thematic/error.h"
#include "thematic/text.h"

namespace thematic {

StatusSet default_coverage_statuses() {
  return {CodeStatus::kAiProposed, CodeStatus::kAccepted, CodeStatus::kModified,
          CodeStatus::kHumanInserted};
}

CoverageReport audit(const Transcript& transcript, const std::vector<VerbatimCode>& codes,
                     const StatusSet& include_statuses, Phase phase) {
  const int n = transcript.paragraph_count();
  CoverageReport report;
  report.total_paragraphs = n;
  report.generated_at_phase = phase;
  report.per_paragraph.resize(static_cast<std::size_t>(n));
  for (const auto& code : codes) {
    if (code.location.transcript_id != transcript.id) {
      fail(ErrorCode::kForeignCode, "code " + code.id + " references transcript " +
                                        code.location.transcript_id);
    }
    if (!include_statuses.contains(code.status)) continue;
    const int first = std::max(1, code.location.paragraph_start);
    const int last = std::min(n, code.location.paragraph_end);
    for (int i = first; i <= last; ++i) {
      report.per_paragraph[static_cast<std::size_t>(i - 1)].push_back(code.id);
    }
  }
  for (int i = 1; i <= n; ++i) {
    if (report.per_paragraph[static_cast<std::size_t>(i - 1)].empty()) {
      report.uncoded.push_back(i);
    } else {
      ++report.covered_count;
    }
  }
  report.coverage_ratio = n == 0 ? 0.0 : static_cast<double>(report.covered_count) / n;
  return report;
}

std::string coverage_gaps_prompt(const CoverageReport& report, const Transcript& transcript) {
  if (report.uncoded.empty()) {
    return "Full coverage: all " + std::to_string(report.total_paragraphs) +
           " paragraphs have at least one coded extract.\n";
  }
  std::string out = "Uncoded segments (" + std::to_string(report.uncoded.size()) + " of " +
                    std::to_string(report.total_paragraphs) +
                    " paragraphs). Review each and code it or record why it is not codable:\n";
  for (int index : report.uncoded) {
    const std::string& body = transcript.paragraph(index).text;
    const std::size_t len = text::length(body);
    std::string snippet = len <= kGapSnippetLength ? body : text::slice(body, 0, kGapSnippetLength);
    out += "- Paragraph " + std::to_string(index) + ": \"" + snippet;
    out += len <= kGapSnippetLength ? "\"\n" : "...\"\n";
  }
  return out;
}

}  // namespace thematic
