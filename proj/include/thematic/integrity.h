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

// Trace-to-text integrity: exact substring verification of verbatim codes,
// near-verbatim drift detection and the gerund-form check.

#ifndef THEMATIC_INTEGRITY_H_
#define THEMATIC_INTEGRITY_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thematic/codelog.h"
#include "thematic/model.h"
#include "thematic/transcript.h"

namespace thematic {

inline constexpr double kDefaultNearThreshold = 0.15;
// Candidate windows are token-aligned spans whose length is within this
// fraction of the phrase length.
inline constexpr double kWindowBand = 0.30;

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

// Case-sensitive substring search after whitespace normalization. With a
// hint, a match inside the hinted paragraphs wins; a match found only
// elsewhere yields LocationMismatch. Throws EmptyPhrase.
IntegrityVerdict check_exact(std::string_view phrase, const Transcript& transcript,
                             const std::optional<LocationRef>& hint = std::nullopt);

// Case-insensitive search for the closest token-aligned window. Returns
// NearVerbatim when the normalized distance is within near_threshold and
// NotFound otherwise.
IntegrityVerdict detect_near_verbatim(std::string_view phrase, const Transcript& transcript,
                                      double near_threshold = kDefaultNearThreshold);

struct GerundCheck {
  bool ok = false;
  std::string diagnostic;
};

GerundCheck check_gerund(std::string_view label,
                         const std::vector<std::string>& exceptions = {});

struct IntegritySummary {
  int exact = 0;
  int near_verbatim = 0;
  int not_found = 0;
  int location_mismatch = 0;

  int total() const { return exact + near_verbatim + not_found + location_mismatch; }
  bool operator==(const IntegritySummary&) const = default;
};

struct IntegrityReport {
  // One entry per active verbatim code, in transcript order.
  std::vector<std::pair<std::string, IntegrityVerdict>> per_code;
  IntegritySummary summary;

  const IntegrityVerdict* find(std::string_view code_id) const;
  bool operator==(const IntegrityReport&) const = default;
};

// Full verdict for one phrase: exact check, falling back to near-verbatim
// search when nothing exact exists.
IntegrityVerdict verify_phrase(std::string_view phrase, const Transcript& transcript,
                               const std::optional<LocationRef>& hint, double near_threshold);

// Verifies every active verbatim code and writes the verdicts back.
IntegrityReport validate_session(CodeLog& log, const Transcript& transcript,
                                 double near_threshold = kDefaultNearThreshold);

}  // namespace thematic

#endif  // THEMATIC_INTEGRITY_H_
