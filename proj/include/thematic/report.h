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

// Final analysis report assembled at the end of the define-and-report phase.

#ifndef THEMATIC_REPORT_H_
#define THEMATIC_REPORT_H_

#include <array>
#include <string>
#include <string_view>

namespace thematic {

struct Session;

inline constexpr std::array<std::string_view, 6> kReportSections{
    "Summaries and Memos",
    "Verbatim Code Log",
    "Descriptive Codes and Code Families",
    "Themes",
    "Coverage and Integrity",
    "Audit Trail",
};

// Markdown document with the six sections above, in that order.
std::string render_report(const Session& s);

}  // namespace thematic

#endif  // THEMATIC_REPORT_H_
