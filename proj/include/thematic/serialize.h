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

// JSON mapping for every persisted type. Enumerations use their wire names;
// absent optionals are written as null.

#ifndef THEMATIC_SERIALIZE_H_
#define THEMATIC_SERIALIZE_H_

#include <string>

#include "json.hpp"
#include "thematic/codelog.h"
#include "thematic/coverage.h"
#include "thematic/error.h"
#include "thematic/gateway.h"
#include "thematic/integrity.h"
#include "thematic/model.h"
#include "thematic/revision.h"
#include "thematic/transcript.h"
#include "thematic/workflow.h"

namespace thematic {

using nlohmann::json;

#define THEMATIC_JSON_DECL(T)                \
  void to_json(json& j, const T& v);         \
  void from_json(const json& j, T& v);

THEMATIC_JSON_DECL(LocationRef)
THEMATIC_JSON_DECL(Paragraph)
THEMATIC_JSON_DECL(Page)
THEMATIC_JSON_DECL(Transcript)
THEMATIC_JSON_DECL(IntegrityVerdict)
THEMATIC_JSON_DECL(VerbatimCode)
THEMATIC_JSON_DECL(GerundCode)
THEMATIC_JSON_DECL(CodeFamily)
THEMATIC_JSON_DECL(Theme)
THEMATIC_JSON_DECL(Comment)
THEMATIC_JSON_DECL(IdCounters)
THEMATIC_JSON_DECL(CodeLog)
THEMATIC_JSON_DECL(IntegritySummary)
THEMATIC_JSON_DECL(IntegrityReport)
THEMATIC_JSON_DECL(CoverageReport)
THEMATIC_JSON_DECL(PhaseOverride)
THEMATIC_JSON_DECL(LlmConfig)
THEMATIC_JSON_DECL(RawCompletion)
THEMATIC_JSON_DECL(CandidateCode)
THEMATIC_JSON_DECL(GerundMapping)
THEMATIC_JSON_DECL(ThemeProposal)
THEMATIC_JSON_DECL(RevisionAction)
THEMATIC_JSON_DECL(ActionRequest)
THEMATIC_JSON_DECL(ActionCounts)
THEMATIC_JSON_DECL(ActionSummary)
THEMATIC_JSON_DECL(SessionSettings)
THEMATIC_JSON_DECL(PhaseState)
THEMATIC_JSON_DECL(LinkedRef)
THEMATIC_JSON_DECL(Memo)
THEMATIC_JSON_DECL(InteractionEntry)
THEMATIC_JSON_DECL(Session)

#undef THEMATIC_JSON_DECL

// Wire form of any code log object (verbatim, gerund, family, theme or
// comment) with its "type" member.
json code_object_json(const CodeLog& log, std::string_view id);

// Runs f, rethrowing JSON library errors as thematic errors with `code`.
template <typename F>
auto with_json_errors(ErrorCode code, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(code, e.what());
  }
}

}  // namespace thematic

#endif  // THEMATIC_SERIALIZE_H_
