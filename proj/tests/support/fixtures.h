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

// Interview fixtures, mock responders and scripted researcher sessions
// shared by the unit tests and the acceptance runner.

#ifndef THEMATIC_TESTS_SUPPORT_FIXTURES_H_
#define THEMATIC_TESTS_SUPPORT_FIXTURES_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "thematic/gateway.h"
#include "thematic/revision.h"
#include "thematic/workflow.h"

namespace thematic::fixtures {

struct Scenario {
  std::string name;
  std::string question;
  CodingMode mode = CodingMode::kExactPlusDescriptive;
  std::string title;
  std::string transcript;  // raw text, paragraphs separated by blank lines
  std::string narrative;
  std::map<int, std::string> segments;  // by page number
  std::map<int, std::string> extracts;  // p2_extract, by page number
  std::string repair;                   // p2_repair
  std::string gerunds;
  std::string themes;
  std::map<std::string, std::string> reviews;      // by theme label
  std::map<std::string, std::string> definitions;  // by theme label
  std::string reflexive;
};

// Focus-group excerpt with four student-teacher turns.
const Scenario& focus_group();
// Lecturer interview on teacher supply and academic growth.
const Scenario& lecturer();
// Interview with a teacher posted outside his specialism.
const Scenario& charlie();

// Exact phrases of the four focus-group codes; the fourth is the manual
// gap code added after extraction.
std::vector<std::string> focus_group_phrases();

MockBackend::Responder responder(const Scenario& scenario);
std::shared_ptr<MockBackend> mock_backend(const Scenario& scenario);

inline constexpr const char* kFacilitator = "facilitator";

// Creates a session on a logical clock and loads the scenario transcript.
Session start(const Scenario& scenario, SessionSettings settings = {});

// Approves and runs every phase after the current one up to and including
// `last`.
void run_until(Session& s, Gateway& gw, Phase last, const std::string& actor = kFacilitator);

// Insertion of the fourth focus-group phrase as a human gap code.
ActionRequest focus_group_gap_code(const std::string& actor);

// Categorized researcher actions, replayed after Phase 4 has run.
struct CoderScript {
  std::string actor;
  const Scenario* scenario = nullptr;
  ActionCounts expected;
  std::vector<ActionRequest> actions;
};

// coder in 1..3. Target ids refer to the objects produced by the scenario
// run, which are deterministic.
CoderScript coder_script(int coder);

// Runs a scenario to Phase 4 and returns the session ready for the script.
Session prepared_session(const CoderScript& script);

// Setup through Phase 6 on the focus-group fixture with one manual gap code.
Session golden_session(const std::shared_ptr<ChatBackend>& backend = nullptr);

// Source tree paths baked in at configure time.
std::string source_dir();
std::string golden_report_path();

}  // namespace thematic::fixtures

#endif  // THEMATIC_TESTS_SUPPORT_FIXTURES_H_
