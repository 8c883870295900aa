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

#include <atomic>
#include <map>
#include <regex>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.h"
#include "properties.h"
#include "test_util.h"
#include "thematic/report.h"
#include "thematic/store.h"
#include "thematic/text.h"
#include "thematic/workflow.h"

namespace thematic {
namespace {

using fixtures::kFacilitator;
using testutil::code_of;

using Handler = std::function<std::optional<std::string>(std::string_view prompt)>;

// Scenario responder with selected templates replaced.
std::shared_ptr<MockBackend> overriding(const fixtures::Scenario& sc,
                                        std::map<std::string, Handler> handlers) {
  auto base = fixtures::responder(sc);
  return std::make_shared<MockBackend>(
      [base, handlers](std::string_view id, std::string_view prompt) -> std::optional<std::string> {
        auto it = handlers.find(std::string(id));
        if (it != handlers.end()) return it->second(prompt);
        return base(id, prompt);
      });
}

Handler constant(std::string text) {
  return [text](std::string_view) -> std::optional<std::string> { return text; };
}

int page_of_prompt(std::string_view prompt) {
  static const std::regex re(R"(for Page (\d+):\s*$)");
  std::match_results<std::string_view::const_iterator> m;
  REQUIRE(std::regex_search(prompt.begin(), prompt.end(), m, re));
  return std::stoi(m[1].str());
}

int count_template(const Session& s, std::string_view template_id) {
  int n = 0;
  for (const auto& e : s.interaction_log) {
    if (e.direction != Direction::kPrompt || e.sequence == 1) continue;
    n += nlohmann::json::parse(e.payload)["template_id"] == template_id;
  }
  return n;
}

Approval to(Phase p, std::string actor = kFacilitator) { return Approval{std::move(actor), p}; }

std::string many_paragraphs(int n) {
  std::string raw;
  for (int i = 1; i <= n; ++i) raw += "Speaker: paragraph number " + std::to_string(i) + ".\n\n";
  return raw;
}

void expect_replay_equal(const Session& s) {
  const auto log = parse_interaction_log(export_interaction_log(s));
  const Session r = replay(log, initial_state(s));
  const auto diff = props::session_diff(s, r);
  CHECK_MESSAGE(diff.empty(), (diff.empty() ? std::string() : diff.front()));
  CHECK(serialize_session(r) == serialize_session(s));
}

TEST_SUITE("workflow") {
  TEST_CASE("session creation") {
    Session s = create_session("How are lecturers recruited and deployed?",
                               CodingMode::kExactPlusDescriptive, LlmConfig{}, {}, logical_clock());
    CHECK(s.phase.current == Phase::kSetup);
    CHECK_FALSE(s.phase.authorized_by.has_value());
    REQUIRE(s.interaction_log.size() == 1);
    CHECK(s.interaction_log[0].direction == Direction::kPrompt);
    CHECK(s.interaction_log[0].payload.find("coding mode") != std::string::npos);
    CHECK(s.id.starts_with("s-"));
    CHECK(code_of([] {
            create_session("  ", CodingMode::kExactPlusDescriptive, LlmConfig{});
          }) == ErrorCode::kEmptyResearchQuestion);
    LlmConfig hot;
    hot.temperature = 3;
    CHECK(code_of([&] { create_session("Q", CodingMode::kExactPlusDescriptive, hot); }) ==
          ErrorCode::kInvalidArgument);
  }

  TEST_CASE("advance is consent gated and ordered") {
    Session s = create_session("Q?", CodingMode::kExactPlusDescriptive, LlmConfig{}, {},
                               logical_clock());
    CHECK(code_of([&] { thematic::advance(s, to(Phase::kFamiliarization)); }) ==
          ErrorCode::kSetupIncomplete);
    ingest_transcript(s, kFacilitator, fixtures::focus_group().transcript, "FGD");
    CHECK(code_of([&] { ingest_transcript(s, kFacilitator, "again", "x"); }) ==
          ErrorCode::kInvalidArgument);
    CHECK(code_of([&] { thematic::advance(s, std::nullopt); }) == ErrorCode::kUnauthorizedAdvance);
    CHECK(code_of([&] { thematic::advance(s, to(Phase::kFamiliarization, " ")); }) ==
          ErrorCode::kUnauthorizedAdvance);
    CHECK(code_of([&] { thematic::advance(s, to(Phase::kExactKeyword)); }) ==
          ErrorCode::kPhaseOrderViolation);
    const std::size_t entries = s.interaction_log.size();
    thematic::advance(s, to(Phase::kFamiliarization, "Coder 1"));
    CHECK(s.phase.current == Phase::kFamiliarization);
    CHECK(s.phase.authorized_by == std::optional<std::string>("Coder 1"));
    REQUIRE(s.interaction_log.size() == entries + 1);
    CHECK(s.interaction_log.back().direction == Direction::kHumanAction);
    CHECK(s.phase.entered_at == s.interaction_log.back().timestamp);
    CHECK(code_of([&] { thematic::advance(s, to(Phase::kDescriptivePattern)); }) ==
          ErrorCode::kPhaseOrderViolation);
    CHECK(code_of([&] { ingest_transcript(s, kFacilitator, "late", "x"); }) ==
          ErrorCode::kWrongPhase);
  }

  TEST_CASE("exact keyword only sessions stop before descriptive coding") {
    fixtures::Scenario sc = fixtures::focus_group();
    sc.mode = CodingMode::kExactKeywordOnly;
    Session s = fixtures::start(sc);
    Gateway gw(s.llm_config, fixtures::mock_backend(sc));
    fixtures::run_until(s, gw, Phase::kExactKeyword);
    const std::string before = serialize_session(s);
    CHECK(code_of([&] { thematic::advance(s, to(Phase::kDescriptivePattern)); }) ==
          ErrorCode::kModeViolation);
    CHECK(serialize_session(s) == before);
  }

  TEST_CASE("revert goes back with approval and repeats the gates") {
    Session s = fixtures::start(fixtures::focus_group());
    Gateway gw(s.llm_config, fixtures::mock_backend(fixtures::focus_group()));
    fixtures::run_until(s, gw, Phase::kExactKeyword);
    CHECK(code_of([&] { revert(s, std::nullopt); }) == ErrorCode::kUnauthorizedAdvance);
    CHECK(code_of([&] { revert(s, to(Phase::kExactKeyword)); }) == ErrorCode::kPhaseOrderViolation);
    CHECK(code_of([&] { revert(s, to(Phase::kDefineReport)); }) == ErrorCode::kPhaseOrderViolation);
    revert(s, to(Phase::kFamiliarization, "Coder 1"));
    CHECK(s.phase.current == Phase::kFamiliarization);
    CHECK(s.phase.authorized_by == std::optional<std::string>("Coder 1"));
    CHECK(code_of([&] { thematic::advance(s, to(Phase::kDescriptivePattern)); }) ==
          ErrorCode::kPhaseOrderViolation);
    thematic::advance(s, to(Phase::kExactKeyword));
    CHECK(s.code_log.verbatims.size() == 3);
    expect_replay_equal(s);
  }

  TEST_CASE("phase runs are only reachable in their phase") {
    Session s = fixtures::start(fixtures::charlie());
    Gateway gw(s.llm_config, fixtures::mock_backend(fixtures::charlie()));
    CHECK(code_of([&] { run_current_phase(s, gw, kFacilitator); }) == ErrorCode::kWrongPhase);
    CHECK(code_of([&] { run_phase1(s, gw, kFacilitator); }) == ErrorCode::kWrongPhase);
    thematic::advance(s, to(Phase::kFamiliarization));
    CHECK(code_of([&] { run_phase2(s, gw, kFacilitator); }) == ErrorCode::kWrongPhase);
    CHECK(code_of([&] { run_phase6(s, gw, kFacilitator); }) == ErrorCode::kWrongPhase);
    CHECK(code_of([&] { run_phase1(s, gw, ""); }) == ErrorCode::kInvalidArgument);
    CHECK_NOTHROW(run_phase1(s, gw, kFacilitator));
  }

  TEST_CASE("phase 1 writes one narrative and one segmented memo per page") {
    fixtures::Scenario sc = fixtures::focus_group();
    sc.transcript = many_paragraphs(25);
    auto backend = overriding(sc, {{"p1_segment", [](std::string_view p) {
                                      return std::optional<std::string>(
                                          "Segment " + std::to_string(page_of_prompt(p)));
                                    }}});
    Session s = fixtures::start(sc);
    Gateway gw(s.llm_config, backend);
    thematic::advance(s, to(Phase::kFamiliarization));
    const Phase1Result r = run_phase1(s, gw, kFacilitator);
    CHECK(r.narrative.kind == MemoKind::kPhaseSummary);
    CHECK(r.narrative.body == sc.narrative);
    REQUIRE(r.segmented.size() == 3);
    for (int i = 0; i < 3; ++i) {
      const Memo& m = r.segmented[static_cast<std::size_t>(i)];
      CHECK(m.kind == MemoKind::kSegmentedSummary);
      CHECK(m.body == "Segment " + std::to_string(i + 1));
      REQUIRE(m.linked_refs.size() == 1);
      CHECK(m.linked_refs[0].location->paragraph_start == i * 10 + 1);
      CHECK(m.linked_refs[0].location->paragraph_end == std::min(25, i * 10 + 10));
      CHECK(m.linked_refs[0].location->page == std::optional<int>(i + 1));
    }
    CHECK(s.memos.size() == 4);
    CHECK(count_template(s, "p1_segment") == 3);
    CHECK(count_template(s, "p1_narrative") == 1);
    expect_replay_equal(s);
  }

  TEST_CASE("phase 1 failure on one page persists nothing") {
    fixtures::Scenario sc = fixtures::focus_group();
    sc.transcript = many_paragraphs(25);
    auto backend = overriding(sc, {{"p1_segment", [](std::string_view p) {
                                      if (page_of_prompt(p) == 2) return std::optional<std::string>();
                                      return std::optional<std::string>("ok");
                                    }}});
    Session s = fixtures::start(sc);
    Gateway gw(s.llm_config, backend);
    thematic::advance(s, to(Phase::kFamiliarization));
    const std::string before = serialize_session(s);
    CHECK(code_of([&] { run_phase1(s, gw, kFacilitator); }) == ErrorCode::kMockFixtureMissing);
    CHECK(serialize_session(s) == before);
    CHECK(s.memos.empty());
  }

  TEST_CASE("phase 2 on the focus-group excerpt repairs the drifted quote") {
    Session s = fixtures::start(fixtures::focus_group());
    Gateway gw(s.llm_config, fixtures::mock_backend(fixtures::focus_group()));
    fixtures::run_until(s, gw, Phase::kExactKeyword);
    const auto phrases = fixtures::focus_group_phrases();
    REQUIRE(s.code_log.verbatims.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const VerbatimCode& v = s.code_log.verbatims[i];
      CHECK(v.exact_phrase == phrases[i]);
      CHECK(v.integrity->kind == VerdictKind::kExact);
      CHECK_FALSE(v.needs_human);
      CHECK(v.location.paragraph_start == static_cast<int>(i) + 1);
      CHECK(v.location.page == std::optional<int>(1));
      CHECK(resolve(*s.transcript, v.location) == v.exact_phrase);
      CHECK(v.status == CodeStatus::kAiProposed);
    }
    CHECK(count_template(s, "p2_repair") == 1);
    CHECK(compute_coverage(s).uncoded == std::vector<int>{4});
  }

  TEST_CASE("phase 2 with all four focus-group codes") {
    const auto phrases = fixtures::focus_group_phrases();
    std::vector<CandidateCode> entries;
    for (const auto& p : phrases) entries.push_back({"code", p, 1, "rationale"});
    auto backend = overriding(fixtures::focus_group(), {{"p2_extract", constant(emit_code_entries(entries))}});
    Session s = fixtures::start(fixtures::focus_group());
    Gateway gw(s.llm_config, backend);
    fixtures::run_until(s, gw, Phase::kExactKeyword);
    REQUIRE(s.code_log.verbatims.size() == 4);
    for (const auto& v : s.code_log.verbatims) CHECK(v.integrity->kind == VerdictKind::kExact);
    CHECK(compute_coverage(s).coverage_ratio == 1.0);
    CHECK(count_template(s, "p2_repair") == 0);
  }

  TEST_CASE("phase 2 flags an unrepaired paraphrase as near-verbatim") {
    fixtures::Scenario sc = fixtures::lecturer();
    const std::string paraphrase = "1. Code: Stagnation\n   Passage: \"it is easy to remain stagnant "
                                   "there\"\n   Page: 1\n   Rationale: routine\n";
    for (int budget : {0, 1, 2}) {
      INFO("repair budget " << budget);
      auto backend = overriding(sc, {{"p2_extract", constant(paraphrase)},
                                     {"p2_repair", constant(paraphrase)}});
      SessionSettings settings;
      settings.repair_budget = budget;
      Session s = fixtures::start(sc, settings);
      Gateway gw(s.llm_config, backend);
      fixtures::run_until(s, gw, Phase::kExactKeyword);
      REQUIRE(s.code_log.verbatims.size() == 1);
      const VerbatimCode& v = s.code_log.verbatims[0];
      CHECK(v.integrity->kind == VerdictKind::kNearVerbatim);
      CHECK(*v.integrity->suggested_exact == "It's easy to remain stagnant there.");
      CHECK(v.needs_human);
      CHECK(v.exact_phrase == "it is easy to remain stagnant there");
      CHECK(count_template(s, "p2_repair") == budget);
    }
  }

  TEST_CASE("phase 2 empty, malformed and duplicate responses") {
    const fixtures::Scenario& sc = fixtures::charlie();
    {
      Session s = fixtures::start(sc);
      Gateway gw(s.llm_config, overriding(sc, {{"p2_extract", constant("")}}));
      fixtures::run_until(s, gw, Phase::kExactKeyword);
      CHECK(s.code_log.verbatims.empty());
      CHECK(compute_coverage(s).coverage_ratio == 0.0);
    }
    {
      auto calls = std::make_shared<std::atomic<int>>(0);
      const std::string good = sc.extracts.at(1);
      Session s = fixtures::start(sc);
      Gateway gw(s.llm_config, overriding(sc, {{"p2_extract", [calls, good](std::string_view) {
                                                 return std::optional<std::string>(
                                                     (*calls)++ == 0 ? "Nothing but prose." : good);
                                               }}}));
      fixtures::run_until(s, gw, Phase::kExactKeyword);
      CHECK(s.code_log.verbatims.size() == 5);
      CHECK(calls->load() == 2);
    }
    {
      Session s = fixtures::start(sc);
      Gateway gw(s.llm_config, overriding(sc, {{"p2_extract", constant("Still prose.")}}));
      fixtures::run_until(s, gw, Phase::kFamiliarization);
      thematic::advance(s, to(Phase::kExactKeyword));
      const std::string before = serialize_session(s);
      CHECK(code_of([&] { run_current_phase(s, gw, kFacilitator); }) == ErrorCode::kParseError);
      CHECK(serialize_session(s) == before);
    }
    {
      Session s = fixtures::start(sc);
      Gateway gw(s.llm_config,
                 overriding(sc, {{"p2_extract", constant(sc.extracts.at(1) + "\n" + sc.extracts.at(1))}}));
      fixtures::run_until(s, gw, Phase::kExactKeyword);
      CHECK(s.code_log.verbatims.size() == 5);
    }
  }

  TEST_CASE("phase 3 maps verbatim codes to gerunds and families") {
    Session s = fixtures::start(fixtures::charlie());
    Gateway gw(s.llm_config, fixtures::mock_backend(fixtures::charlie()));
    fixtures::run_until(s, gw, Phase::kDescriptivePattern);
    REQUIRE(s.code_log.gerunds.size() == 5);
    const GerundCode& g2 = s.code_log.gerunds[1];
    CHECK(g2.label == "Valuing comfort in one's specialization");
    CHECK(s.code_log.find_verbatim(g2.source_verbatim_ids.at(0))->exact_phrase ==
          "When you specialize in a particular area, you're more comfortable there.");
    CHECK(s.code_log.find_family(*g2.family_id)->label == "Professional identity & expertise");
    CHECK(s.code_log.families.size() == 4);
    const CodeFamily* posting = s.code_log.family_by_label("Posting and allocation");
    CHECK(posting->member_gerund_ids == std::vector<std::string>{"G3", "G5"});
    for (const auto& g : s.code_log.gerunds) {
      CHECK(g.gerund_form);
      CHECK_FALSE(g.needs_human);
    }
  }

  TEST_CASE("phase 3 flags non-gerund labels and unmatched phrases") {
    const fixtures::Scenario& sc = fixtures::charlie();
    const std::string response =
        "1. Verbatim: \"The ones I teach are not really challenging.\"\n"
        "   Gerund: Professional challenges\n   Family: Engagement\n"
        "2. Verbatim: \"Something the teacher never said.\"\n"
        "   Gerund: Inventing quotes\n   Family: Engagement\n";
    Session s = fixtures::start(sc);
    Gateway gw(s.llm_config, overriding(sc, {{"p3_gerunds", constant(response)}}));
    fixtures::run_until(s, gw, Phase::kExactKeyword);
    thematic::advance(s, to(Phase::kDescriptivePattern));
    const Phase3Result r = run_phase3(s, gw, kFacilitator);
    REQUIRE(r.gerunds.size() == 1);
    CHECK_FALSE(r.gerunds[0].gerund_form);
    CHECK(r.gerunds[0].needs_human);
    CHECK(r.gerunds[0].label == "Professional challenges");
    REQUIRE(r.unmatched.size() == 1);
    CHECK(r.unmatched[0].verbatim_phrase == "Something the teacher never said.");
    CHECK(r.families.size() == 1);
  }

  TEST_CASE("phase 3 needs an active verbatim code") {
    const fixtures::Scenario& sc = fixtures::charlie();
    Session s = fixtures::start(sc);
    Gateway gw(s.llm_config, fixtures::mock_backend(sc));
    fixtures::run_until(s, gw, Phase::kExactKeyword);
    for (const auto& v : std::vector<VerbatimCode>(s.code_log.verbatims)) {
      apply_revision(s, ActionRequest{ActionKind::kDeletion, v.id, nullptr, "off topic",
                                      "Coder 3", false});
    }
    thematic::advance(s, to(Phase::kDescriptivePattern));
    CHECK(code_of([&] { run_current_phase(s, gw, kFacilitator); }) == ErrorCode::kNoActiveCodes);
  }

  TEST_CASE("phase 4 clusters families into dimensioned themes") {
    Session s = fixtures::start(fixtures::charlie());
    Gateway gw(s.llm_config, fixtures::mock_backend(fixtures::charlie()));
    fixtures::run_until(s, gw, Phase::kThemeDevelopment);
    REQUIRE(s.code_log.themes.size() == 2);
    const Theme& t1 = s.code_log.themes[0];
    const Theme& t2 = s.code_log.themes[1];
    CHECK(t1.label == "Misaligned professional placement");
    CHECK(t1.dimension == Dimension::kStructural);
    CHECK(t2.label == "Personal cost of misplacement");
    CHECK(t2.dimension == Dimension::kPersonal);
    CHECK(t1.status == CodeStatus::kAiProposed);
    CHECK(t1.family_ids.size() == 2);
    CHECK(t1.supporting_verbatim_ids == std::vector<std::string>{"V3", "V5", "V1"});
    CHECK(s.code_log.find_family("F3")->dimension == Dimension::kStructural);
  }

  TEST_CASE("phase 4 with a single family and with none") {
    const fixtures::Scenario& sc = fixtures::charlie();
    std::string one_family;
    for (const char* v : {"The ones I teach are not really challenging.",
                          "The posting process does not look at what we studied."}) {
      one_family += std::string("- Verbatim: \"") + v + "\"\n  Gerund: Noticing misfit\n"
                    "  Family: Misplacement\n";
    }
    {
      Session s = fixtures::start(sc);
      Gateway gw(s.llm_config,
                 overriding(sc, {{"p3_gerunds", constant(one_family)},
                                 {"p4_themes", constant("1. Theme: Misplacement as a system\n"
                                                        "   Families: Misplacement\n")}}));
      fixtures::run_until(s, gw, Phase::kThemeDevelopment);
      REQUIRE(s.code_log.themes.size() == 1);
      CHECK(s.code_log.themes[0].dimension == Dimension::kUnassigned);
      CHECK(s.code_log.themes[0].supporting_verbatim_ids == std::vector<std::string>{"V1", "V3"});
    }
    {
      Session s = fixtures::start(sc);
      Gateway gw(s.llm_config,
                 overriding(sc, {{"p3_gerunds", constant(
                                                    "1. Verbatim: \"The ones I teach are not "
                                                    "really challenging.\"\n   Gerund: Noticing\n")}}));
      fixtures::run_until(s, gw, Phase::kDescriptivePattern);
      CHECK(s.code_log.families.empty());
      thematic::advance(s, to(Phase::kThemeDevelopment));
      CHECK(code_of([&] { run_current_phase(s, gw, kFacilitator); }) == ErrorCode::kNoFamilies);
    }
  }

  TEST_CASE("phase 5 flags themes without resolvable evidence") {
    const fixtures::Scenario& sc = fixtures::charlie();
    Session s = fixtures::start(sc);
    Gateway gw(s.llm_config, overriding(sc, {{"p5_review", constant("Reviewed.")}}));
    fixtures::run_until(s, gw, Phase::kThemeDevelopment);
    apply_revision(s, ActionRequest{ActionKind::kInsertion, "",
                                    {{"type", "family"}, {"label", "Unquoted concern"}}, "new",
                                    "Coder 3", false});
    apply_revision(s, ActionRequest{ActionKind::kInsertion, "",
                                    {{"type", "theme"}, {"label", "Hunch"}, {"family_ids", {"F5"}}},
                                    "new", "Coder 3", false});
    thematic::advance(s, to(Phase::kThemeReview));
    const std::vector<Memo> memos = run_phase5(s, gw, kFacilitator);
    REQUIRE(memos.size() == 3);
    CHECK(memos[2].linked_refs.at(0).object_id == "T3");
    CHECK(memos[0].kind == MemoKind::kAnalytic);
    CHECK_FALSE(s.code_log.find_theme("T1")->evidence_gap);
    CHECK(s.code_log.find_theme("T3")->evidence_gap);
    const std::string block_prompt = [&] {
      for (const auto& e : s.interaction_log) {
        if (e.direction == Direction::kPrompt && e.payload.find("Label: Hunch") != std::string::npos) {
          return e.payload;
        }
      }
      return std::string();
    }();
    CHECK(block_prompt.find("- none") != std::string::npos);
  }

  TEST_CASE("phase 6 defines themes and renders the report") {
    Session s = fixtures::start(fixtures::charlie());
    Gateway gw(s.llm_config, fixtures::mock_backend(fixtures::charlie()));
    fixtures::run_until(s, gw, Phase::kDefineReport);
    CHECK(s.code_log.find_theme("T1")->definition == "Definition of Misaligned professional placement.");
    REQUIRE(s.integrity_report.has_value());
    REQUIRE(s.coverage_report.has_value());
    CHECK(s.integrity_report->summary.exact == 5);
    std::size_t last = 0;
    int number = 0;
    for (const auto& section : kReportSections) {
      const std::size_t at =
          s.report.find("## " + std::to_string(++number) + ". " + std::string(section) + "\n");
      REQUIRE(at != std::string::npos);
      CHECK(at > last);
      last = at;
    }
    thematic::advance(s, to(Phase::kComplete));
    CHECK(code_of([&] { run_current_phase(s, gw, kFacilitator); }) == ErrorCode::kWrongPhase);
    CHECK(code_of([&] { thematic::advance(s, to(Phase::kComplete)); }) ==
          ErrorCode::kPhaseOrderViolation);
  }

  TEST_CASE("reflexive prompts") {
    const fixtures::Scenario& sc = fixtures::charlie();
    const std::string question =
        "As a former teaching assistant, how might your own need for intellectual stimulation "
        "colour how you read Charlie's account?";
    Session s = fixtures::start(sc);
    Gateway gw(s.llm_config, overriding(sc, {{"reflexive", [question](std::string_view p) {
                                                if (p.find("former teaching assistant") ==
                                                    std::string_view::npos) {
                                                  return std::optional<std::string>();
                                                }
                                                return std::optional<std::string>(question);
                                              }}}));
    CHECK(code_of([&] { generate_reflexive_prompt(s, gw, "Coder 3", "x"); }) ==
          ErrorCode::kWrongPhase);
    thematic::advance(s, to(Phase::kFamiliarization));
    const Memo m = generate_reflexive_prompt(s, gw, "Coder 3", "former teaching assistant");
    CHECK(m.kind == MemoKind::kMethodological);
    CHECK(m.body == question);
    CHECK(m.body.find("intellectual stimulation") != std::string::npos);
    const std::size_t prompts = count_template(s, "reflexive");
    const Memo ask = generate_reflexive_prompt(s, gw, "Coder 3", "   ");
    CHECK(ask.body.find("positionality") != std::string::npos);
    CHECK(count_template(s, "reflexive") == static_cast<int>(prompts));
    const Memo answer = record_memo(s, "Coder 3", MemoKind::kReflexive,
                                    "I expected boredom to mean disengagement.", {{m.id, {}}});
    CHECK(answer.author == Origin::kHuman);
    CHECK(code_of([&] { record_memo(s, "Coder 3", MemoKind::kReflexive, " "); }) ==
          ErrorCode::kInvalidArgument);
    CHECK(code_of([&] {
            record_memo(s, "Coder 3", MemoKind::kAnalytic, "x", {{"V99", std::nullopt}});
          }) == ErrorCode::kTargetNotFound);
    expect_replay_equal(s);
  }

  TEST_CASE("replay reproduces fixture sessions field for field") {
    expect_replay_equal(fixtures::golden_session());
    for (int coder = 1; coder <= 3; ++coder) {
      const auto script = fixtures::coder_script(coder);
      Session s = fixtures::prepared_session(script);
      for (const auto& a : script.actions) apply_revision(s, a);
      // Relabelled themes have no scenario review fixture.
      Gateway gw(s.llm_config, overriding(*script.scenario, {{"p5_review", constant("Reviewed.")},
                                                             {"p6_define", constant("Defined.")}}));
      fixtures::run_until(s, gw, Phase::kDefineReport);
      CHECK(s.report.find("Defined.") != std::string::npos);
      expect_replay_equal(s);
    }
  }

  TEST_CASE("replay rejects damaged logs") {
    const Session s = fixtures::golden_session();
    const Session init = initial_state(s);
    auto gap = s.interaction_log;
    gap.erase(gap.begin() + 3);
    CHECK(code_of([&] { replay(gap, init); }) == ErrorCode::kLogCorruption);
    auto tampered = s.interaction_log;
    tampered[5].payload += " ";
    CHECK(code_of([&] { replay(tampered, init); }) == ErrorCode::kLogCorruption);
    auto rehashed = s.interaction_log;
    rehashed.back().timestamp = "2030-01-01T00:00:00Z";
    rehashed.back().hash = entry_hash(rehashed.back());
    CHECK_NOTHROW(verify_log_chain(rehashed));
    auto mid_exchange = s.interaction_log;
    mid_exchange.pop_back();
    CHECK(code_of([&] { replay(mid_exchange, init); }) == ErrorCode::kLogCorruption);
    std::size_t cut = s.interaction_log.size() - 1;
    while (s.interaction_log[cut].direction != Direction::kHumanAction) --cut;
    const std::vector<InteractionEntry> prefix(s.interaction_log.begin(),
                                               s.interaction_log.begin() + cut);
    const Session partial = replay(prefix, init);
    CHECK(partial.interaction_log == prefix);
    CHECK(partial.phase.current == Phase::kDefineReport);
    CHECK(code_of([] { parse_interaction_log("{not json\n"); }) == ErrorCode::kParseError);
  }

  TEST_CASE("replay of an empty log is the identity") {
    const Session s = fixtures::start(fixtures::focus_group());
    CHECK(serialize_session(replay({}, s)) == serialize_session(s));
    const Session init = initial_state(s);
    CHECK(serialize_session(replay(init.interaction_log, init)) == serialize_session(init));
  }

  TEST_CASE("trail export is hash chained") {
    const auto script = fixtures::coder_script(1);
    Session s = fixtures::prepared_session(script);
    for (const auto& a : script.actions) apply_revision(s, a);
    std::istringstream in(export_trail(s));
    std::string prev;
    int lines = 0;
    for (std::string line; std::getline(in, line); ++lines) {
      auto j = nlohmann::json::parse(line);
      CHECK(j["prev_hash"] == prev);
      const std::string hash = j["hash"];
      j.erase("hash");
      CHECK(text::sha256_hex(j.dump()) == hash);
      prev = hash;
    }
    CHECK(lines == static_cast<int>(s.trail.size()));
  }

  TEST_CASE("concurrent page runs match serial replay") {
    fixtures::Scenario sc = fixtures::focus_group();
    sc.transcript = many_paragraphs(35);
    auto backend = overriding(sc, {{"p1_segment", [](std::string_view p) {
                                      return std::optional<std::string>(
                                          "Page " + std::to_string(page_of_prompt(p)));
                                    }},
                                   {"p2_extract", [](std::string_view p) {
                                      const int page = page_of_prompt(p);
                                      return std::optional<std::string>(
                                          "1. Code: c\n   Passage: \"paragraph number " +
                                          std::to_string(page * 10 - 9) + ".\"\n");
                                    }}});
    Session a = fixtures::start(sc);
    Gateway gw(a.llm_config, backend);
    fixtures::run_until(a, gw, Phase::kExactKeyword);
    REQUIRE(a.code_log.verbatims.size() == 4);
    CHECK(a.code_log.verbatims[3].location.paragraph_start == 31);
    CHECK(a.code_log.verbatims[3].location.page == std::optional<int>(4));
    Session b = fixtures::start(sc);
    Gateway gw2(b.llm_config, backend);
    fixtures::run_until(b, gw2, Phase::kExactKeyword);
    CHECK(fingerprint(a) == fingerprint(b));
    expect_replay_equal(a);
  }

  TEST_CASE("consent gating and atomicity hold over random operation sequences") {
    const props::Result r = props::state_machine(150, 20261016);
    CHECK(r.instances == 150);
    CHECK_MESSAGE(r.ok(), r.first());
  }
}

}  // namespace
}  // namespace thematic
