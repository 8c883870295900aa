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

#include "fixtures.h"

#include <regex>
#include <utility>

#include "thematic/error.h"
#include "thematic/integrity.h"
#include "thematic/serialize.h"

namespace thematic::fixtures {

namespace {

#define EM_DASH "\xE2\x80\x94"

Scenario make_focus_group() {
  Scenario s;
  s.name = "focus_group";
  s.question =
      "How do student-teachers experience course delivery and assessment in their "
      "teacher education programme?";
  s.title = "FGD";
  s.transcript =
      "Student-Teacher 1: Yes. Action Research. It didn't go far " EM_DASH
      " time was a big issue.\n\n"
      "Student-Teacher 2: Science 3 also wasn't okay. The lecturer insisted we buy his "
      "handout. If you didn't purchase it, you risked failing. Teaching itself wasn't "
      "emphasized.\n\n"
      "Student-Teacher 3: Yes, in Music. The lecturer made us do activities but then "
      "criticized us, saying we hadn't done anything. That discouraged us. Many of us lost "
      "motivation.\n\n"
      "Student-Teacher 4: Introduction to English II wasn't good either. The lecturer wasn't "
      "grounded in the content. He would come, give quizzes, but when teaching, he didn't "
      "explain well. We didn't get the content.\n";
  s.narrative =
      "The group moves from course to course, and each turn adds a complaint about how "
      "teaching was delivered. Time ran out before Action Research was finished, a handout "
      "had to be bought to avoid failing, criticism after class activities left students "
      "discouraged, and an English lecturer tested more than he taught. The undercurrent "
      "is frustration and a sense of being let down by lecturers.";
  s.segments[1] =
      "Paragraph 1: Action Research was cut short for lack of time.\n"
      "Note: coverage suffers when the timetable is tight.\n\n"
      "Paragraph 2: Buying the lecturer's handout felt like a condition for passing.\n"
      "Note: assessment and money are entangled.\n\n"
      "Paragraph 3: Criticism after activities drained motivation.\n"
      "Note: feedback shapes morale.\n\n"
      "Paragraph 4: Quizzes replaced explanation in English II.\n"
      "Note: weak grounding in content.";
  s.extracts[1] =
      "1. Code: Incomplete course delivery\n"
      "   Passage: \"It didn't go far " EM_DASH " time was a big issue.\"\n"
      "   Page: 1\n"
      "   Rationale: Course coverage cut short by timetable pressure.\n\n"
      "2. **Code:** Coercive handout sales\n"
      "   **Passage:** \"The lecturer insisted we buy his handout. If you didn't purchase it, "
      "you risked failing.\"\n"
      "   **Page:** 1\n"
      "   **Rationale:** Reveals coercive assessment and economic pressure; signals ethical "
      "concern.\n\n"
      "3. Code: Discouraging feedback\n"
      "   Passage: \"That discouraged us and many of us lost motivation.\"\n"
      "   Page: 1\n"
      "   Rationale: Negative feedback that drains motivation.\n";
  s.repair =
      "1. Code: Discouraging feedback\n"
      "   Passage: \"That discouraged us. Many of us lost motivation.\"\n"
      "   Page: 1\n"
      "   Rationale: Negative feedback that drains motivation.\n";
  s.gerunds =
      "1. Verbatim: \"It didn't go far " EM_DASH " time was a big issue.\"\n"
      "   Gerund: Experiencing incomplete course delivery\n"
      "   Family: Curriculum delivery constraints\n\n"
      "2. Verbatim: \"The lecturer insisted we buy his handout. If you didn't purchase it, you "
      "risked failing.\"\n"
      "   Gerund: Experiencing coercive assessment\n"
      "   Family: Unprofessional lecturer conduct\n\n"
      "3. Verbatim: \"That discouraged us. Many of us lost motivation.\"\n"
      "   Gerund: Losing motivation after criticism\n"
      "   Family: Emotional impact of feedback\n\n"
      "4. Verbatim: \"The lecturer wasn't grounded in the content. He would come, give quizzes, "
      "but when teaching, he didn't explain well.\"\n"
      "   Gerund: Receiving superficial instruction\n"
      "   Family: Unprofessional lecturer conduct\n";
  s.themes =
      "1. Theme: Institutional shortfalls in teacher preparation\n"
      "   Families: Curriculum delivery constraints; Unprofessional lecturer conduct\n"
      "   Dimension: structural\n\n"
      "2. Theme: Emotional cost of lecturer practices\n"
      "   Families: Emotional impact of feedback\n"
      "   Dimension: personal\n";
  s.reviews["Institutional shortfalls in teacher preparation"] =
      "Supported by three quotes across two courses. The handout quote could stand as its own "
      "theme if more groups raise it.";
  s.reviews["Emotional cost of lecturer practices"] =
      "Rests on a single quote; thin but vivid. Keep it and look for corroboration.";
  s.definitions["Institutional shortfalls in teacher preparation"] =
      "Ways in which course organisation and lecturer conduct fall short of what teacher "
      "preparation requires, from truncated courses to coercive handout sales and "
      "assessment without teaching.";
  s.definitions["Emotional cost of lecturer practices"] =
      "The discouragement and loss of motivation student-teachers report after harsh or "
      "dismissive treatment by lecturers.";
  s.reflexive =
      "How might your own years of tutoring in a college shape which lecturer behaviours you "
      "read as unprofessional?";
  return s;
}

Scenario make_lecturer() {
  Scenario s;
  s.name = "lecturer";
  s.question = "How do teachers experience teaching outside their area of training?";
  s.title = "Lecturer interview";
  s.transcript =
      "Interviewer: How did you come to teach mathematics at the basic level?\n\n"
      "Teacher: I was trained for science, but there were no maths teachers. I used the "
      "knowledge and experience I had to teach it. That takes extra time and effort.\n\n"
      "Teacher: The shortage is everywhere. Many schools do not have specialists in "
      "mathematics pedagogy, so subject teachers fill the gap.\n\n"
      "Teacher: Those without the training can still help. They should be offered in-service "
      "training.\n\n"
      "Teacher: Subject experts can also struggle at the basic level. They might teach beyond "
      "the students' level.\n\n"
      "Teacher: The students I teach here challenge me to prepare thoroughly. They ask "
      "questions that keep me reading.\n\n"
      "Teacher: In the colleges of education, the work is routine. It's easy to remain "
      "stagnant there.\n\n"
      "Teacher: Even your publications might not be accepted as standard academic articles. "
      "There's a gap in understanding what counts as publishable work.\n";
  s.narrative =
      "A science-trained teacher describes covering mathematics because no specialist was "
      "available, the effort this takes, and a wider shortage of pedagogical specialists. "
      "Students who ask hard questions are a source of growth, while the colleges are "
      "described as places where careers stall and publications go unrecognised.";
  s.segments[1] =
      "Paragraphs 2-4: improvising outside one's training, and the staffing gap behind it.\n"
      "Paragraphs 5-6: mismatch between expertise and level; students as a driver of growth.\n"
      "Paragraphs 7-8: stagnation and unrecognised research in the colleges.";
  s.extracts[1] =
      "| Code | Exact sentence | Page | Rationale |\n"
      "|---|---|---|---|\n"
      "| Improvising from experience | \"I used the knowledge and experience I had to teach "
      "it.\" | Page 1 | Describes improvising from personal experience. |\n"
      "| Extra effort | \"That takes extra time and effort.\" | Page 1 | Notes the added time "
      "demands of teaching outside one's training. |\n"
      "| Specialist shortage | \"Many schools do not have specialists in mathematics "
      "pedagogy\" | Page 1 | Indicates a structural issue in the education sector. |\n"
      "| In-service training | \"They should be offered in-service training.\" | Page 1 | "
      "Proposes training as a fix for underqualified staff. |\n"
      "| Level mismatch | \"They might teach beyond the students' level.\" | Page 1 | Flags "
      "a risk of pitching lessons too high. |\n"
      "| Student challenge | \"The students I teach here challenge me to prepare "
      "thoroughly.\" | Page 1 | Student quality shapes teacher development. |\n"
      "| College stagnation | \"In the colleges of education, the work is routine. It's easy "
      "to remain stagnant there.\" | Page 1 | The college system may limit progression. |\n"
      "| Publication standards | \"Even your publications might not be accepted as standard "
      "academic articles.\" | Page 1 | Validation of knowledge depends on the institution. "
      "|\n"
      "| Publishable work | \"There's a gap in understanding what counts as publishable "
      "work.\" | Page 1 | Highlights epistemological disconnects within the system. |\n";
  s.gerunds =
      "| Verbatim Expression | Descriptive (Gerund-Based) Code | Code Family |\n"
      "|---|---|---|\n"
      "| \"I used the knowledge and experience I had to teach it.\" | Improvising from lived "
      "experience | Adaptive professional practice |\n"
      "| \"That takes extra time and effort.\" | Investing additional time | Workload and "
      "strain |\n"
      "| \"Many schools do not have specialists in mathematics pedagogy\" | Lacking "
      "pedagogical specialists | Staffing shortages |\n"
      "| \"They should be offered in-service training.\" | Proposing in-service training | "
      "Staffing shortages |\n"
      "| \"They might teach beyond the students' level.\" | Teaching beyond level | "
      "Pedagogical mismatch |\n"
      "| \"The students I teach here challenge me to prepare thoroughly.\" | Being challenged "
      "by students | Professional growth |\n"
      "| \"In the colleges of education, the work is routine. It's easy to remain stagnant "
      "there.\" | Remaining stagnant in colleges | Institutional constraints on growth |\n"
      "| \"Even your publications might not be accepted as standard academic articles.\" | "
      "Facing publication barriers | Institutional constraints on growth |\n"
      "| \"There's a gap in understanding what counts as publishable work.\" | Questioning "
      "what counts as publishable | Epistemic hierarchies |\n";
  s.themes =
      "1. Theme: Systemic gaps in teacher supply\n"
      "   Families: Staffing shortages; Pedagogical mismatch\n"
      "   Dimension: structural\n\n"
      "2. Theme: Institutional limits on academic growth\n"
      "   Families: Institutional constraints on growth; Epistemic hierarchies\n"
      "   Dimension: structural\n\n"
      "3. Theme: Adapting under professional strain\n"
      "   Families: Adaptive professional practice; Workload and strain; Professional growth\n"
      "   Dimension: personal\n";
  for (const char* label : {"Systemic gaps in teacher supply",
                            "Institutional limits on academic growth",
                            "Adapting under professional strain"}) {
    s.reviews[label] = "Quotes support the theme; consider merging overlapping families.";
    s.definitions[label] = std::string("Definition of ") + label + ".";
  }
  s.reflexive = "How does your own teaching history colour what you call stimulating work?";
  return s;
}

Scenario make_charlie() {
  Scenario s;
  s.name = "charlie";
  s.question = "How do teachers experience postings that do not match their specialism?";
  s.title = "Charlie interview";
  s.transcript =
      "Interviewer: How do you find teaching at this school?\n\n"
      "Charlie: I trained as a mathematics specialist, but I was posted to teach general "
      "subjects in the lower grades. The ones I teach are not really challenging.\n\n"
      "Charlie: When you specialize in a particular area, you're more comfortable there. I "
      "would rather teach mathematics at the senior level.\n\n"
      "Charlie: Many of us were posted outside our areas. The posting process does not look "
      "at what we studied.\n\n"
      "Charlie: Because it is not my area, I spend my evenings reading ahead before every "
      "lesson.\n\n"
      "Charlie: The service should match teachers to their subjects, starting with the "
      "district offices and then the schools.\n";
  s.narrative =
      "Charlie, a mathematics specialist, teaches general subjects to younger pupils. He "
      "finds the work unstimulating, prefers his specialism, blames the posting process, "
      "and prepares at length for lessons outside his field. He ends with a proposal for "
      "matching teachers to subjects.";
  s.segments[1] = "Paragraphs 2-6: misplacement, preference, allocation, workload, reform.";
  s.extracts[1] =
      "1. Code: Lack of challenge\n"
      "   Passage: \"The ones I teach are not really challenging.\"\n"
      "   Page: 1\n"
      "   Rationale: The posting leaves the teacher under-stimulated.\n\n"
      "2. Code: Comfort in specialism\n"
      "   Passage: \"When you specialize in a particular area, you're more comfortable "
      "there.\"\n"
      "   Page: 1\n"
      "   Rationale: Expertise anchors professional comfort.\n\n"
      "3. Code: Blind allocation\n"
      "   Passage: \"The posting process does not look at what we studied.\"\n"
      "   Page: 1\n"
      "   Rationale: Allocation ignores training.\n\n"
      "4. Code: Extra preparation\n"
      "   Passage: \"I spend my evenings reading ahead before every lesson.\"\n"
      "   Page: 1\n"
      "   Rationale: Teaching outside one's field adds preparation.\n\n"
      "5. Code: Reform proposal\n"
      "   Passage: \"The service should match teachers to their subjects\"\n"
      "   Page: 1\n"
      "   Rationale: Suggests a top-down fix.\n";
  s.gerunds =
      "1. Verbatim: \"The ones I teach are not really challenging.\"\n"
      "   Gerund: Experiencing lack of stimulation\n"
      "   Family: Professional (dis)engagement\n\n"
      "2. Verbatim: \"When you specialize in a particular area, you're more comfortable "
      "there.\"\n"
      "   Gerund: Valuing comfort in one's specialization\n"
      "   Family: Professional identity & expertise\n\n"
      "3. Verbatim: \"The posting process does not look at what we studied.\"\n"
      "   Gerund: Observing systemic misallocation\n"
      "   Family: Posting and allocation\n\n"
      "4. Verbatim: \"I spend my evenings reading ahead before every lesson.\"\n"
      "   Gerund: Undertaking extra preparatory labour\n"
      "   Family: Workload demands\n\n"
      "5. Verbatim: \"The service should match teachers to their subjects\"\n"
      "   Gerund: Suggesting practical, hierarchical reform\n"
      "   Family: Posting and allocation\n";
  s.themes =
      "1. Theme: Misaligned professional placement\n"
      "   Families: Posting and allocation; Professional (dis)engagement\n"
      "   Dimension: structural\n\n"
      "2. Theme: Personal cost of misplacement\n"
      "   Families: Professional identity & expertise; Workload demands\n"
      "   Dimension: personal\n";
  for (const char* label : {"Misaligned professional placement", "Personal cost of misplacement"}) {
    s.reviews[label] = "Supported; the allocation quote carries most of the weight.";
    s.definitions[label] = std::string("Definition of ") + label + ".";
  }
  s.reflexive = "What do you assume about teachers who ask for different postings?";
  return s;
}

std::optional<int> page_in(std::string_view prompt, const char* pattern) {
  const std::regex re(pattern);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(prompt.begin(), prompt.end(), m, re)) return std::nullopt;
  return std::stoi(m[1].str());
}

std::optional<std::string> by_label(std::string_view prompt,
                                    const std::map<std::string, std::string>& table) {
  const std::regex re(R"(Label: ([^\n]*))");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(prompt.begin(), prompt.end(), m, re)) return std::nullopt;
  auto it = table.find(m[1].str());
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> nonempty(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

ActionRequest request(ActionKind kind, std::string target, nlohmann::json after,
                      std::string rationale, const std::string& actor) {
  ActionRequest r;
  r.kind = kind;
  r.target_id = std::move(target);
  r.after = std::move(after);
  r.rationale = std::move(rationale);
  r.actor_id = actor;
  return r;
}

CoderScript coder1() {
  const std::string a = "Coder 1";
  using K = ActionKind;
  using nlohmann::json;
  CoderScript c{a, &focus_group(), {10, 1, 1, 3, 15}, {}};
  c.actions = {
      request(K::kCommenting, "M1", "Keep this summary; it gives a way into the whole data set.",
              "", a),
      request(K::kCommenting, "V1", "Only the second clause carries the code.", "", a),
      request(K::kModification, "V1", {{"exact_phrase", "time was a big issue."}},
              "Shorter keyword keeps the code focused.", a),
      request(K::kCommenting, "V2",
              "Long for a code, though it points me to the right gerund; it spans two "
              "sentences.",
              "", a),
      request(K::kInsertion, "",
              {{"type", "gerund"},
               {"label", "Buy lecturer's handout or fail the course"},
               {"source_verbatim_ids", {"V2"}},
               {"family_id", "F2"}},
              "Simpler wording for the same code.", a),
      request(K::kCommenting, "V2", "Agree there is an ethical issue, but I would name it as unprofessional.",
              "", a),
      request(K::kModification, "V2",
              {{"rationale",
                "Coercive handout sales: Reveals coercive assessment and economic pressure; "
                "unprofessional."}},
              "More precise descriptor.", a),
      request(K::kCommenting, "V3", "I agree with this.", "", a),
      request(K::kCommenting, "V3", "Could be pressure from the students' side as well.", "", a),
      request(K::kModification, "V3", {{"exact_phrase", "Many of us lost motivation."}},
              "This sentence alone is the keyword.", a),
      request(K::kDeletion, "G3",
              {{"type", "gerund"},
               {"label", "Losing motivation under public criticism"},
               {"source_verbatim_ids", {"V3"}}},
              "The AI code lost the context of public criticism.", a),
      request(K::kCommenting, "G1", "Fine as a descriptive code.", "", a),
      request(K::kCommenting, "F2", "This family name fits local usage.", "", a),
      request(K::kCommenting, "T1", "The structural reading matches my experience.", "", a),
      request(K::kCommenting, "T2", "Worth keeping even with one quote.", "", a),
  };
  return c;
}

CoderScript coder2() {
  const std::string a = "Coder 2";
  using K = ActionKind;
  using nlohmann::json;
  CoderScript c{a, &lecturer(), {0, 4, 1, 10, 15}, {}};
  auto rationale = [&](const char* id, const char* text) {
    return request(K::kModification, id, {{"rationale", text}}, "revised to", a);
  };
  c.actions = {
      rationale("V2", "Extra effort: names the emotional labor and professional strain of "
                      "teaching outside one's training."),
      rationale("V1", "Improvising from experience: improvisation as adaptive professionalism."),
      rationale("V3", "Specialist shortage: a bottleneck in how teachers are prepared."),
      rationale("V6", "Student challenge: curious students push the teacher to read; "
                      "learning runs both ways."),
      request(K::kModification, "V7", {{"exact_phrase", "It's easy to remain stagnant there."}},
              "revised exact wording", a),
      rationale("V7", "College stagnation: the college system constrains professional "
                      "development."),
      rationale("V9", "Publishable work: a disjuncture between what colleges and universities "
                      "count as knowledge."),
      rationale("V4", "In-service training: a stopgap response to underprepared staff."),
      rationale("V8", "Publication standards: hierarchies that discount knowledge produced in "
                      "the colleges."),
      rationale("V5", "Level mismatch: curriculum and delivery out of step, risking overload."),
      request(K::kInsertion, "",
              {{"type", "gerund"},
               {"label", "Recognizing systemic gaps in teacher preparation"},
               {"source_verbatim_ids", {"V3"}},
               {"family_id", "F3"}},
              "The AI codes miss the systemic concern.", a),
      request(K::kInsertion, "",
              {{"type", "verbatim"},
               {"exact_phrase", "They ask questions that keep me reading."},
               {"rationale", "Grounds the reciprocal learning reading."}},
              "Quote added for the audit trail.", a),
      request(K::kInsertion, "",
              {{"type", "verbatim"},
               {"exact_phrase", "I was trained for science, but there were no maths teachers."},
               {"location", LocationRef::paragraphs("", 2, 2)},
               {"rationale", "Grounds the staffing shortage."}},
              "Quote added for the audit trail.", a),
      request(K::kInsertion, "",
              {{"type", "verbatim"},
               {"exact_phrase", "so subject teachers fill the gap."},
               {"rationale", "Grounds the compensatory staffing."}},
              "Quote added for the audit trail.", a),
      request(K::kDeletion, "G7",
              {{"type", "gerund"},
               {"label", "Stagnating within college structures"},
               {"source_verbatim_ids", {"V7"}}},
              "Stagnation is imposed by the system, not chosen.", a),
  };
  return c;
}

CoderScript coder3() {
  const std::string a = "Coder 3";
  using K = ActionKind;
  using nlohmann::json;
  CoderScript c{a, &charlie(), {2, 0, 1, 5, 8}, {}};
  auto relabel = [&](const char* id, const char* label) {
    return request(K::kModification, id, {{"label", label}}, "revised to", a);
  };
  c.actions = {
      request(K::kRejection, "F1", {{"type", "family"}, {"label", "Professional challenges"}},
              "He is still doing the job; the issue is a challenge, not withdrawal.", a),
      request(K::kCommenting, "F5",
              "Disengagement would mean he has stopped discharging his duties, which is not "
              "the case.",
              "", a),
      relabel("G2", "Insisting on preferred area of specialization"),
      relabel("G3", "Ensuing outcomes of the current allocation process"),
      relabel("G4", "Additional workload and professional strain"),
      relabel("G5", "Suggesting practical reform"),
      request(K::kCommenting, "V5", "Applies across subjects, not only mathematics.", "", a),
      relabel("T1", "Misallocated professional placement"),
  };
  return c;
}

}  // namespace

const Scenario& focus_group() {
  static const Scenario s = make_focus_group();
  return s;
}

const Scenario& lecturer() {
  static const Scenario s = make_lecturer();
  return s;
}

const Scenario& charlie() {
  static const Scenario s = make_charlie();
  return s;
}

std::vector<std::string> focus_group_phrases() {
  return {
      "It didn't go far " EM_DASH " time was a big issue.",
      "The lecturer insisted we buy his handout. If you didn't purchase it, you risked failing.",
      "That discouraged us. Many of us lost motivation.",
      "The lecturer wasn't grounded in the content. He would come, give quizzes, but when "
      "teaching, he didn't explain well.",
  };
}

MockBackend::Responder responder(const Scenario& scenario) {
  const Scenario* s = &scenario;
  return [s](std::string_view template_id, std::string_view prompt) -> std::optional<std::string> {
    if (template_id == "p1_narrative") return nonempty(s->narrative);
    if (template_id == "p1_segment" || template_id == "p2_extract") {
      const auto page = page_in(prompt, R"(for Page (\d+):\s*$)");
      if (!page) return std::nullopt;
      const auto& table = template_id == "p1_segment" ? s->segments : s->extracts;
      auto it = table.find(*page);
      if (it == table.end()) return std::nullopt;
      return it->second;
    }
    if (template_id == "p2_repair") return nonempty(s->repair);
    if (template_id == "p3_gerunds") return nonempty(s->gerunds);
    if (template_id == "p4_themes") return nonempty(s->themes);
    if (template_id == "p5_review") return by_label(prompt, s->reviews);
    if (template_id == "p6_define") return by_label(prompt, s->definitions);
    if (template_id == "reflexive") return nonempty(s->reflexive);
    return std::nullopt;
  };
}

std::shared_ptr<MockBackend> mock_backend(const Scenario& scenario) {
  return std::make_shared<MockBackend>(responder(scenario));
}

Session start(const Scenario& scenario, SessionSettings settings) {
  Session s = create_session(scenario.question, scenario.mode, LlmConfig{}, std::move(settings),
                             logical_clock());
  ingest_transcript(s, kFacilitator, scenario.transcript, scenario.title);
  return s;
}

void run_until(Session& s, Gateway& gw, Phase last, const std::string& actor) {
  while (s.phase.current < last) {
    thematic::advance(s, Approval{actor, *next_phase(s.phase.current)});
    run_current_phase(s, gw, actor);
  }
}

ActionRequest focus_group_gap_code(const std::string& actor) {
  return request(ActionKind::kInsertion, "",
                 {{"type", "verbatim"},
                  {"exact_phrase", focus_group_phrases()[3]},
                  {"rationale", "Weak grounding in content and superficial delivery."}},
                 "Paragraph left uncoded by extraction.", actor);
}

CoderScript coder_script(int coder) {
  switch (coder) {
    case 1:
      return coder1();
    case 2:
      return coder2();
    case 3:
      return coder3();
    default:
      fail(ErrorCode::kInvalidArgument, "coder must be 1, 2 or 3");
  }
}

Session prepared_session(const CoderScript& script) {
  Session s = start(*script.scenario);
  Gateway gw(s.llm_config, mock_backend(*script.scenario));
  run_until(s, gw, Phase::kThemeDevelopment);
  return s;
}

Session golden_session(const std::shared_ptr<ChatBackend>& backend) {
  const Scenario& sc = focus_group();
  Session s = start(sc);
  Gateway gw(s.llm_config, backend ? backend : mock_backend(sc));
  run_until(s, gw, Phase::kFamiliarization);
  generate_reflexive_prompt(s, gw, "Coder 1", "Tutor in a college of education for ten years.");
  run_until(s, gw, Phase::kExactKeyword);
  apply_revision(s, focus_group_gap_code("Coder 1"));
  audit_session(s, "Coder 1");
  run_until(s, gw, Phase::kDefineReport);
  return s;
}

std::string source_dir() { return THEMATIC_SOURCE_DIR; }

std::string golden_report_path() { return source_dir() + "/tests/golden/focus_group_report.md"; }

}  // namespace thematic::fixtures
