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

#include "thematic/report.h"

#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "thematic/revision.h"
#include "thematic/serialize.h"
#include "thematic/store.h"
#include "thematic/workflow.h"

namespace thematic {
namespace {

using nlohmann::json;

std::string indent(const std::string& body, const std::string& prefix) {
  std::string out;
  std::istringstream in(body);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) out += "\n";
    out += line.empty() ? std::string() : prefix + line;
    first = false;
  }
  return out;
}

std::string label_of(const json& object) {
  if (object.contains("exact_phrase")) return "\"" + object["exact_phrase"].get<std::string>() + "\"";
  if (object.contains("label")) return object["label"].get<std::string>();
  if (object.contains("body")) return "\"" + object["body"].get<std::string>() + "\"";
  return object.value("id", "");
}

std::string value_text(const json& v) {
  if (v.is_string()) return "\"" + v.get<std::string>() + "\"";
  return v.dump();
}

std::string describe_action(const RevisionAction& a) {
  std::string out;
  switch (a.kind) {
    case ActionKind::kCommenting:
      out = "comment on " + a.target_id + ": " + label_of(a.after);
      break;
    case ActionKind::kInsertion:
      out = "inserted " + a.target_id + " " + label_of(a.after);
      break;
    case ActionKind::kModification: {
      std::string sep;
      for (const auto& [key, value] : a.after.items()) {
        if (key == "status" || !a.before.contains(key) || a.before[key] == value) continue;
        out += sep + key + ": " + value_text(a.before[key]) + " -> " + value_text(value);
        sep = "; ";
      }
      break;
    }
    case ActionKind::kDeletion:
    case ActionKind::kRejection:
      out = label_of(a.before);
      if (a.after.contains("replacement")) {
        out += " replaced by " + a.after["replacement"].value("id", "") + " " +
               label_of(a.after["replacement"]);
      }
      break;
  }
  return markdown_escape(out);
}

std::string ratio(double r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << r;
  return out.str();
}

}  // namespace

std::string render_report(const Session& s) {
  std::ostringstream out;
  const Transcript* t = s.transcript ? &*s.transcript : nullptr;
  const CodeLog& log = s.code_log;

  out << "# Thematic Analysis Report\n\n";
  out << "- Session: " << s.id << "\n";
  out << "- Research question: " << s.research_question << "\n";
  if (t != nullptr) {
    const std::size_t pages = segment_pages(*t, s.settings.page_size).size();
    out << "- Transcript: " << t->title << " (" << t->id << "), " << t->paragraph_count()
        << (t->paragraph_count() == 1 ? " paragraph" : " paragraphs") << " on " << pages
        << (pages == 1 ? " page\n" : " pages\n");
  }
  out << "- Coding mode: " << coding_mode_name(s.coding_mode) << "\n";
  out << "- Model: " << s.llm_config.model_id << ", temperature " << s.llm_config.temperature
      << "\n\n";

  // 1
  out << "## 1. " << kReportSections[0] << "\n\n";
  out << "### Narrative summary\n\n";
  bool any = false;
  for (const Memo& m : s.memos) {
    if (m.kind != MemoKind::kPhaseSummary) continue;
    out << m.body << "\n\n";
    any = true;
  }
  if (!any) out << "None recorded.\n\n";
  out << "### Segmented summaries\n\n";
  any = false;
  for (const Memo& m : s.memos) {
    if (m.kind != MemoKind::kSegmentedSummary) continue;
    out << "#### ";
    if (!m.linked_refs.empty() && m.linked_refs[0].location) {
      const LocationRef& loc = *m.linked_refs[0].location;
      out << "Page " << loc.page.value_or(0) << " (paragraphs " << loc.paragraph_start << "-"
          << loc.paragraph_end << ")";
    } else {
      out << m.id;
    }
    out << "\n\n" << m.body << "\n\n";
    any = true;
  }
  if (!any) out << "None recorded.\n\n";
  out << "### Analytic, reflexive and methodological memos\n\n";
  any = false;
  for (const Memo& m : s.memos) {
    if (m.kind == MemoKind::kPhaseSummary || m.kind == MemoKind::kSegmentedSummary) continue;
    out << "- " << m.id << " [" << memo_kind_name(m.kind) << ", " << phase_name(m.phase) << ", "
        << origin_name(m.author) << "]";
    if (!m.linked_refs.empty()) {
      out << " on";
      for (const auto& r : m.linked_refs) out << " " << r.object_id;
    }
    out << ":\n" << indent(m.body, "  ") << "\n";
    any = true;
  }
  if (!any) out << "None recorded.\n";
  out << "\n";

  // 2
  out << "## 2. " << kReportSections[1] << "\n\n";
  const CodeLogTable table = render_code_log(log, t, s.settings.page_size);
  out << table_to_markdown(table) << "\n";
  any = false;
  for (const VerbatimCode* c : log.active_verbatims()) {
    if (!c->needs_human) continue;
    if (!any) out << "Flagged for human review:\n\n";
    out << "- " << c->id << " \"" << c->exact_phrase << "\" ("
        << (c->integrity ? verdict_name(c->integrity->kind) : "unchecked") << ")";
    if (c->integrity && c->integrity->suggested_exact) {
      out << ", suggested exact wording \"" << *c->integrity->suggested_exact << "\"";
    }
    out << "\n";
    any = true;
  }
  if (any) out << "\n";

  // 3
  out << "## 3. " << kReportSections[2] << "\n\n";
  out << "| Verbatim Expression | Descriptive (Gerund-Based) Code | Code Family |\n";
  out << "|---|---|---|\n";
  for (const GerundCode& g : log.gerunds) {
    if (!is_active(g.status)) continue;
    std::string sources;
    for (const auto& vid : g.source_verbatim_ids) {
      if (const VerbatimCode* v = log.find_verbatim(vid)) {
        sources += (sources.empty() ? "" : " / ") + v->exact_phrase;
      }
    }
    std::string family;
    if (g.family_id) {
      if (const CodeFamily* f = log.find_family(*g.family_id)) family = f->label;
    }
    std::string label = g.label;
    if (!g.gerund_form) label += " (not gerund-form)";
    out << "| " << markdown_escape(sources) << " | " << markdown_escape(label) << " | "
        << markdown_escape(family) << " |\n";
  }
  out << "\n### Code families\n\n";
  any = false;
  for (const CodeFamily& f : log.families) {
    if (!is_active(f.status)) continue;
    out << "- " << f.id << " " << f.label << " [" << dimension_name(f.dimension) << "]:";
    std::string sep = " ";
    for (const auto& gid : f.member_gerund_ids) {
      if (const GerundCode* g = log.find_gerund(gid)) {
        out << sep << g->label;
        sep = "; ";
      }
    }
    out << "\n";
    any = true;
  }
  if (!any) out << "None.\n";
  out << "\n";

  // 4
  out << "## 4. " << kReportSections[3] << "\n\n";
  any = false;
  for (const Theme& th : log.themes) {
    if (!is_active(th.status)) continue;
    any = true;
    out << "### " << th.id << " " << th.label << "\n\n";
    out << "- Dimension: " << dimension_name(th.dimension) << "\n";
    out << "- Status: " << status_name(th.status) << "\n";
    out << "- Families:";
    std::string sep = " ";
    for (const auto& fid : th.family_ids) {
      if (const CodeFamily* f = log.find_family(fid)) {
        out << sep << f->label;
        sep = "; ";
      }
    }
    out << "\n- Definition: " << (th.definition.empty() ? "(none)" : th.definition) << "\n";
    out << "- Supporting evidence:\n";
    for (const auto& vid : th.supporting_verbatim_ids) {
      const VerbatimCode* v = log.find_verbatim(vid);
      if (v == nullptr || !is_active(v->status)) continue;
      out << "  - \"" << v->exact_phrase << "\"";
      if (t != nullptr) out << " (" << trace_reference(*t, v->location, s.settings.page_size) << ")";
      out << "\n";
    }
    if (th.evidence_gap) out << "- Evidence gap: no resolvable supporting quotes\n";
    out << "\n";
  }
  if (!any) out << "None.\n\n";

  // 5
  out << "## 5. " << kReportSections[4] << "\n\n";
  out << "### Coverage\n\n";
  if (s.coverage_report) {
    const CoverageReport& c = *s.coverage_report;
    out << "- Paragraphs covered: " << c.covered_count << " of " << c.total_paragraphs << "\n";
    out << "- Coverage ratio: " << ratio(c.coverage_ratio) << "\n";
    out << "- Uncoded paragraphs:";
    if (c.uncoded.empty()) {
      out << " none";
    } else {
      std::string sep = " ";
      for (int p : c.uncoded) {
        out << sep << p;
        sep = ", ";
      }
    }
    out << "\n\n";
  } else {
    out << "Not audited.\n\n";
  }
  out << "### Integrity\n\n";
  if (s.integrity_report) {
    const IntegritySummary& sum = s.integrity_report->summary;
    out << "| Verdict | Codes |\n|---|---|\n";
    out << "| Exact | " << sum.exact << " |\n";
    out << "| NearVerbatim | " << sum.near_verbatim << " |\n";
    out << "| NotFound | " << sum.not_found << " |\n";
    out << "| LocationMismatch | " << sum.location_mismatch << " |\n\n";
  } else {
    out << "Not validated.\n\n";
  }

  // 6
  out << "## 6. " << kReportSections[5] << "\n\n";
  out << "### Action summary\n\n";
  if (s.trail.empty()) {
    out << "No revision actions recorded.\n\n";
  } else {
    out << summary_markdown(summarize(s.trail)) << "\n";
  }
  out << "### Revision actions\n\n";
  if (s.trail.empty()) out << "None.\n";
  for (const RevisionAction& a : s.trail) {
    out << a.sequence << ". " << a.id << " " << action_kind_name(a.kind) << " " << a.target_id
        << " by " << a.actor_id << " in " << phase_name(a.phase) << ": " << describe_action(a);
    if (!a.rationale.empty()) out << " (rationale: " << markdown_escape(a.rationale) << ")";
    out << "\n";
  }
  out << "\n### Interaction log\n\n";
  std::map<Direction, int> counts;
  for (const auto& e : s.interaction_log) ++counts[e.direction];
  out << "- Entries: " << s.interaction_log.size() << " (" << counts[Direction::kPrompt]
      << " prompts, " << counts[Direction::kResponse] << " responses, "
      << counts[Direction::kHumanAction] << " human actions)\n";
  if (!s.interaction_log.empty()) {
    out << "- Chain head: " << s.interaction_log.back().hash << "\n";
  }
  return out.str();
}

}  // namespace thematic
