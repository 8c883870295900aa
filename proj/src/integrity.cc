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

#include "thematic/integrity.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "thematic/error.h"
#include "thematic/text.h"

namespace thematic {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

std::u32string normalized_phrase(std::string_view phrase) {
  auto cps = text::collapse_whitespace(text::decode(text::to_nfc(phrase)));
  if (cps.empty()) fail(ErrorCode::kEmptyPhrase, "phrase is empty");
  return cps;
}

std::optional<std::size_t> find_in(const Paragraph& p, std::u32string_view needle) {
  const std::u32string hay = text::decode(p.text);
  const auto pos = hay.find(needle);
  if (pos == std::u32string::npos) return std::nullopt;
  return pos;
}

IntegrityVerdict exact_at(const Transcript& t, int paragraph, std::size_t pos, std::size_t len,
                          VerdictKind kind) {
  IntegrityVerdict v;
  v.kind = kind;
  v.matched_location = LocationRef::span(t.id, paragraph, pos, pos + len);
  v.matched_location->page.reset();
  return v;
}

struct Token {
  std::size_t start;
  std::size_t end;
};

std::vector<Token> tokens_of(std::u32string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && text::is_space(s[i])) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !text::is_space(s[j])) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

}  // namespace

IntegrityVerdict check_exact(std::string_view phrase, const Transcript& transcript,
                             const std::optional<LocationRef>& hint) {
  const std::u32string needle = normalized_phrase(phrase);
  if (hint) {
    const int first = std::max(1, hint->paragraph_start);
    const int last = std::min(transcript.paragraph_count(), hint->paragraph_end);
    for (int i = first; i <= last; ++i) {
      if (auto pos = find_in(transcript.paragraph(i), needle)) {
        return exact_at(transcript, i, *pos, needle.size(), VerdictKind::kExact);
      }
    }
  }
  for (const auto& p : transcript.paragraphs) {
    if (auto pos = find_in(p, needle)) {
      return exact_at(transcript, p.index, *pos, needle.size(),
                      hint ? VerdictKind::kLocationMismatch : VerdictKind::kExact);
    }
  }
  return IntegrityVerdict{VerdictKind::kNotFound, std::nullopt, std::nullopt, std::nullopt};
}

IntegrityVerdict detect_near_verbatim(std::string_view phrase, const Transcript& transcript,
                                      double near_threshold) {
  const std::u32string original = normalized_phrase(phrase);
  const std::u32string needle = text::fold_case(original);
  const std::size_t n = needle.size();
  const auto lo = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (1.0 - kWindowBand)));
  const auto hi = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 + kWindowBand)));

  struct Best {
    std::size_t distance = 0;
    std::size_t denom = 0;
    int paragraph = 0;
    std::size_t start = 0;
    std::size_t end = 0;
  };
  std::optional<Best> best;

  std::vector<std::size_t> prev(n + 1), col(n + 1);
  for (const auto& p : transcript.paragraphs) {
    const std::u32string hay_original = text::decode(p.text);
    const std::u32string hay = text::fold_case(hay_original);
    const auto tokens = tokens_of(hay);
    for (std::size_t ti = 0; ti < tokens.size(); ++ti) {
      const std::size_t s = tokens[ti].start;
      // Column-wise DP: after consuming L window characters, col[n] is the
      // distance between the phrase and hay[s, s+L).
      for (std::size_t k = 0; k <= n; ++k) col[k] = k;
      std::size_t tj = ti;
      for (std::size_t len = 1; s + len <= hay.size() && len <= hi; ++len) {
        std::swap(prev, col);
        col[0] = len;
        const char32_t w = hay[s + len - 1];
        for (std::size_t k = 1; k <= n; ++k) {
          col[k] = std::min({prev[k] + 1, col[k - 1] + 1, prev[k - 1] + (needle[k - 1] == w ? 0u : 1u)});
        }
        while (tj < tokens.size() && tokens[tj].end < s + len) ++tj;
        if (tj >= tokens.size() || tokens[tj].end != s + len || len < lo) continue;
        const std::size_t d = col[n];
        const std::size_t denom = std::max(n, len);
        if (!best || d * best->denom < best->distance * denom) {
          best = Best{d, denom, p.index, s, s + len};
        }
      }
    }
  }

  IntegrityVerdict v;
  v.kind = VerdictKind::kNotFound;
  if (!best) return v;
  const Paragraph& para = transcript.paragraph(best->paragraph);
  const std::u32string window =
      text::decode(para.text).substr(best->start, best->end - best->start);
  std::size_t distance = best->distance;
  if (distance == 0) {
    if (window == original) {
      return exact_at(transcript, best->paragraph, best->start, best->end - best->start,
                      VerdictKind::kExact);
    }
    // Differs only by case: report the case-sensitive distance so the
    // verdict stays distinguishable from an exact match.
    distance = levenshtein(original, window);
  }
  const double normalized = static_cast<double>(distance) / static_cast<double>(best->denom);
  if (normalized > near_threshold) return v;
  v.kind = VerdictKind::kNearVerbatim;
  v.matched_location = LocationRef::span(transcript.id, best->paragraph, best->start, best->end);
  v.normalized_distance = normalized;
  v.suggested_exact = text::encode(window);
  return v;
}

GerundCheck check_gerund(std::string_view label, const std::vector<std::string>& exceptions) {
  const std::u32string folded =
      text::fold_case(text::collapse_whitespace(text::decode(text::to_nfc(label))));
  if (folded.empty()) return {false, "label is empty"};
  const auto space = folded.find(U' ');
  const std::u32string first = folded.substr(0, space);
  for (const auto& e : exceptions) {
    const std::u32string key =
        text::fold_case(text::collapse_whitespace(text::decode(text::to_nfc(e))));
    if (key == first || key == folded) return {true, "listed exception"};
  }
  const std::string word = text::encode(first);
  if (first.size() < 5) {
    return {false, "first token '" + word + "' is shorter than 5 characters"};
  }
  if (first.compare(first.size() - 3, 3, U"ing") != 0) {
    return {false, "first token '" + word + "' does not end in 'ing'"};
  }
  return {true, ""};
}

const IntegrityVerdict* IntegrityReport::find(std::string_view code_id) const {
  for (const auto& [id, v] : per_code) {
    if (id == code_id) return &v;
  }
  return nullptr;
}

IntegrityVerdict verify_phrase(std::string_view phrase, const Transcript& transcript,
                               const std::optional<LocationRef>& hint, double near_threshold) {
  IntegrityVerdict v = check_exact(phrase, transcript, hint);
  if (v.kind == VerdictKind::kNotFound) v = detect_near_verbatim(phrase, transcript, near_threshold);
  return v;
}

IntegrityReport validate_session(CodeLog& log, const Transcript& transcript,
                                 double near_threshold) {
  std::vector<VerbatimCode*> codes;
  for (const VerbatimCode* c : log.active_verbatims()) {
    codes.push_back(log.find_verbatim(c->id));
  }
  std::vector<IntegrityVerdict> verdicts(codes.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      verdicts[i] = verify_phrase(codes[i]->exact_phrase, transcript,
                                  LocationRef::paragraphs(transcript.id,
                                                          codes[i]->location.paragraph_start,
                                                          codes[i]->location.paragraph_end),
                                  near_threshold);
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), codes.size() / 8 + 1);
  if (workers <= 1) {
    work(0, codes.size());
  } else {
    std::vector<std::future<void>> jobs;
    const std::size_t chunk = (codes.size() + workers - 1) / workers;
    for (std::size_t b = 0; b < codes.size(); b += chunk) {
      jobs.push_back(std::async(std::launch::async, work, b, std::min(codes.size(), b + chunk)));
    }
    for (auto& j : jobs) j.get();
  }

  IntegrityReport report;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    codes[i]->integrity = verdicts[i];
    report.per_code.emplace_back(codes[i]->id, verdicts[i]);
    switch (verdicts[i].kind) {
      case VerdictKind::kExact: ++report.summary.exact; break;
      case VerdictKind::kNearVerbatim: ++report.summary.near_verbatim; break;
      case VerdictKind::kNotFound: ++report.summary.not_found; break;
      case VerdictKind::kLocationMismatch: ++report.summary.location_mismatch; break;
    }
  }
  return report;
}

}  // namespace thematic
