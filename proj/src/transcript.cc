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

#include "thematic/transcript.h"

#include <algorithm>
#include <regex>

#include "thematic/error.h"
#include "thematic/text.h"

namespace thematic {

LocationRef LocationRef::paragraphs(std::string transcript_id, int first, int last) {
  LocationRef loc;
  loc.transcript_id = std::move(transcript_id);
  loc.paragraph_start = first;
  loc.paragraph_end = last;
  return loc;
}

LocationRef LocationRef::span(std::string transcript_id, int paragraph,
                              std::size_t start, std::size_t end) {
  LocationRef loc = paragraphs(std::move(transcript_id), paragraph, paragraph);
  loc.char_start = start;
  loc.char_end = end;
  return loc;
}

const Paragraph& Transcript::paragraph(int index) const {
  if (index < 1 || index > paragraph_count()) {
    fail(ErrorCode::kOutOfBounds, "paragraph " + std::to_string(index) +
                                      " outside 1.." + std::to_string(paragraph_count()));
  }
  return paragraphs[static_cast<std::size_t>(index - 1)];
}

std::vector<std::size_t> wrap_offsets(std::u32string_view text, int width) {
  std::vector<std::size_t> offsets{0};
  const auto w = static_cast<std::size_t>(std::max(width, 1));
  std::size_t start = 0;
  while (text.size() - start > w) {
    // Last space within the window becomes the break; the line after it
    // starts at the following character.
    std::size_t brk = std::u32string_view::npos;
    for (std::size_t i = start + w; i > start; --i) {
      if (text::is_space(text[i])) {
        brk = i;
        break;
      }
    }
    std::size_t next = brk == std::u32string_view::npos ? start + w : brk + 1;
    if (next >= text.size()) break;
    offsets.push_back(next);
    start = next;
  }
  return offsets;
}

Transcript ingest(std::string_view raw_text, std::string title, int page_size,
                  int line_width) {
  if (page_size < 1) fail(ErrorCode::kInvalidArgument, "page_size must be >= 1");
  if (line_width < 1) fail(ErrorCode::kInvalidArgument, "line_width must be >= 1");
  if (!text::is_valid_utf8(raw_text)) {
    fail(ErrorCode::kInvalidEncoding, "transcript is not valid UTF-8");
  }
  const std::u32string cps = text::decode(text::to_nfc(raw_text));

  Transcript t;
  t.title = text::normalize(title);
  t.line_width = line_width;

  std::u32string block;
  auto flush = [&] {
    std::u32string collapsed = text::collapse_whitespace(block);
    block.clear();
    if (collapsed.empty()) return;
    Paragraph p;
    p.index = t.paragraph_count() + 1;
    p.line_offsets = wrap_offsets(collapsed, line_width);
    p.text = text::encode(collapsed);
    t.paragraphs.push_back(std::move(p));
  };

  std::size_t i = 0;
  while (i <= cps.size()) {
    // One physical line; CRLF and lone CR both end a line.
    std::size_t end = i;
    while (end < cps.size() && cps[end] != U'\n' && cps[end] != U'\r') ++end;
    const std::u32string_view line(cps.data() + i, end - i);
    const bool blank = std::all_of(line.begin(), line.end(), text::is_space);
    if (blank) {
      flush();
    } else {
      block.append(line);
      block.push_back(U' ');
    }
    if (end >= cps.size()) break;
    i = end + ((cps[end] == U'\r' && end + 1 < cps.size() && cps[end + 1] == U'\n') ? 2 : 1);
  }
  flush();

  if (t.paragraphs.empty()) {
    fail(ErrorCode::kEmptyTranscript, "transcript contains no non-empty paragraph");
  }
  std::string digest_input = t.title;
  for (const auto& p : t.paragraphs) {
    digest_input.push_back('\x1f');
    digest_input += p.text;
  }
  t.id = "tr-" + text::sha256_hex(digest_input).substr(0, 12);
  return t;
}

std::vector<Page> segment_pages(const Transcript& transcript, int page_size) {
  if (page_size < 1) fail(ErrorCode::kInvalidArgument, "page_size must be >= 1");
  std::vector<Page> pages;
  const int n = transcript.paragraph_count();
  for (int first = 1, number = 1; first <= n; first += page_size, ++number) {
    pages.push_back(Page{number, first, std::min(n, first + page_size - 1)});
  }
  return pages;
}

int page_of(int paragraph_index, int page_size) {
  return (paragraph_index - 1) / page_size + 1;
}

void check_location(const Transcript& transcript, const LocationRef& loc) {
  if (!loc.transcript_id.empty() && loc.transcript_id != transcript.id) {
    fail(ErrorCode::kForeignCode,
         "location references transcript " + loc.transcript_id);
  }
  const int n = transcript.paragraph_count();
  if (loc.paragraph_start < 1 || loc.paragraph_end > n ||
      loc.paragraph_start > loc.paragraph_end) {
    fail(ErrorCode::kOutOfBounds, "paragraph range " + std::to_string(loc.paragraph_start) +
                                      ".." + std::to_string(loc.paragraph_end) +
                                      " outside 1.." + std::to_string(n));
  }
  if (loc.char_start.has_value() != loc.char_end.has_value()) {
    fail(ErrorCode::kOutOfBounds, "character range needs both ends");
  }
  if (loc.has_chars()) {
    if (loc.paragraph_start != loc.paragraph_end) {
      fail(ErrorCode::kOutOfBounds, "character range spans paragraphs");
    }
    const auto len = text::length(transcript.paragraph(loc.paragraph_start).text);
    if (*loc.char_start >= *loc.char_end || *loc.char_end > len) {
      fail(ErrorCode::kOutOfBounds, "character range outside paragraph");
    }
  }
}

std::string resolve(const Transcript& transcript, const LocationRef& loc) {
  check_location(transcript, loc);
  if (loc.has_chars()) {
    return text::slice(transcript.paragraph(loc.paragraph_start).text, *loc.char_start,
                       *loc.char_end);
  }
  std::string out;
  for (int i = loc.paragraph_start; i <= loc.paragraph_end; ++i) {
    if (i != loc.paragraph_start) out.push_back('\n');
    out += transcript.paragraph(i).text;
  }
  return out;
}

std::string page_text(const Transcript& transcript, const Page& page) {
  std::string out;
  for (int i = page.first_paragraph; i <= page.last_paragraph; ++i) {
    if (i != page.first_paragraph) out.push_back('\n');
    out += transcript.paragraph(i).text;
  }
  return out;
}

std::string render(const Transcript& transcript) {
  std::string out;
  for (const auto& p : transcript.paragraphs) {
    if (!out.empty()) out += "\n\n";
    out += p.text;
  }
  out.push_back('\n');
  return out;
}

namespace {

int line_in_paragraph(const Paragraph& p, std::size_t offset) {
  const auto it = std::upper_bound(p.line_offsets.begin(), p.line_offsets.end(), offset);
  return static_cast<int>(it - p.line_offsets.begin());
}

}  // namespace

std::string trace_reference(const Transcript& transcript, const LocationRef& loc,
                            int page_size) {
  check_location(transcript, loc);
  const int page = page_of(loc.paragraph_start, page_size);
  const int page_first = (page - 1) * page_size + 1;
  int lines_before = 0;
  for (int i = page_first; i < loc.paragraph_start; ++i) {
    lines_before += static_cast<int>(transcript.paragraph(i).line_offsets.size());
  }
  const Paragraph& first = transcript.paragraph(loc.paragraph_start);
  int line_start = lines_before + 1;
  int line_end;
  if (loc.has_chars()) {
    line_start = lines_before + line_in_paragraph(first, *loc.char_start);
    line_end = lines_before + line_in_paragraph(first, *loc.char_end - 1);
  } else {
    // Lines keep counting across paragraphs of the same page only; a range
    // crossing a page boundary reports the end line relative to its own page.
    int count = lines_before;
    const int last_page = page_of(loc.paragraph_end, page_size);
    const int from = last_page == page ? loc.paragraph_start : (last_page - 1) * page_size + 1;
    if (last_page != page) count = 0;
    for (int i = from; i <= loc.paragraph_end; ++i) {
      count += static_cast<int>(transcript.paragraph(i).line_offsets.size());
    }
    line_end = count;
  }
  std::string para = std::to_string(loc.paragraph_start);
  if (loc.paragraph_end != loc.paragraph_start) {
    para += "-" + std::to_string(loc.paragraph_end);
  }
  std::string out = transcript.title.empty() ? std::string() : transcript.title + " ";
  out += "p." + std::to_string(page) + " para." + para + " L" + std::to_string(line_start);
  if (line_end != line_start) out += "-" + std::to_string(line_end);
  return out;
}

std::optional<LocationRef> parse_trace_reference(std::string_view trace,
                                                 const std::string& transcript_id) {
  static const std::regex kPattern(R"(para\.(\d+)(?:-(\d+))?(?:\s+L\d+(?:-\d+)?)?\s*$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(trace.begin(), trace.end(), m, kPattern)) return std::nullopt;
  const int first = std::stoi(m[1].str());
  const int last = m[2].matched ? std::stoi(m[2].str()) : first;
  return LocationRef::paragraphs(transcript_id, first, last);
}

}  // namespace thematic
