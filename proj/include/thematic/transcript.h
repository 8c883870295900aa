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

// Transcript ingestion, page segmentation and location addressing.

#ifndef THEMATIC_TRANSCRIPT_H_
#define THEMATIC_TRANSCRIPT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace thematic {

inline constexpr int kDefaultPageSize = 10;
inline constexpr int kDefaultLineWidth = 80;
inline constexpr int kNormalizationVersion = 1;

struct Paragraph {
  int index = 0;  // 1-based
  std::string text;
  // Code point offsets of derived line starts; front() == 0.
  std::vector<std::size_t> line_offsets;

  bool operator==(const Paragraph&) const = default;
};

struct Page {
  int number = 0;
  int first_paragraph = 0;
  int last_paragraph = 0;  // inclusive

  bool operator==(const Page&) const = default;
};

// Addresses either whole paragraphs (inclusive range) or a code point range
// inside a single paragraph.
struct LocationRef {
  std::string transcript_id;
  std::optional<int> page;
  int paragraph_start = 0;
  int paragraph_end = 0;
  std::optional<std::size_t> char_start;
  std::optional<std::size_t> char_end;

  bool has_chars() const { return char_start.has_value(); }
  bool intersects(int first, int last) const {
    return paragraph_start <= last && paragraph_end >= first;
  }

  static LocationRef paragraphs(std::string transcript_id, int first, int last);
  static LocationRef span(std::string transcript_id, int paragraph, std::size_t start,
                          std::size_t end);

  bool operator==(const LocationRef&) const = default;
};

struct Transcript {
  std::string id;
  std::string title;
  std::vector<Paragraph> paragraphs;
  int normalization_version = kNormalizationVersion;
  int line_width = kDefaultLineWidth;

  int paragraph_count() const { return static_cast<int>(paragraphs.size()); }
  const Paragraph& paragraph(int index) const;

  bool operator==(const Transcript&) const = default;
};

// Splits raw text into blank-line separated paragraphs after normalization
// (NFC, CRLF to LF, whitespace runs collapsed, lines trimmed). Throws
// EmptyTranscript, InvalidEncoding, or InvalidArgument for page_size < 1.
Transcript ingest(std::string_view raw_text, std::string title,
                  int page_size = kDefaultPageSize,
                  int line_width = kDefaultLineWidth);

std::vector<Page> segment_pages(const Transcript& transcript, int page_size);

int page_of(int paragraph_index, int page_size);

// Throws OutOfBounds (or ForeignCode for another transcript's id) when loc
// does not address this transcript.
void check_location(const Transcript& transcript, const LocationRef& loc);

std::string resolve(const Transcript& transcript, const LocationRef& loc);

// Greedy wrap at whitespace; returns line start offsets.
std::vector<std::size_t> wrap_offsets(std::u32string_view text, int width);

// Text of a page's paragraphs, one paragraph per line.
std::string page_text(const Transcript& transcript, const Page& page);

// Paragraphs joined by blank lines; ingesting this yields the same paragraphs.
std::string render(const Transcript& transcript);

// Human readable trace such as "FGD p.1 para.3 L5-6". Line numbers count
// derived lines from the start of the page.
std::string trace_reference(const Transcript& transcript, const LocationRef& loc,
                            int page_size);

// Inverse of the paragraph part of trace_reference. Returns nullopt when the
// text carries no "para.N" marker.
std::optional<LocationRef> parse_trace_reference(std::string_view trace,
                                                 const std::string& transcript_id);

}  // namespace thematic

#endif  // THEMATIC_TRANSCRIPT_H_
