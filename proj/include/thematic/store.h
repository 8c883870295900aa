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

// Session files, code log import/export and the CSV / Markdown table codecs.
//
// A session file is one header line followed by the JSON payload:
//
//   THEMATIC-SESSION <format_version> sha256=<hex digest of the payload>
//   { ... }

#ifndef THEMATIC_STORE_H_
#define THEMATIC_STORE_H_

#include <string>
#include <string_view>
#include <vector>

#include "thematic/codelog.h"
#include "thematic/workflow.h"

namespace thematic {

inline constexpr int kSessionFormatVersion = 1;

std::string serialize_session(const Session& s);
// Throws HashMismatch, UnsupportedVersion or ParseError.
Session deserialize_session(std::string_view document);

// Throws IoFailure in addition to the above. save() writes atomically via a
// temporary file in the same directory.
void save(const Session& s, const std::string& path);
Session load(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

// ---- CSV (RFC 4180) --------------------------------------------------------

std::string csv_escape(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);
// Throws ParseError on an unterminated quoted field.
std::vector<std::vector<std::string>> parse_csv(std::string_view data);

// ---- Code log tables ---------------------------------------------------------

enum class ExportFormat { kCsv, kMarkdown };

ExportFormat parse_export_format(std::string_view name);

std::string table_to_csv(const CodeLogTable& table);
std::string table_to_markdown(const CodeLogTable& table);

// Inverse of table_to_markdown. Throws HeaderMismatch or RowArityError.
CodeLogTable parse_markdown_table(std::string_view markdown);

std::string export_code_log(const Session& s, ExportFormat format);

// Candidates built from a four-column CSV (an optional fifth "Origin"
// column is honoured). Throws HeaderMismatch, or RowArityError naming the
// 1-based data row.
std::vector<VerbatimCode> import_code_log(std::string_view csv, const std::string& transcript_id);

std::string markdown_escape(std::string_view cell);
std::string markdown_unescape(std::string_view cell);

}  // namespace thematic

#endif  // THEMATIC_STORE_H_
