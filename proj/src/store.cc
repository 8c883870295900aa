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

#include "thematic/store.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "thematic/error.h"
#include "thematic/serialize.h"
#include "thematic/text.h"

namespace thematic {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "THEMATIC-SESSION";

std::vector<std::string> header_fields(bool with_origin) {
  std::vector<std::string> h(kCodeLogColumns.begin(), kCodeLogColumns.end());
  if (with_origin) h.push_back("Origin");
  return h;
}

// Removes the single padding space on each side of a cell.
std::string unpad(std::string cell) {
  if (!cell.empty() && cell.front() == ' ') cell.erase(0, 1);
  if (!cell.empty() && cell.back() == ' ') cell.pop_back();
  return cell;
}

// Splits a Markdown table row on unescaped pipes.
std::vector<std::string> split_row(std::string_view line) {
  std::string_view body = line;
  while (!body.empty() && body.back() == '\r') body.remove_suffix(1);
  if (body.empty() || body.front() != '|') {
    fail(ErrorCode::kParseError, "table row must start with '|'");
  }
  body.remove_prefix(1);
  std::vector<std::string> cells;
  std::string cell;
  bool escaped = false;
  bool closed = false;
  for (char c : body) {
    closed = false;
    if (escaped) {
      cell += '\\';
      cell += c;
      escaped = false;
    } else if (c == '\\') {
      escaped = true;
    } else if (c == '|') {
      cells.push_back(markdown_unescape(unpad(cell)));
      cell.clear();
      closed = true;
    } else {
      cell += c;
    }
  }
  if (escaped) cell += '\\';
  if (!closed && !text::trim(cell).empty()) cells.push_back(markdown_unescape(unpad(cell)));
  return cells;
}

bool is_separator(const std::vector<std::string>& cells) {
  for (const auto& c : cells) {
    if (c.empty()) return false;
    for (char ch : c) {
      if (ch != '-' && ch != ':') return false;
    }
  }
  return !cells.empty();
}

}  // namespace

std::string serialize_session(const Session& s) {
  const std::string payload = json(s).dump(2);
  return std::string(kMagic) + " " + std::to_string(kSessionFormatVersion) +
         " sha256=" + text::sha256_hex(payload) + "\n" + payload;
}

Session deserialize_session(std::string_view document) {
  const std::size_t nl = document.find('\n');
  if (nl == std::string_view::npos) fail(ErrorCode::kParseError, "missing session header");
  const std::string header(document.substr(0, nl));
  static const std::regex kHeader(R"(THEMATIC-SESSION (\d+) sha256=([0-9a-f]{64})\r?)");
  std::smatch m;
  if (!std::regex_match(header, m, kHeader)) {
    fail(ErrorCode::kParseError, "malformed session header");
  }
  const int version = std::stoi(m[1].str());
  if (version != kSessionFormatVersion) {
    fail(ErrorCode::kUnsupportedVersion,
         "session format version " + std::to_string(version) + " is not supported");
  }
  const std::string_view payload = document.substr(nl + 1);
  if (text::sha256_hex(payload) != m[2].str()) {
    fail(ErrorCode::kHashMismatch, "session payload does not match its integrity hash");
  }
  return with_json_errors(ErrorCode::kParseError,
                          [&] { return json::parse(payload).get<Session>(); });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIoFailure, "error reading " + path);
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIoFailure, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorCode::kIoFailure, "error writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIoFailure, "cannot replace " + path);
  }
}

void save(const Session& s, const std::string& path) { write_file(path, serialize_session(s)); }

Session load(const std::string& path) { return deserialize_session(read_file(path)); }

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_escape(fields[i]);
  }
  return out + "\r\n";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view data) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    rows.push_back(std::move(row));
    row.clear();
    field_started = false;
  };
  while (i < data.size()) {
    const char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field += c;
      }
      ++i;
      continue;
    }
    if (c == '"' && field.empty() && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') {
      end_row();
      ++i;
    } else if (c == '\n') {
      end_row();
    } else {
      field += c;
      field_started = true;
    }
    ++i;
  }
  if (quoted) fail(ErrorCode::kParseError, "unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

ExportFormat parse_export_format(std::string_view name) {
  const std::string lower = text::to_lower_ascii(name);
  if (lower == "csv") return ExportFormat::kCsv;
  if (lower == "markdown" || lower == "md") return ExportFormat::kMarkdown;
  fail(ErrorCode::kInvalidArgument, "unknown export format: " + std::string(name));
}

std::string markdown_escape(std::string_view cell) {
  std::string out;
  for (char c : cell) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '|') {
      out += "\\|";
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else {
      out += c;
    }
  }
  return out;
}

std::string markdown_unescape(std::string_view cell) {
  std::string out;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (cell[i] == '\\' && i + 1 < cell.size()) {
      const char n = cell[++i];
      if (n == 'n') {
        out += '\n';
      } else if (n == 'r') {
        out += '\r';
      } else {
        out += n;
      }
    } else {
      out += cell[i];
    }
  }
  return out;
}

std::string table_to_csv(const CodeLogTable& table) {
  std::string out = csv_row(header_fields(false));
  for (const auto& r : table.rows) out += csv_row({r[0], r[1], r[2], r[3]});
  return out;
}

std::string table_to_markdown(const CodeLogTable& table) {
  std::string out = "|";
  for (auto h : kCodeLogColumns) out += " " + std::string(h) + " |";
  out += "\n|---|---|---|---|\n";
  for (const auto& r : table.rows) {
    out += "|";
    for (const auto& cell : r) {
      const std::string esc = markdown_escape(cell);
      out += esc.empty() ? " |" : " " + esc + " |";
    }
    out += "\n";
  }
  return out;
}

CodeLogTable parse_markdown_table(std::string_view markdown) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(markdown)};
  std::string line;
  while (std::getline(in, line)) {
    if (!text::trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) fail(ErrorCode::kHeaderMismatch, "no table header");
  const std::vector<std::string> header = split_row(lines[0]);
  if (header != header_fields(false)) {
    fail(ErrorCode::kHeaderMismatch, "table header does not match the code log columns");
  }
  std::size_t start = 1;
  if (lines.size() > 1 && is_separator(split_row(lines[1]))) start = 2;
  CodeLogTable table;
  for (std::size_t i = start; i < lines.size(); ++i) {
    std::vector<std::string> cells = split_row(lines[i]);
    if (cells.size() != 4) {
      fail(ErrorCode::kRowArityError, "row " + std::to_string(i - start + 1) + " has " +
                                          std::to_string(cells.size()) + " cells, expected 4");
    }
    table.rows.push_back({cells[0], cells[1], cells[2], cells[3]});
  }
  return table;
}

std::string export_code_log(const Session& s, ExportFormat format) {
  const Transcript* t = s.transcript ? &*s.transcript : nullptr;
  const CodeLogTable table = render_code_log(s.code_log, t, s.settings.page_size);
  return format == ExportFormat::kCsv ? table_to_csv(table) : table_to_markdown(table);
}

std::vector<VerbatimCode> import_code_log(std::string_view csv, const std::string& transcript_id) {
  std::vector<std::vector<std::string>> rows = parse_csv(csv);
  if (rows.empty()) fail(ErrorCode::kHeaderMismatch, "missing header row");
  const auto& header = rows.front();
  const bool with_origin = header.size() == 5 && text::to_lower_ascii(header[4]) == "origin";
  if (!(with_origin ? std::vector<std::string>(header.begin(), header.begin() + 4) == header_fields(false)
                    : header == header_fields(false))) {
    fail(ErrorCode::kHeaderMismatch, "header must be the four code log columns");
  }
  const std::size_t arity = with_origin ? 5 : 4;
  std::vector<VerbatimCode> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() == 1 && r[0].empty()) continue;
    if (r.size() != arity) {
      fail(ErrorCode::kRowArityError, "row " + std::to_string(i) + " has " +
                                          std::to_string(r.size()) + " fields, expected " +
                                          std::to_string(arity));
    }
    std::optional<LocationRef> loc = parse_trace_reference(r[1], transcript_id);
    VerbatimCode code;
    code.exact_phrase = text::normalize(r[0]);
    if (code.exact_phrase.empty()) {
      fail(ErrorCode::kEmptyPhrase, "row " + std::to_string(i) + " has an empty phrase");
    }
    code.location = loc ? *loc : LocationRef::paragraphs(transcript_id, 0, 0);
    code.paragraph_context = r[2];
    code.rationale = r[3];
    code.origin = with_origin && !r[4].empty() ? parse_origin(text::to_lower_ascii(r[4]))
                                               : Origin::kHuman;
    code.status = initial_status(code.origin);
    out.push_back(std::move(code));
  }
  return out;
}

}  // namespace thematic
