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

#include "thematic/gateway.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "thematic/error.h"
#include "thematic/text.h"

namespace thematic {

// ---- Configuration ---------------------------------------------------------

void LlmConfig::validate() const {
  auto check = [](double temperature, int max_tokens) {
    if (!(temperature >= 0.0 && temperature <= 2.0)) {
      fail(ErrorCode::kInvalidArgument, "temperature must be within [0, 2]");
    }
    if (max_tokens < 1) fail(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  };
  check(temperature, max_tokens);
  for (const auto& [phase, o] : phase_overrides) {
    parse_phase(phase);
    check(o.temperature.value_or(temperature), o.max_tokens.value_or(max_tokens));
  }
  if (max_in_flight < 1 || max_in_flight > 64) {
    fail(ErrorCode::kInvalidArgument, "max_in_flight must be within [1, 64]");
  }
  if (max_retries < 0) fail(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
}

LlmConfig LlmConfig::for_phase(Phase phase) const {
  LlmConfig c = *this;
  const auto it = phase_overrides.find(std::string(phase_name(phase)));
  if (it != phase_overrides.end()) {
    if (it->second.temperature) c.temperature = *it->second.temperature;
    if (it->second.max_tokens) c.max_tokens = *it->second.max_tokens;
  }
  return c;
}

// ---- Templates -------------------------------------------------------------

namespace {

const std::vector<PromptTemplate>& templates() {
  static const std::vector<PromptTemplate> kTemplates = {
      {"p1_narrative", Phase::kFamiliarization,
       "Research question: {research_question}\n\n"
       "Phase 1, familiarisation. Read the whole transcript below and write one narrative "
       "summary of the interview: its storyline, recurring concerns, emotional undercurrents "
       "and tensions that bear on the research question. Do not generate codes yet.\n\n"
       "Transcript:\n{text_segment}\n\n"
       "Narrative summary:"},
      {"p1_segment", Phase::kFamiliarization,
       "Research question: {research_question}\n\n"
       "Phase 1, familiarisation. Summarise Page {page_number} below paragraph by paragraph, "
       "adding a short interpretive note to each paragraph. Do not generate codes yet.\n\n"
       "Page {page_number}:\n{text_segment}\n\n"
       "Segmented summary for Page {page_number}:"},
      {"p2_extract", Phase::kExactKeyword,
       "Research question: {research_question}\n\n"
       "Phase 2, exact keyword coding. From the text segment below, extract only the most "
       "relevant inductively emerging codes; do not create a code for every observation. "
       "For each code give a short code phrase, then the supporting sentence or passage "
       "copied word for word from the segment, then the page marker Page {page_number}, "
       "then a brief rationale.\n\n"
       "Write each entry exactly in this format:\n"
       "1. Code: <short code phrase>\n"
       "   Passage: \"<exact sentence or passage from the segment>\"\n"
       "   Page: {page_number}\n"
       "   Rationale: <brief interpretation>\n\n"
       "Text segment (Page {page_number}):\n{text_segment}\n\n"
       "Codes with supporting passages for Page {page_number}:"},
      {"p2_repair", Phase::kExactKeyword,
       "The entry below was offered as verbatim evidence from Page {page_number}, but its "
       "passage does not occur word for word in the text segment. Return the same entry with "
       "the passage replaced by the exact sentence or passage from the segment, copied "
       "character for character. Keep the entry format.\n\n"
       "Entry:\n{prior_codes}\n\n"
       "Text segment (Page {page_number}):\n{text_segment}\n\n"
       "Corrected entry:"},
      {"p3_gerunds", Phase::kDescriptivePattern,
       "Research question: {research_question}\n\n"
       "Phase 3, descriptive and pattern coding. For each verbatim code below propose one "
       "gerund-based descriptive code (an action or process that starts with an -ing word) "
       "and an emerging code family. Copy each verbatim expression exactly as listed.\n\n"
       "Write each entry exactly in this format:\n"
       "1. Verbatim: \"<verbatim expression as listed>\"\n"
       "   Gerund: <descriptive code>\n"
       "   Family: <code family>\n\n"
       "Verbatim codes:\n{prior_codes}\n\n"
       "Descriptive codes:"},
      {"p4_themes", Phase::kThemeDevelopment,
       "Research question: {research_question}\n\n"
       "Phase 4, theme development. Cluster the code families below into candidate themes. "
       "Where it helps, tag each theme with a dimension: structural (systemic, institutional) "
       "or personal (individual, emotional). Use the family labels exactly as listed.\n\n"
       "Write each entry exactly in this format:\n"
       "1. Theme: <theme label>\n"
       "   Families: <family label>; <family label>\n"
       "   Dimension: <structural|personal|unassigned>\n\n"
       "Code families:\n{prior_codes}\n\n"
       "Candidate themes:"},
      {"p5_review", Phase::kThemeReview,
       "Research question: {research_question}\n\n"
       "Phase 5, theme review. Check the candidate theme below against its supporting verbatim "
       "evidence. Say whether the quotes support it, where it is thin, and what should be "
       "split, merged or renamed.\n\n"
       "Theme:\n{prior_codes}\n\n"
       "Review memo:"},
      {"p6_define", Phase::kDefineReport,
       "Research question: {research_question}\n\n"
       "Phase 6, defining and naming. Write a concise definition of the theme below that "
       "states what it captures and where its boundary lies, grounded in the listed "
       "evidence.\n\n"
       "Theme:\n{prior_codes}\n\n"
       "Definition:"},
      {"reflexive", Phase::kSetup,
       "Research question: {research_question}\n\n"
       "The researcher describes their positionality as: {positionality}\n\n"
       "Ask one reflexive question that invites the researcher to examine how this background "
       "may shape what they notice and how they interpret the data.\n\n"
       "Reflexive question:"},
  };
  return kTemplates;
}

}  // namespace

const PromptTemplate& builtin_template(std::string_view id) {
  for (const auto& t : templates()) {
    if (t.id == id) return t;
  }
  fail(ErrorCode::kInvalidArgument, "unknown prompt template '" + std::string(id) + "'");
}

std::vector<std::string> builtin_template_ids() {
  std::vector<std::string> ids;
  for (const auto& t : templates()) ids.push_back(t.id);
  return ids;
}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
  const std::string& s = tmpl.text;
  std::string out;
  out.reserve(s.size() * 2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '{' && i + 1 < s.size() && s[i + 1] == '{') {
      out.push_back('{');
      ++i;
    } else if (c == '}' && i + 1 < s.size() && s[i + 1] == '}') {
      out.push_back('}');
      ++i;
    } else if (c == '{') {
      const auto close = s.find('}', i);
      if (close == std::string::npos) {
        fail(ErrorCode::kInvalidArgument, "unterminated placeholder in " + tmpl.id);
      }
      const std::string name = s.substr(i + 1, close - i - 1);
      const auto it = bindings.find(name);
      if (it == bindings.end()) {
        fail(ErrorCode::kUnboundPlaceholder,
             "template " + tmpl.id + " needs a binding for {" + name + "}");
      }
      out += it->second;
      i = close;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string request_hash(std::string_view template_id, std::string_view prompt,
                         const LlmConfig& config) {
  const nlohmann::json key = {
      {"template", template_id},   {"prompt", prompt},
      {"model", config.model_id},  {"temperature", config.temperature},
      {"max_tokens", config.max_tokens}, {"system_role", config.system_role},
  };
  return text::sha256_hex(key.dump());
}

// ---- Mock backend ----------------------------------------------------------

void MockBackend::add_fixture(std::string hash, std::string response) {
  std::lock_guard lock(mu_);
  fixtures_[std::move(hash)] = std::move(response);
}

int MockBackend::load_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    fail(ErrorCode::kIoFailure, "fixture directory not found: " + dir);
  }
  int loaded = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    add_fixture(entry.path().stem().string(), buf.str());
    ++loaded;
  }
  return loaded;
}

void MockBackend::write_dir(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::lock_guard lock(mu_);
  auto all = fixtures_;
  all.insert(served_.begin(), served_.end());
  for (const auto& [hash, response] : all) {
    std::ofstream out(fs::path(dir) / (hash + ".txt"), std::ios::binary);
    out << response;
    if (!out) fail(ErrorCode::kIoFailure, "cannot write fixture " + hash);
  }
}

std::map<std::string, std::string> MockBackend::served() const {
  std::lock_guard lock(mu_);
  return served_;
}

ChatReply MockBackend::send(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  auto it = fixtures_.find(request.request_hash);
  std::optional<std::string> text;
  if (it != fixtures_.end()) {
    text = it->second;
  } else if (responder_) {
    text = responder_(request.template_id, request.prompt);
  }
  if (!text) {
    fail(ErrorCode::kMockFixtureMissing, "no mock fixture for request " + request.request_hash +
                                             " (template " + request.template_id + ")");
  }
  served_[request.request_hash] = *text;
  return ChatReply{*text, nlohmann::json::object()};
}

// ---- Live backend ----------------------------------------------------------

LiveBackend::LiveBackend(std::optional<std::string> api_key, Sleeper sleeper)
    : api_key_(std::move(api_key)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

ChatReply LiveBackend::send(const ChatRequest& request) {
  const LlmConfig& cfg = request.config;
  std::string key;
  if (api_key_) {
    key = *api_key_;
  } else if (const char* env = std::getenv(cfg.api_key_env.c_str())) {
    key = env;
  }
  if (key.empty()) {
    fail(ErrorCode::kAuthenticationFailure, "API key variable " + cfg.api_key_env + " is not set");
  }

  const auto scheme_end = cfg.endpoint.find("://");
  const auto path_start =
      cfg.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string base = cfg.endpoint.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : cfg.endpoint.substr(path_start);

  const nlohmann::json body = {
      {"model", cfg.model_id},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", cfg.system_role}},
                              {{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", cfg.temperature},
      {"max_tokens", cfg.max_tokens},
  };

  httplib::Client client(base);
  client.set_connection_timeout(cfg.timeout_seconds, 0);
  client.set_read_timeout(cfg.timeout_seconds, 0);
  client.set_write_timeout(cfg.timeout_seconds, 0);
  const httplib::Headers headers = {{"Authorization", "Bearer " + key}};

  std::string last_failure;
  auto delay = std::chrono::milliseconds(cfg.backoff_initial_ms);
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(delay);
      delay *= 2;
    }
    ++attempts_;
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      fail(ErrorCode::kAuthenticationFailure,
           "backend rejected credentials (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      fail(ErrorCode::kBackendUnavailable,
           "backend returned HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    const auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty()) {
      fail(ErrorCode::kBackendUnavailable, "malformed chat completion response");
    }
    ChatReply reply;
    reply.text = doc["choices"][0]["message"].value("content", "");
    if (doc.contains("usage")) reply.usage = doc["usage"];
    return reply;
  }
  fail(ErrorCode::kBackendUnavailable, "backend unavailable after " +
                                           std::to_string(cfg.max_retries + 1) +
                                           " attempts: " + last_failure);
}

std::shared_ptr<ChatBackend> make_backend(const LlmConfig& config) {
  if (config.backend == BackendKind::kLive) return std::make_shared<LiveBackend>();
  auto mock = std::make_shared<MockBackend>();
  if (!config.fixture_dir.empty()) mock->load_dir(config.fixture_dir);
  return mock;
}

// ---- Gateway ---------------------------------------------------------------

Gateway::Gateway(LlmConfig config, std::shared_ptr<ChatBackend> backend)
    : config_(std::move(config)), backend_(std::move(backend)) {
  config_.validate();
  in_flight_ = std::make_unique<std::counting_semaphore<64>>(config_.max_in_flight);
}

RawCompletion Gateway::complete(std::string_view template_id, std::string_view prompt,
                                Phase phase) {
  ChatRequest req;
  req.template_id = std::string(template_id);
  req.prompt = std::string(prompt);
  req.config = config_.for_phase(phase);
  req.request_hash = request_hash(template_id, prompt, req.config);

  in_flight_->acquire();
  ChatReply reply;
  try {
    reply = backend_->send(req);
  } catch (...) {
    in_flight_->release();
    throw;
  }
  in_flight_->release();

  RawCompletion out;
  out.request_hash = req.request_hash;
  out.template_id = req.template_id;
  out.response_text = std::move(reply.text);
  out.usage = std::move(reply.usage);
  return out;
}

// ---- Parsing ---------------------------------------------------------------

namespace {

struct FieldLine {
  std::string label;  // canonical field name
  std::string value;
};

std::string strip_bold(std::string s) {
  for (std::size_t pos; (pos = s.find("**")) != std::string::npos;) s.erase(pos, 2);
  return s;
}

std::string strip_list_marker(const std::string& line) {
  static const std::regex kMarker(R"(^\s*(?:\d+[.)]|[-*])\s+)");
  std::string s = text::trim(line);
  if (s.starts_with("\xE2\x80\xA2")) s = text::trim(s.substr(3));  // bullet
  return std::regex_replace(s, kMarker, "", std::regex_constants::format_first_only);
}

std::string strip_quotes(std::string s) {
  s = text::trim(s);
  static const std::vector<std::pair<std::string, std::string>> kPairs = {
      {"\"", "\""}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}};
  for (const auto& [open, close] : kPairs) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
      return text::trim(s.substr(open.size(), s.size() - open.size() - close.size()));
    }
  }
  return s;
}

using Aliases = std::vector<std::pair<std::string, std::string>>;  // alias -> field

std::optional<FieldLine> field_line(const std::string& raw, const Aliases& aliases) {
  const std::string line = strip_bold(strip_list_marker(raw));
  const auto colon = line.find(':');
  if (colon == std::string::npos || colon > 40) return std::nullopt;
  const std::string label = text::to_lower_ascii(text::trim(line.substr(0, colon)));
  for (const auto& [alias, field] : aliases) {
    if (label == alias) return FieldLine{field, text::trim(line.substr(colon + 1))};
  }
  return std::nullopt;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : s) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(std::move(cur));
  return lines;
}

using Record = std::map<std::string, std::string>;

// Groups "Label: value" lines into records; a record starts at start_field.
std::vector<Record> field_records(std::string_view response, const Aliases& aliases,
                                  const std::string& start_field) {
  std::vector<Record> records;
  std::string last_field;
  for (const auto& line : split_lines(response)) {
    if (text::trim(line).empty()) continue;
    auto f = field_line(line, aliases);
    if (!f) {
      static const std::regex kPageOnly(R"(^\s*\(?\s*page\s*(\d+)\s*\)?\s*$)", std::regex::icase);
      std::smatch m;
      const std::string cleaned = strip_bold(strip_list_marker(line));
      if (!records.empty() && std::regex_match(cleaned, m, kPageOnly)) {
        records.back()["page"] = m[1].str();
      }
      continue;
    }
    if (f->label == start_field) {
      records.emplace_back();
    } else if (records.empty()) {
      continue;
    }
    records.back()[f->label] = f->value;
    last_field = f->label;
  }
  return records;
}

std::vector<std::string> split_cells(const std::string& row) {
  std::vector<std::string> cells;
  std::string cur;
  std::string s = text::trim(row);
  if (s.starts_with("|")) s.erase(0, 1);
  if (s.ends_with("|") && !s.ends_with("\\|")) s.pop_back();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == '|') {
      cur.push_back('|');
      ++i;
    } else if (s[i] == '|') {
      cells.push_back(text::trim(cur));
      cur.clear();
    } else {
      cur.push_back(s[i]);
    }
  }
  cells.push_back(text::trim(cur));
  return cells;
}

bool is_separator_row(const std::vector<std::string>& cells) {
  static const std::regex kSep(R"(^:?-{2,}:?$)");
  return std::all_of(cells.begin(), cells.end(),
                     [](const std::string& c) { return std::regex_match(c, kSep); });
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::optional<Table> markdown_table(std::string_view response) {
  Table t;
  for (const auto& line : split_lines(response)) {
    const std::string trimmed = text::trim(line);
    if (!trimmed.starts_with("|")) continue;
    auto cells = split_cells(trimmed);
    if (is_separator_row(cells)) continue;
    for (auto& c : cells) c = strip_bold(c);
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  if (t.header.empty()) return std::nullopt;
  return t;
}

int column_matching(const Table& t, std::initializer_list<const char*> needles, int skip = -1) {
  for (const char* needle : needles) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      if (static_cast<int>(i) == skip) continue;
      if (text::to_lower_ascii(t.header[i]).find(needle) != std::string::npos) {
        return static_cast<int>(i);
      }
    }
  }
  return -1;
}

std::string cell(const std::vector<std::string>& row, int col) {
  if (col < 0 || static_cast<std::size_t>(col) >= row.size()) return {};
  return row[static_cast<std::size_t>(col)];
}

std::optional<int> first_number(const std::string& s) {
  static const std::regex kPage(R"((?:page|p\.)\s*(\d+))", std::regex::icase);
  static const std::regex kNumber(R"((\d+))");
  std::smatch m;
  if (std::regex_search(s, m, kPage) || std::regex_search(s, m, kNumber)) {
    return std::stoi(m[1].str());
  }
  return std::nullopt;
}

bool blank(std::string_view s) { return text::trim(s).empty(); }

[[noreturn]] void no_structure(const char* what) {
  fail(ErrorCode::kParseError, std::string("response holds no recognizable ") + what);
}

}  // namespace

Parsed<CandidateCode> parse_code_entries(std::string_view response, const Page& page) {
  static const Aliases kAliases = {
      {"code", "code"},         {"keyword", "code"},         {"emerging code", "code"},
      {"code phrase", "code"},  {"passage", "passage"},      {"supporting passage", "passage"},
      {"sentence", "passage"},  {"supporting sentence", "passage"},
      {"exact sentence", "passage"}, {"excerpt", "passage"}, {"quote", "passage"},
      {"page", "page"},         {"page marker", "page"},     {"trace", "page"},
      {"rationale", "rationale"}, {"interpretation", "rationale"},
  };
  Parsed<CandidateCode> out;
  const auto records = field_records(response, kAliases, "code");
  auto accept = [&](std::string code, std::string passage, const std::string& page_text,
                    std::string rationale, std::size_t ordinal) {
    passage = strip_quotes(passage);
    if (passage.empty()) {
      out.warnings.push_back("entry " + std::to_string(ordinal) + " ('" + code +
                             "') has no supporting passage; dropped");
      return;
    }
    CandidateCode c;
    c.code_phrase = text::trim(code);
    c.passage = std::move(passage);
    c.page = first_number(page_text).value_or(page.number);
    c.rationale = text::trim(rationale);
    out.items.push_back(std::move(c));
  };
  if (!records.empty()) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const Record& r = records[i];
      auto get = [&](const char* k) {
        auto it = r.find(k);
        return it == r.end() ? std::string() : it->second;
      };
      accept(get("code"), get("passage"), get("page"), get("rationale"), i + 1);
    }
    return out;
  }
  if (auto table = markdown_table(response)) {
    const int passage = column_matching(*table, {"passage", "sentence", "excerpt", "verbatim", "exact"});
    const int code = column_matching(*table, {"code", "keyword"}, passage);
    const int page_col = column_matching(*table, {"page", "trace", "reference", "location"});
    const int rationale = column_matching(*table, {"rationale", "interpretation"});
    if (passage >= 0 || code >= 0) {
      for (std::size_t i = 0; i < table->rows.size(); ++i) {
        const auto& row = table->rows[i];
        const std::string p = cell(row, passage);
        accept(code >= 0 ? cell(row, code) : strip_quotes(p), p, cell(row, page_col),
               cell(row, rationale), i + 1);
      }
      return out;
    }
  }
  if (!blank(response)) no_structure("code entries");
  return out;
}

Parsed<GerundMapping> parse_gerund_mappings(std::string_view response, const CodeLog* log) {
  static const Aliases kAliases = {
      {"verbatim", "verbatim"},        {"verbatim expression", "verbatim"},
      {"verbatim code", "verbatim"},   {"gerund", "gerund"},
      {"gerund code", "gerund"},       {"descriptive code", "gerund"},
      {"family", "family"},            {"code family", "family"},
      {"category", "family"},
  };
  Parsed<GerundMapping> out;
  auto add = [&](std::string verbatim, std::string gerund, std::string family) {
    GerundMapping m;
    m.verbatim_phrase = strip_quotes(verbatim);
    m.gerund_label = text::trim(gerund);
    m.family_label = text::trim(family);
    out.items.push_back(std::move(m));
  };
  const auto records = field_records(response, kAliases, "verbatim");
  if (!records.empty()) {
    for (const Record& r : records) {
      auto get = [&](const char* k) {
        auto it = r.find(k);
        return it == r.end() ? std::string() : it->second;
      };
      add(get("verbatim"), get("gerund"), get("family"));
    }
  } else if (auto table = markdown_table(response)) {
    const int family = column_matching(*table, {"family", "categor"});
    const int gerund = column_matching(*table, {"gerund", "descriptive"}, family);
    const int verbatim = column_matching(*table, {"verbatim", "expression", "phrase", "quote"}, gerund);
    if (verbatim < 0 || gerund < 0) no_structure("gerund mappings");
    for (const auto& row : table->rows) {
      add(cell(row, verbatim), cell(row, gerund), cell(row, family));
    }
  } else if (!blank(response)) {
    no_structure("gerund mappings");
  }

  if (log != nullptr) {
    const auto active = log->active_verbatims();
    for (auto& m : out.items) {
      const std::string key = text::normalize(m.verbatim_phrase);
      for (const VerbatimCode* c : active) {
        if (c->exact_phrase == key) {
          m.matched_code_id = c->id;
          break;
        }
      }
      m.unmatched = !m.matched_code_id.has_value();
      if (m.unmatched) {
        out.warnings.push_back("mapping for \"" + m.verbatim_phrase +
                               "\" matches no active verbatim code");
      }
    }
  }
  return out;
}

Parsed<ThemeProposal> parse_theme_proposals(std::string_view response) {
  static const Aliases kAliases = {
      {"theme", "theme"},       {"candidate theme", "theme"}, {"families", "families"},
      {"family", "families"},   {"code families", "families"}, {"dimension", "dimension"},
  };
  Parsed<ThemeProposal> out;
  auto add = [&](std::string label, const std::string& families, const std::string& dimension) {
    ThemeProposal p;
    p.label = text::trim(label);
    std::stringstream ss(families);
    for (std::string part; std::getline(ss, part, ';');) {
      part = text::trim(part);
      if (!part.empty()) p.family_labels.push_back(part);
    }
    const std::string dim = text::to_lower_ascii(text::trim(dimension));
    if (dim.find("structural") != std::string::npos) {
      p.dimension = Dimension::kStructural;
    } else if (dim.find("personal") != std::string::npos) {
      p.dimension = Dimension::kPersonal;
    } else if (!dim.empty() && dim != "unassigned" && dim != "none") {
      out.warnings.push_back("unknown dimension '" + dimension + "' for theme '" + p.label + "'");
    }
    out.items.push_back(std::move(p));
  };
  const auto records = field_records(response, kAliases, "theme");
  if (!records.empty()) {
    for (const Record& r : records) {
      auto get = [&](const char* k) {
        auto it = r.find(k);
        return it == r.end() ? std::string() : it->second;
      };
      add(get("theme"), get("families"), get("dimension"));
    }
  } else if (auto table = markdown_table(response)) {
    const int theme = column_matching(*table, {"theme"});
    const int families = column_matching(*table, {"famil", "categor"}, theme);
    const int dimension = column_matching(*table, {"dimension"});
    if (theme < 0) no_structure("theme proposals");
    for (const auto& row : table->rows) {
      add(cell(row, theme), cell(row, families), cell(row, dimension));
    }
  } else if (!blank(response)) {
    no_structure("theme proposals");
  }
  return out;
}

std::string emit_code_entries(const std::vector<CandidateCode>& entries) {
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    out += std::to_string(i + 1) + ". Code: " + e.code_phrase + "\n";
    out += "   Passage: \"" + e.passage + "\"\n";
    out += "   Page: " + std::to_string(e.page) + "\n";
    if (!e.rationale.empty()) out += "   Rationale: " + e.rationale + "\n";
    out += "\n";
  }
  return out;
}

std::string emit_gerund_mappings(const std::vector<GerundMapping>& mappings) {
  std::string out;
  for (std::size_t i = 0; i < mappings.size(); ++i) {
    const auto& m = mappings[i];
    out += std::to_string(i + 1) + ". Verbatim: \"" + m.verbatim_phrase + "\"\n";
    out += "   Gerund: " + m.gerund_label + "\n";
    out += "   Family: " + m.family_label + "\n\n";
  }
  return out;
}

std::string emit_theme_proposals(const std::vector<ThemeProposal>& proposals) {
  std::string out;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const auto& p = proposals[i];
    out += std::to_string(i + 1) + ". Theme: " + p.label + "\n";
    out += "   Families: ";
    for (std::size_t k = 0; k < p.family_labels.size(); ++k) {
      if (k) out += "; ";
      out += p.family_labels[k];
    }
    out += "\n   Dimension: " + std::string(dimension_name(p.dimension)) + "\n\n";
  }
  return out;
}

}  // namespace thematic
