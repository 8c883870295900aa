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

// Prompt construction, chat-completion backends (live HTTP or deterministic
// mock) and the parsers that turn responses into analytic records.

#ifndef THEMATIC_GATEWAY_H_
#define THEMATIC_GATEWAY_H_

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "thematic/codelog.h"
#include "thematic/model.h"
#include "thematic/transcript.h"

namespace thematic {

enum class BackendKind { kLive, kMock };

struct PhaseOverride {
  std::optional<double> temperature;
  std::optional<int> max_tokens;

  bool operator==(const PhaseOverride&) const = default;
};

inline constexpr std::string_view kDefaultSystemRole =
    "You are a skilled qualitative researcher focusing on inductively emerging codes.";

struct LlmConfig {
  std::string model_id = "gpt-4-turbo";
  double temperature = 0.3;
  int max_tokens = 1000;
  std::string system_role = std::string(kDefaultSystemRole);
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  BackendKind backend = BackendKind::kMock;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string fixture_dir;
  int max_in_flight = 2;
  int max_retries = 3;
  int backoff_initial_ms = 500;
  int timeout_seconds = 60;
  // Keyed by phase name, e.g. "P2_ExactKeyword".
  std::map<std::string, PhaseOverride> phase_overrides;

  // Throws InvalidArgument when temperature is outside [0, 2] or
  // max_tokens < 1.
  void validate() const;
  LlmConfig for_phase(Phase phase) const;

  bool operator==(const LlmConfig&) const = default;
};

struct PromptTemplate {
  std::string id;
  Phase phase = Phase::kSetup;
  std::string text;  // {name} placeholders; {{ and }} are literal braces
};

// Built-in templates: p1_narrative, p1_segment, p2_extract, p2_repair,
// p3_gerunds, p4_themes, p5_review, p6_define, reflexive.
const PromptTemplate& builtin_template(std::string_view id);
std::vector<std::string> builtin_template_ids();

using Bindings = std::map<std::string, std::string>;

// Throws UnboundPlaceholder naming the first missing binding.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

struct RawCompletion {
  std::string request_hash;
  std::string template_id;
  std::string response_text;
  nlohmann::json usage = nlohmann::json::object();
  std::string timestamp;

  bool operator==(const RawCompletion&) const = default;
};

// Content hash of (template id, rendered prompt, request-shaping config).
std::string request_hash(std::string_view template_id, std::string_view prompt,
                         const LlmConfig& config);

struct ChatRequest {
  std::string template_id;
  std::string prompt;
  LlmConfig config;
  std::string request_hash;
};

struct ChatReply {
  std::string text;
  nlohmann::json usage = nlohmann::json::object();
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatReply send(const ChatRequest& request) = 0;
};

// Serves fixtures keyed by request hash. Fixture directories hold one
// "<request_hash>.txt" file per response. An optional responder is consulted
// for hashes without a stored fixture.
class MockBackend : public ChatBackend {
 public:
  using Responder =
      std::function<std::optional<std::string>(std::string_view template_id, std::string_view prompt)>;

  MockBackend() = default;
  explicit MockBackend(Responder responder) : responder_(std::move(responder)) {}

  void add_fixture(std::string hash, std::string response);
  // Loads every *.txt file in dir; returns the number loaded.
  int load_dir(const std::string& dir);
  // Writes every stored fixture to dir as <hash>.txt.
  void write_dir(const std::string& dir) const;
  // Responses served so far, keyed by hash (includes responder output).
  std::map<std::string, std::string> served() const;

  ChatReply send(const ChatRequest& request) override;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> fixtures_;
  std::map<std::string, std::string> served_;
  Responder responder_;
};

// OpenAI-compatible chat completion over HTTP(S) with bounded retries on
// timeouts, 429 and 5xx.
class LiveBackend : public ChatBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit LiveBackend(std::optional<std::string> api_key = std::nullopt, Sleeper sleeper = {});

  ChatReply send(const ChatRequest& request) override;

  int attempts_made() const { return attempts_; }

 private:
  std::optional<std::string> api_key_;
  Sleeper sleeper_;
  int attempts_ = 0;
};

std::shared_ptr<ChatBackend> make_backend(const LlmConfig& config);

class Gateway {
 public:
  Gateway(LlmConfig config, std::shared_ptr<ChatBackend> backend);

  // Renders nothing; sends a two-message chat request for an already
  // rendered prompt and returns the verbatim response. The timestamp is left
  // for the caller to stamp.
  RawCompletion complete(std::string_view template_id, std::string_view prompt, Phase phase);

  const LlmConfig& config() const { return config_; }

 private:
  LlmConfig config_;
  std::shared_ptr<ChatBackend> backend_;
  std::unique_ptr<std::counting_semaphore<64>> in_flight_;
};

// ---- Response parsing ----------------------------------------------------

struct CandidateCode {
  std::string code_phrase;
  std::string passage;
  int page = 0;
  std::string rationale;

  bool operator==(const CandidateCode&) const = default;
};

struct GerundMapping {
  std::string verbatim_phrase;
  std::string gerund_label;
  std::string family_label;
  std::optional<std::string> matched_code_id;
  bool unmatched = false;

  bool operator==(const GerundMapping&) const = default;
};

struct ThemeProposal {
  std::string label;
  std::vector<std::string> family_labels;
  Dimension dimension = Dimension::kUnassigned;

  bool operator==(const ThemeProposal&) const = default;
};

template <typename T>
struct Parsed {
  std::vector<T> items;
  std::vector<std::string> warnings;
};

// Accepts "Code:/Passage:/Page:/Rationale:" entries (numbering and bold
// markers tolerated) or a Markdown table. Entries without a passage are
// dropped with a warning. Throws ParseError when a non-blank response holds
// no recognizable entry.
Parsed<CandidateCode> parse_code_entries(std::string_view response, const Page& page);

// With a code log, mappings are matched against active verbatim codes by
// normalized exact phrase; misses are flagged unmatched.
Parsed<GerundMapping> parse_gerund_mappings(std::string_view response,
                                            const CodeLog* log = nullptr);

Parsed<ThemeProposal> parse_theme_proposals(std::string_view response);

// Reference emitters in the requested response format.
std::string emit_code_entries(const std::vector<CandidateCode>& entries);
std::string emit_gerund_mappings(const std::vector<GerundMapping>& mappings);
std::string emit_theme_proposals(const std::vector<ThemeProposal>& proposals);

}  // namespace thematic

#endif  // THEMATIC_GATEWAY_H_
