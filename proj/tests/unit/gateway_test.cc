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
#include <chrono>
#include <filesystem>
#include <random>
#include <string>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "properties.h"
#include "test_util.h"
#include "thematic/gateway.h"

namespace thematic {
namespace {

using testutil::code_of;

Bindings p2_bindings(int page) {
  return {{"research_question", "How do students experience assessment?"},
          {"page_number", std::to_string(page)},
          {"text_segment", "Teacher: time was a big issue."}};
}

Page page(int n) {
  Page p;
  p.number = n;
  return p;
}

// Minimal chat-completion server whose replies follow a script of status codes.
class StubServer {
 public:
  explicit StubServer(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      const int i = hits_++;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      const int status = i < static_cast<int>(statuses_.size()) ? statuses_[i] : 200;
      res.status = status;
      if (status == 200) {
        res.set_content(
            R"({"choices":[{"message":{"role":"assistant","content":"stub reply"}}],)"
            R"("usage":{"total_tokens":7}})",
            "application/json");
      } else {
        res.set_content(R"({"error":"scripted"})", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int hits() const { return hits_; }
  const std::string& last_body() const { return last_body_; }
  const std::string& last_auth() const { return last_auth_; }

 private:
  std::vector<int> statuses_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::string last_body_;
  std::string last_auth_;
};

struct Live {
  LlmConfig config;
  std::vector<std::chrono::milliseconds> sleeps;
  std::shared_ptr<LiveBackend> backend;

  explicit Live(const StubServer& server) {
    config.backend = BackendKind::kLive;
    config.endpoint = server.endpoint();
    config.timeout_seconds = 5;
    backend = std::make_shared<LiveBackend>(
        "test-key", [this](std::chrono::milliseconds d) { sleeps.push_back(d); });
  }
};

TEST_SUITE("gateway") {
  TEST_CASE("config defaults and validation") {
    LlmConfig c;
    CHECK(c.temperature == 0.3);
    CHECK(c.max_tokens == 1000);
    CHECK(c.system_role == kDefaultSystemRole);
    CHECK(c.max_in_flight == 2);
    CHECK_NOTHROW(c.validate());
    c.temperature = 2.5;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::kInvalidArgument);
    c.temperature = 0.3;
    c.max_tokens = 0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::kInvalidArgument);
    c.max_tokens = 1000;
    c.phase_overrides["P3_DescriptivePattern"] = PhaseOverride{0.7, 1500};
    CHECK_NOTHROW(c.validate());
    CHECK(c.for_phase(Phase::kDescriptivePattern).temperature == 0.7);
    CHECK(c.for_phase(Phase::kDescriptivePattern).max_tokens == 1500);
    CHECK(c.for_phase(Phase::kExactKeyword).temperature == 0.3);
  }

  TEST_CASE("phase 2 prompt carries the page marker and instructions") {
    const std::string prompt = render_prompt(builtin_template("p2_extract"), p2_bindings(3));
    CHECK(prompt.find("Page 3") != std::string::npos);
    CHECK(prompt.find("most relevant inductively emerging codes") != std::string::npos);
    CHECK(prompt.find("word for word") != std::string::npos);
    CHECK(prompt.find("Teacher: time was a big issue.") != std::string::npos);
    CHECK(prompt.find('{') == std::string::npos);
    CHECK(prompt == render_prompt(builtin_template("p2_extract"), p2_bindings(3)));
  }

  TEST_CASE("unbound placeholders and literal braces") {
    Bindings b = p2_bindings(1);
    b.erase("research_question");
    CHECK(code_of([&] { render_prompt(builtin_template("p2_extract"), b); }) ==
          ErrorCode::kUnboundPlaceholder);
    const PromptTemplate t{"custom", Phase::kSetup, "{{literal}} {x}"};
    CHECK(render_prompt(t, {{"x", "{y}"}}) == "{literal} {y}");
    CHECK(code_of([&] { builtin_template("nope"); }) == ErrorCode::kInvalidArgument);
    for (const auto& id : builtin_template_ids()) CHECK(builtin_template(id).id == id);
  }

  TEST_CASE("request hash depends on template, prompt and config") {
    LlmConfig c;
    const std::string h = request_hash("p2_extract", "prompt", c);
    CHECK(h.size() == 64);
    CHECK(h == request_hash("p2_extract", "prompt", c));
    CHECK(h != request_hash("p1_segment", "prompt", c));
    CHECK(h != request_hash("p2_extract", "prompt.", c));
    c.temperature = 0.4;
    CHECK(h != request_hash("p2_extract", "prompt", c));
  }

  TEST_CASE("mock backend serves fixtures verbatim") {
    auto mock = std::make_shared<MockBackend>();
    Gateway gw(LlmConfig{}, mock);
    const std::string prompt = "Say something.";
    const std::string hash = request_hash("p1_narrative", prompt, LlmConfig{});
    mock->add_fixture(hash, "  verbatim\r\nreply  ");
    const RawCompletion r = gw.complete("p1_narrative", prompt, Phase::kFamiliarization);
    CHECK(r.response_text == "  verbatim\r\nreply  ");
    CHECK(r.request_hash == hash);
    CHECK(r.template_id == "p1_narrative");
    CHECK(code_of([&] { gw.complete("p1_narrative", "other", Phase::kFamiliarization); }) ==
          ErrorCode::kMockFixtureMissing);
  }

  TEST_CASE("phase overrides change the fixture key") {
    LlmConfig c;
    c.phase_overrides["P2_ExactKeyword"] = PhaseOverride{0.0, std::nullopt};
    auto mock = std::make_shared<MockBackend>();
    mock->add_fixture(request_hash("p2_extract", "x", c.for_phase(Phase::kExactKeyword)), "ok");
    Gateway gw(c, mock);
    CHECK(gw.complete("p2_extract", "x", Phase::kExactKeyword).response_text == "ok");
    CHECK(code_of([&] { gw.complete("p2_extract", "x", Phase::kFamiliarization); }) ==
          ErrorCode::kMockFixtureMissing);
  }

  TEST_CASE("fixture directory round trip") {
    testutil::TempDir dir;
    auto recording = std::make_shared<MockBackend>(
        [](std::string_view id, std::string_view prompt) -> std::optional<std::string> {
          return std::string(id) + ":" + std::string(prompt);
        });
    Gateway gw(LlmConfig{}, recording);
    gw.complete("p1_narrative", "a", Phase::kFamiliarization);
    gw.complete("p5_review", "b", Phase::kThemeReview);
    CHECK(recording->served().size() == 2);
    recording->write_dir(dir.str());
    auto replay = std::make_shared<MockBackend>();
    CHECK(replay->load_dir(dir.str()) == 2);
    Gateway gw2(LlmConfig{}, replay);
    CHECK(gw2.complete("p5_review", "b", Phase::kThemeReview).response_text == "p5_review:b");
    CHECK(code_of([&] { replay->load_dir(dir.file("missing")); }) == ErrorCode::kIoFailure);
    auto configured = make_backend(LlmConfig{.fixture_dir = dir.str()});
    CHECK(dynamic_cast<MockBackend*>(configured.get()) != nullptr);
  }

  TEST_CASE("in-flight requests are bounded") {
    class Slow : public ChatBackend {
     public:
      ChatReply send(const ChatRequest&) override {
        const int now = ++current;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        --current;
        return {"ok", nlohmann::json::object()};
      }
      std::atomic<int> current{0};
      std::atomic<int> peak{0};
    };
    auto slow = std::make_shared<Slow>();
    Gateway gw(LlmConfig{}, slow);
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
      threads.emplace_back([&] { gw.complete("p1_narrative", "x", Phase::kFamiliarization); });
    }
    for (auto& t : threads) t.join();
    CHECK(slow->peak.load() >= 1);
    CHECK(slow->peak.load() <= 2);
  }

  TEST_CASE("live backend retries 429 with exponential backoff") {
    StubServer server({429, 429, 200});
    Live live(server);
    Gateway gw(live.config, live.backend);
    const RawCompletion r = gw.complete("p1_narrative", "hello", Phase::kFamiliarization);
    CHECK(r.response_text == "stub reply");
    CHECK(r.usage["total_tokens"] == 7);
    CHECK(server.hits() == 3);
    CHECK(live.backend->attempts_made() == 3);
    REQUIRE(live.sleeps.size() == 2);
    CHECK(live.sleeps[0] == std::chrono::milliseconds(500));
    CHECK(live.sleeps[1] == std::chrono::milliseconds(1000));
    CHECK(server.last_auth() == "Bearer test-key");
    const auto body = nlohmann::json::parse(server.last_body());
    CHECK(body["model"] == "gpt-4-turbo");
    CHECK(body["temperature"] == 0.3);
    CHECK(body["max_tokens"] == 1000);
    REQUIRE(body["messages"].size() == 2);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][0]["content"] == kDefaultSystemRole);
    CHECK(body["messages"][1]["role"] == "user");
    CHECK(body["messages"][1]["content"] == "hello");
  }

  TEST_CASE("live backend gives up after three retries") {
    StubServer server({500, 502, 503, 504, 200});
    Live live(server);
    Gateway gw(live.config, live.backend);
    CHECK(code_of([&] { gw.complete("p1_narrative", "x", Phase::kFamiliarization); }) ==
          ErrorCode::kBackendUnavailable);
    CHECK(server.hits() == 4);
    CHECK(live.sleeps.size() == 3);
  }

  TEST_CASE("authentication failures are not retried") {
    StubServer server({401});
    Live live(server);
    Gateway gw(live.config, live.backend);
    CHECK(code_of([&] { gw.complete("p1_narrative", "x", Phase::kFamiliarization); }) ==
          ErrorCode::kAuthenticationFailure);
    CHECK(server.hits() == 1);
    CHECK(live.sleeps.empty());
    LlmConfig keyless = live.config;
    keyless.api_key_env = "THEMATIC_TEST_UNSET_KEY_VARIABLE";
    Gateway gw2(keyless, std::make_shared<LiveBackend>());
    CHECK(code_of([&] { gw2.complete("p1_narrative", "x", Phase::kFamiliarization); }) ==
          ErrorCode::kAuthenticationFailure);
  }

  TEST_CASE("unreachable endpoint is unavailable") {
    LlmConfig c;
    c.backend = BackendKind::kLive;
    c.endpoint = "http://127.0.0.1:9/v1/chat/completions";
    c.timeout_seconds = 1;
    c.max_retries = 1;
    auto backend = std::make_shared<LiveBackend>("k", [](std::chrono::milliseconds) {});
    Gateway gw(c, backend);
    CHECK(code_of([&] { gw.complete("p1_narrative", "x", Phase::kFamiliarization); }) ==
          ErrorCode::kBackendUnavailable);
    CHECK(backend->attempts_made() == 2);
  }

  TEST_CASE("code entries parse from the requested format") {
    const std::string response =
        "1. **Code:** Time pressure\n"
        "   **Passage:** \"time was a big issue.\"\n"
        "   **Page:** Page 2\n"
        "   **Rationale:** Constraint on delivery.\n\n"
        "2) Code: Handout\n"
        "   Passage: \xE2\x80\x9C" "Buy my handout.\xE2\x80\x9D\n"
        "   Rationale: coercion\n";
    const auto parsed = parse_code_entries(response, page(4));
    REQUIRE(parsed.items.size() == 2);
    CHECK(parsed.items[0] == CandidateCode{"Time pressure", "time was a big issue.", 2,
                                           "Constraint on delivery."});
    CHECK(parsed.items[1] == CandidateCode{"Handout", "Buy my handout.", 4, "coercion"});
    CHECK(parsed.warnings.empty());
  }

  TEST_CASE("entries without a passage are dropped with a warning") {
    const auto parsed = parse_code_entries(
        "1. Code: A\n   Passage: \"x y\"\n   Page: 1\n2. Code: B\n   Page: 1\n", page(1));
    REQUIRE(parsed.items.size() == 1);
    REQUIRE(parsed.warnings.size() == 1);
    CHECK(parsed.warnings[0].find("'B'") != std::string::npos);
  }

  TEST_CASE("code entries from a markdown table") {
    const std::string response =
        "| Code | Exact Sentence | Page | Rationale |\n"
        "|------|----------------|------|-----------|\n"
        "| **Time** | \"time was a big issue.\" | Page 1 | pressure |\n"
        "| Pipes | a \\| b | 2 | escaped |\n";
    const auto parsed = parse_code_entries(response, page(1));
    REQUIRE(parsed.items.size() == 2);
    CHECK(parsed.items[0] == CandidateCode{"Time", "time was a big issue.", 1, "pressure"});
    CHECK(parsed.items[1].passage == "a | b");
    CHECK(parsed.items[1].page == 2);
  }

  TEST_CASE("prose and empty responses") {
    CHECK(code_of([] { parse_code_entries("The teacher seems tired of it all.", page(1)); }) ==
          ErrorCode::kParseError);
    CHECK(parse_code_entries("  \n", page(1)).items.empty());
    CHECK(code_of([] { parse_gerund_mappings("just prose"); }) == ErrorCode::kParseError);
    CHECK(code_of([] { parse_theme_proposals("just prose"); }) == ErrorCode::kParseError);
  }

  TEST_CASE("gerund mappings from the three-column table") {
    const std::string response =
        "| Verbatim Expression (Phase 2) | Descriptive (Gerund-Based) Code | Emerging Category / "
        "Code Family |\n"
        "|---|---|---|\n"
        "| \"The ones I teach are not really challenging.\" | Experiencing lack of stimulation | "
        "Professional (dis)engagement |\n";
    const auto parsed = parse_gerund_mappings(response);
    REQUIRE(parsed.items.size() == 1);
    CHECK(parsed.items[0].verbatim_phrase == "The ones I teach are not really challenging.");
    CHECK(parsed.items[0].gerund_label == "Experiencing lack of stimulation");
    CHECK(parsed.items[0].family_label == "Professional (dis)engagement");
    CHECK_FALSE(parsed.items[0].unmatched);
  }

  TEST_CASE("gerund mappings are matched against active codes") {
    const Transcript t = ingest("The ones I teach are not really challenging.", "C");
    CodeLog log;
    log.transcript_id = t.id;
    new_verbatim_code(log, "The ones I teach are not really challenging.",
                      LocationRef::paragraphs(t.id, 1, 1), "", "", Origin::kAi);
    const std::string response =
        "1. Verbatim: \"The ones I teach  are not really challenging.\"\n"
        "   Gerund: Experiencing lack of stimulation\n   Family: Engagement\n"
        "2. Verbatim: \"Something never said.\"\n"
        "   Gerund: Inventing\n   Family: Engagement\n";
    const auto parsed = parse_gerund_mappings(response, &log);
    REQUIRE(parsed.items.size() == 2);
    CHECK(parsed.items[0].matched_code_id == std::optional<std::string>("V1"));
    CHECK(parsed.items[1].unmatched);
    CHECK(parsed.warnings.size() == 1);
    CHECK(parse_gerund_mappings("| Verbatim | Gerund | Family |\n|---|---|---|\n").items.empty());
  }

  TEST_CASE("theme proposals") {
    const auto parsed = parse_theme_proposals(
        "1. Theme: Misaligned professional placement\n"
        "   Families: Posting and allocation; Professional (dis)engagement\n"
        "   Dimension: Structural (systemic)\n"
        "2. Theme: Cost\n   Families: Workload demands\n   Dimension: cosmic\n");
    REQUIRE(parsed.items.size() == 2);
    CHECK(parsed.items[0].family_labels ==
          std::vector<std::string>{"Posting and allocation", "Professional (dis)engagement"});
    CHECK(parsed.items[0].dimension == Dimension::kStructural);
    CHECK(parsed.items[1].dimension == Dimension::kUnassigned);
    CHECK(parsed.warnings.size() == 1);
    const auto table = parse_theme_proposals(
        "| Theme | Code Families | Dimension |\n|--|--|--|\n| T | A; B | personal |\n");
    REQUIRE(table.items.size() == 1);
    CHECK(table.items[0] == ThemeProposal{"T", {"A", "B"}, Dimension::kPersonal});
  }

  TEST_CASE("emit and parse round-trip") {
    const auto a = props::code_entry_round_trip(300, 21);
    CHECK_MESSAGE(a.ok(), a.first());
    const auto b = props::gerund_mapping_round_trip(300, 22);
    CHECK_MESSAGE(b.ok(), b.first());
    const auto c = props::theme_proposal_round_trip(300, 23);
    CHECK_MESSAGE(c.ok(), c.first());
  }

  TEST_CASE("parsers are total over arbitrary text") {
    std::mt19937_64 rng(99);
    const std::string alphabet = "ab |:-*\"\n.1Pagecodepassage\xE2\x80\x9C";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int i = 0; i < 500; ++i) {
      std::string s;
      for (int k = std::uniform_int_distribution<int>(0, 120)(rng); k > 0; --k) {
        s.push_back(alphabet[pick(rng)]);
      }
      for (auto fn : {+[](const std::string& x) { parse_code_entries(x, page(1)); },
                      +[](const std::string& x) { parse_gerund_mappings(x); },
                      +[](const std::string& x) { parse_theme_proposals(x); }}) {
        try {
          fn(s);
        } catch (const Error& e) {
          CHECK(e.code() == ErrorCode::kParseError);
        }
      }
    }
  }
}

}  // namespace
}  // namespace thematic
