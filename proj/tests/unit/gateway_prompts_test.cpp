// Copyright 2026 The OptVerifier Authors
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

#include <gtest/gtest.h>

#include <filesystem>

#include "optverifier/gateway.hpp"
#include "optverifier/prompts.hpp"
#include "test_support.hpp"

namespace optverifier {
namespace {

ChatRequest Req(std::string user, std::string model = "m") {
  ChatRequest r;
  r.model_name = std::move(model);
  r.messages = {{Role::kSystem, "sys"}, {Role::kUser, std::move(user)}};
  return r;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

TEST(Gateway, Sha256KnownVector) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Gateway, FingerprintCollapsesWhitespace) {
  EXPECT_EQ(Fingerprint(Req("a  b\n c")), Fingerprint(Req("a b c")));
  EXPECT_NE(Fingerprint(Req("a b c")), Fingerprint(Req("a b d")));
  EXPECT_NE(Fingerprint(Req("x", "m1")), Fingerprint(Req("x", "m2")));
  ChatRequest swapped = Req("sys");
  swapped.messages = {{Role::kUser, "sys"}, {Role::kUser, "sys"}};
  EXPECT_NE(Fingerprint(swapped), Fingerprint(Req("sys")));
}

TEST(Gateway, ReplayHitAndMiss) {
  Cassette c;
  EXPECT_TRUE(c.Add({Fingerprint(Req("hello")), {"world", {3, 1, false}}}));
  EXPECT_FALSE(c.Add({Fingerprint(Req("hello")), {"again", {}}}));
  ReplayBackend replay(c);
  EXPECT_EQ(replay.Complete(Req("hello")).content, "world");
  EXPECT_EQ(CodeOf([&] { replay.Complete(Req("other")); }), ErrorCode::kReplayMiss);
}

TEST(Gateway, RecordThenReplay) {
  auto path = std::filesystem::temp_directory_path() / "optverifier_record_test.jsonl";
  std::filesystem::remove(path);
  int calls = 0;
  auto inner = std::make_shared<FunctionBackend>([&](const ChatRequest& r) {
    ++calls;
    return ChatResponse{"echo:" + r.messages.back().content, EstimateUsage(r, "x")};
  });
  {
    RecordingBackend rec(inner, path, "m");
    EXPECT_EQ(rec.Complete(Req("one")).content, "echo:one");
    EXPECT_EQ(rec.Complete(Req("one")).content, "echo:one");
    EXPECT_EQ(rec.Complete(Req("two")).content, "echo:two");
  }
  EXPECT_EQ(calls, 2);
  Cassette loaded = Cassette::Load(path);
  EXPECT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded.metadata().value("model_name", ""), "m");
  ReplayBackend replay(loaded);
  EXPECT_EQ(replay.Complete(Req("two")).content, "echo:two");
  std::filesystem::remove(path);
}

TEST(Gateway, RetriesTransportErrors) {
  int calls = 0;
  auto flaky = std::make_shared<FunctionBackend>([&](const ChatRequest&) -> ChatResponse {
    if (++calls < 3) throw Error(ErrorCode::kTransportError, "reset");
    return {"ok", {}};
  });
  std::vector<double> slept;
  GatewayConfig cfg;
  cfg.sleep = [&](double s) { slept.push_back(s); };
  Gateway gw(flaky, cfg);
  EXPECT_EQ(gw.Complete({{Role::kUser, "hi"}}).content, "ok");
  EXPECT_EQ(calls, 3);
  EXPECT_EQ(slept, (std::vector<double>{0.5, 1.0}));
}

TEST(Gateway, GivesUpAfterMaxRetries) {
  int calls = 0;
  auto down = std::make_shared<FunctionBackend>([&](const ChatRequest&) -> ChatResponse {
    ++calls;
    throw Error(ErrorCode::kTransportError, "down");
  });
  GatewayConfig cfg;
  cfg.max_retries = 2;
  cfg.sleep = [](double) {};
  Gateway gw(down, cfg);
  EXPECT_EQ(CodeOf([&] { gw.Complete({{Role::kUser, "hi"}}); }), ErrorCode::kTransportError);
  EXPECT_EQ(calls, 3);
}

TEST(Gateway, AuthErrorsAreNotRetried) {
  int calls = 0;
  auto denied = std::make_shared<FunctionBackend>([&](const ChatRequest&) -> ChatResponse {
    ++calls;
    throw Error(ErrorCode::kAuthError, "no");
  });
  GatewayConfig cfg;
  cfg.sleep = [](double) {};
  Gateway gw(denied, cfg);
  EXPECT_EQ(CodeOf([&] { gw.Complete({{Role::kUser, "hi"}}); }), ErrorCode::kAuthError);
  EXPECT_EQ(calls, 1);
}

TEST(Gateway, LiveBackendWithoutKey) {
  LiveBackend live(LiveConfig{});
  EXPECT_EQ(CodeOf([&] { live.Complete(Req("x")); }), ErrorCode::kAuthError);
}

TEST(Gateway, ExtractJson) {
  EXPECT_EQ(ExtractJsonBlock("text\n```json\n{\"a\": 1}\n```\nmore")["a"], 1);
  EXPECT_EQ(ExtractJsonBlock("The answer is {\"a\": {\"b\": \"}\"}} ok")["a"]["b"], "}");
  EXPECT_EQ(CodeOf([] { ExtractJsonBlock("no json here {oops"); }), ErrorCode::kNoJsonFound);
  auto blocks = ExtractJsonBlocks("```json\n[1]\n```\n```json\nbad\n```\n```json\n{}\n```");
  EXPECT_EQ(blocks.size(), 2u);
}

TEST(Gateway, ParsesCompletionBody) {
  Json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "hi"}}}}}},
               {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 3}}}};
  ChatResponse r = ParseChatCompletion(Req("q"), body);
  EXPECT_EQ(r.content, "hi");
  EXPECT_EQ(r.usage.prompt_tokens, 12);
  EXPECT_FALSE(r.usage.estimated);
  body.erase("usage");
  EXPECT_TRUE(ParseChatCompletion(Req("q"), body).usage.estimated);
  EXPECT_EQ(CodeOf([&] { ParseChatCompletion(Req("q"), Json::object()); }),
            ErrorCode::kTransportError);
}

TEST(Gateway, UsageTotals) {
  auto totals = SumUsage({{"distill", {10, 2, false}},
                          {"distill", {5, 1, false}},
                          {"refine", {7, 3, true}}});
  EXPECT_EQ(totals.calls, 3);
  EXPECT_EQ(totals.total_tokens(), 28);
  EXPECT_TRUE(totals.estimated);
  EXPECT_EQ(totals.by_stage.at("distill").calls, 2);
  EXPECT_EQ(totals.by_stage.at("distill").total_tokens(), 18);
  EXPECT_FALSE(totals.by_stage.at("distill").estimated);
}

TEST(Prompts, BuiltinSetsUseKnownPlaceholders) {
  const auto& known = KnownPlaceholders();
  for (auto id : {PromptSetId::kDsl, PromptSetId::kLatex}) {
    PromptSet set = PromptSet::Builtin(id);
    for (const char* name :
         {"interpretation", "formulation", "modification", "solution", "model_json", "reask"}) {
      const auto& t = set.Get(name);
      EXPECT_FALSE(t.turns.empty()) << name;
      for (const auto& turn : t.turns) {
        for (const auto& ph : TemplatePlaceholders(turn)) {
          EXPECT_NE(std::find(known.begin(), known.end(), ph), known.end()) << ph;
        }
      }
    }
  }
  EXPECT_EQ(PromptSet::Builtin(PromptSetId::kDsl).Get("interpretation").turns.size(), 5u);
}

TEST(Prompts, RenderSubstitutesKnownNamesOnly) {
  EXPECT_EQ(RenderTemplate("P: {problem} {{x}} {\"k\": 1}", {{"problem", "knap"}}),
            "P: knap {x} {\"k\": 1}");
  EXPECT_EQ(CodeOf([] { RenderTemplate("{problem}", {}); }), ErrorCode::kPrecondition);
}

TEST(Prompts, ParseTemplateSplitsTurns) {
  auto t = ParseTemplate("t", "first\nline\n<<<TURN>>>\nsecond");
  ASSERT_EQ(t.turns.size(), 2u);
  EXPECT_EQ(t.turns[0], "first\nline");
  EXPECT_EQ(t.turns[1], "second");
}

TEST(Prompts, PromptSetNames) {
  EXPECT_EQ(ParsePromptSet("dsl"), PromptSetId::kDsl);
  EXPECT_EQ(ParsePromptSet(PromptSetName(PromptSetId::kLatex)), PromptSetId::kLatex);
  EXPECT_FALSE(ParsePromptSet("nope").has_value());
}

TEST(Prompts, BaseFormulationLookup) {
  EXPECT_NE(LookupBaseFormulation("a traveling salesman tour"), "none available");
  EXPECT_EQ(LookupBaseFormulation("zzz"), "none available");
}

TEST(Prompts, RenderFormulationListsConstraints) {
  const auto& m = testing::LibraryModel("fishery");
  std::string text = RenderFormulation(m);
  for (const auto& c : m.constraints) {
    EXPECT_NE(text.find(c.name), std::string::npos) << c.name;
  }
  EXPECT_NE(DslGrammarText().find("forall"), std::string::npos);
}

}  // namespace
}  // namespace optverifier
