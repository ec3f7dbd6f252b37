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

#include "optverifier/agents.hpp"
#include "optverifier/compile.hpp"
#include "test_support.hpp"

namespace optverifier {
namespace {

using testing::LibraryModel;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

TEST(Verdict, ParsesLeadingYes) {
  EXPECT_EQ(ParseVerdict("Yes").score, 1);
  EXPECT_EQ(ParseVerdict("  yes, it matches.").score, 1);
  EXPECT_EQ(ParseVerdict("YES.").score, 1);
  EXPECT_EQ(ParseVerdict("Yes!\nAll good").score, 1);
}

TEST(Verdict, AnythingElseIsRejection) {
  Verdict v = ParseVerdict("No. The formulation misses flow conservation.");
  EXPECT_EQ(v.score, 0);
  EXPECT_EQ(v.comment, "No. The formulation misses flow conservation.");
  EXPECT_EQ(ParseVerdict("Yesterday it was fine").score, 0);
  EXPECT_EQ(ParseVerdict("I think yes").score, 0);
  EXPECT_FALSE(ParseVerdict("No").anomaly);
}

TEST(Verdict, EmptyReplyIsAnomaly) {
  Verdict v = ParseVerdict("  \n ");
  EXPECT_EQ(v.score, 0);
  EXPECT_TRUE(v.anomaly);
  EXPECT_FALSE(v.comment.empty());
}

ProblemInstance Instance(const std::string& name) {
  return ModelLibrary::Builtin().Get(name).Instance();
}

TEST(MockAgents, DistillMatchesLibrary) {
  MockAgents agents;
  auto s = agents.Distill(Instance("maxflow"));
  const auto& entry = ModelLibrary::Builtin().Get("maxflow");
  EXPECT_EQ(s.specific_type, entry.specific_type);
  EXPECT_EQ(s.provenance, ModelingStructure::Origin::kDistilledFromDescription);
  auto unknown = agents.Distill({"x", "Paint the fence blue.", {}, {}, {}});
  EXPECT_EQ(unknown.problem_type, "Unclassified");
}

TEST(MockAgents, FormulateReturnsInitialModel) {
  MockAgents agents;
  auto d = Instance("maxflow");
  auto s = agents.Distill(d);
  auto m = agents.Formulate(d, s);
  EXPECT_EQ(m, *ModelLibrary::Builtin().Get("maxflow").initial_model);
  EXPECT_EQ(m.provenance.kind, Provenance::Kind::kLlmFormulated);
}

TEST(MockAgents, StructureVerdictFollowsDiff) {
  MockAgents agents;
  auto d = Instance("maxflow");
  auto s = agents.Distill(d);
  auto m = agents.Formulate(d, s);
  auto interpreted = agents.InterpretStructure(m);
  EXPECT_EQ(interpreted.provenance, ModelingStructure::Origin::kInterpretedFromModel);
  Verdict v = agents.EvaluateStructure(s, interpreted, m);
  EXPECT_EQ(v.score, 0);
  EXPECT_NE(v.comment.find("Flow Conservation"), std::string::npos);

  RefineContext ctx;
  ctx.interpreted = interpreted;
  auto fixed = agents.Refine(d, s, m, v.comment, ctx);
  EXPECT_EQ(fixed.provenance.kind, Provenance::Kind::kRefined);
  EXPECT_EQ(fixed.provenance.step, 1);
  Verdict again = agents.EvaluateStructure(s, agents.InterpretStructure(fixed), fixed);
  EXPECT_EQ(again.score, 1);
  EXPECT_TRUE(again.comment.empty());
}

TEST(MockAgents, SolutionVerdictFollowsFeasibility) {
  MockAgents agents;
  auto d = Instance("fishery");
  auto s = agents.Distill(d);
  auto m = agents.Formulate(d, s);
  GroundedModel g = Ground(m);
  Solution x = BruteForceSolve(g);
  auto narrative = agents.InterpretSolution(d, s, m, x);
  EXPECT_FALSE(narrative.empty());
  EXPECT_EQ(agents.EvaluateSolution(d, s, m, x, narrative, CheckFeasibility(g, x.assignment)).score,
            1);
  FeasibilityReport bad;
  bad.feasible = false;
  Verdict v = agents.EvaluateSolution(d, s, m, x, narrative, bad);
  EXPECT_EQ(v.score, 0);
  EXPECT_FALSE(v.comment.empty());
}

TEST(AgentSuite, Preconditions) {
  MockAgents agents;
  auto d = Instance("fishery");
  auto s = agents.Distill(d);
  const auto& m = LibraryModel("fishery");
  EXPECT_EQ(CodeOf([&] { agents.Distill({"x", "   ", {}, {}, {}}); }), ErrorCode::kPrecondition);
  EXPECT_EQ(CodeOf([&] { agents.Refine(d, s, m, "  ", {}); }), ErrorCode::kPrecondition);
  Solution infeasible;
  infeasible.status = SolveStatus::kInfeasible;
  EXPECT_EQ(CodeOf([&] { agents.InterpretSolution(d, s, m, infeasible); }),
            ErrorCode::kPrecondition);
  ModelingStructure empty;
  EXPECT_EQ(CodeOf([&] { agents.Formulate(d, empty); }), ErrorCode::kPrecondition);
}

std::shared_ptr<Gateway> SimulatedGateway(std::vector<ChatRequest>* log = nullptr) {
  auto sim = std::make_shared<SimulatedBackend>();
  auto backend = std::make_shared<FunctionBackend>([sim, log](const ChatRequest& r) {
    if (log) log->push_back(r);
    return sim->Complete(r);
  });
  return std::make_shared<Gateway>(backend);
}

TEST(LlmAgents, DistillAndFormulateWithSimulatedModel) {
  std::vector<ChatRequest> log;
  LlmAgents agents(SimulatedGateway(&log));
  std::vector<AgentEvent> events;
  agents.SetEventSink([&](AgentEvent e) { events.push_back(std::move(e)); });
  auto d = Instance("knapsack");
  auto s = agents.Distill(d);
  EXPECT_EQ(s.specific_type, ModelLibrary::Builtin().Get("knapsack").specific_type);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].stage, "distill");
  EXPECT_EQ(events[0].completions, 4);
  EXPECT_EQ(events[0].request_digest.size(), 64u);

  auto m = agents.Formulate(d, s);
  EXPECT_TRUE(ValidateModel(m).valid());
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[1].detail, "parameters");
  EXPECT_EQ(events[2].detail, "model");
  // Every request opens with the system turn and alternates after it.
  for (const auto& r : log) {
    ASSERT_FALSE(r.messages.empty());
    EXPECT_EQ(r.messages.front().role, Role::kSystem);
    EXPECT_EQ(r.messages.back().role, Role::kUser);
  }
}

TEST(LlmAgents, InvalidModelIsReaskedThenRejected) {
  int calls = 0;
  auto backend = std::make_shared<FunctionBackend>([&](const ChatRequest&) {
    ++calls;
    return ChatResponse{
        "```json\n{\"parameters\": [], \"variables\": [], \"constraints\": "
        "[{\"name\": \"c\", \"description\": \"\", \"formulation\": \"Ghost <= 1\"}], "
        "\"objective\": [{\"description\": \"\", \"formulation\": \"Ghost\", "
        "\"objective_sense\": \"Maximize\"}]}\n```",
        {}};
  });
  LlmAgents agents(std::make_shared<Gateway>(backend));
  std::vector<AgentEvent> events;
  agents.SetEventSink([&](AgentEvent e) { events.push_back(std::move(e)); });
  ModelingStructure s;
  s.problem_type = "Integer programming";
  s.specific_type = "Knapsack";
  EXPECT_EQ(CodeOf([&] { agents.Formulate(Instance("knapsack"), s); }),
            ErrorCode::kAgentOutputInvalid);
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.back().stage, "formulate");
  bool noted = false;
  for (const auto& n : events.back().notes) noted |= n.rfind("error", 0) == 0;
  EXPECT_TRUE(noted);
  // Four formulation turns, the JSON request and one re-ask.
  EXPECT_EQ(calls, 6);
}

TEST(LlmAgents, NoJsonIsRejected) {
  auto backend = std::make_shared<FunctionBackend>(
      [](const ChatRequest&) { return ChatResponse{"I cannot help with that.", {}}; });
  LlmAgents agents(std::make_shared<Gateway>(backend));
  ModelingStructure s;
  s.problem_type = "A";
  s.specific_type = "B";
  ErrorCode code = CodeOf([&] { agents.Formulate(Instance("knapsack"), s); });
  EXPECT_TRUE(code == ErrorCode::kAgentOutputInvalid || code == ErrorCode::kNoJsonFound);
}

TEST(LlmAgents, StructureEvaluationReadsVerdict) {
  LlmAgents agents(SimulatedGateway());
  const auto& entry = ModelLibrary::Builtin().Get("maxflow");
  auto s = ReferenceStructure(entry);
  auto interpreted = agents.InterpretStructure(*entry.initial_model);
  Verdict v = agents.EvaluateStructure(s, interpreted, *entry.initial_model);
  EXPECT_EQ(v.score, 0);
  EXPECT_NE(v.comment.find("Flow Conservation"), std::string::npos);
}

TEST(SimulatedBackend, ReportsEstimatedUsage) {
  SimulatedBackend sim;
  ChatRequest r;
  r.messages = {{Role::kSystem, "You are helpful."}, {Role::kUser, "Hello there"}};
  auto resp = sim.Complete(r);
  EXPECT_TRUE(resp.usage.estimated);
  EXPECT_GT(resp.usage.prompt_tokens, 0);
}

}  // namespace
}  // namespace optverifier
