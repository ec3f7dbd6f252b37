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

#include "optverifier/pipeline.hpp"
#include "test_support.hpp"

namespace optverifier {
namespace {

using testing::LibraryModel;

ProblemInstance Instance(const std::string& name) {
  return ModelLibrary::Builtin().Get(name).Instance();
}

PipelineConfig BruteConfig() {
  PipelineConfig c;
  c.solver.backend = SolverBackend::kBruteForce;
  return c;
}

bool HaveExternalSolver() { return FindExecutable(DefaultExternalSolver().command).has_value(); }

TEST(Pipeline, KnapsackHappyPath) {
  MockAgents agents;
  RunRecord r = RunPipeline(Instance("knapsack"), agents, BruteConfig());
  EXPECT_EQ(r.outcome, Outcome::kAccepted) << r.error;
  ASSERT_TRUE(r.final_solution.has_value());
  EXPECT_NEAR(*r.final_solution->objective_value, 48.0, 1e-9);
  EXPECT_EQ(r.refinements, 0);
  EXPECT_EQ(r.totals.agent_calls, 7);
  ASSERT_EQ(r.models.size(), 1u);
  EXPECT_EQ(r.models[0].step, 0);
  EXPECT_TRUE(r.final_feasible.value_or(false));
}

TEST(Pipeline, StageOrder) {
  MockAgents agents;
  RunRecord r = RunPipeline(Instance("fishery"), agents, BruteConfig());
  std::vector<std::string> stages;
  for (const auto& e : r.events) stages.push_back(e.stage);
  EXPECT_EQ(stages, (std::vector<std::string>{"distill", "formulate", "formulate", "stru_interp", "stru_eval",
                                              "compile", "solve", "sol_interp", "sol_eval"}));
}

TEST(Pipeline, MaxflowNeedsOneStructureRefinement) {
  if (!HaveExternalSolver()) GTEST_SKIP() << "no external solver";
  MockAgents agents;
  RunRecord r = RunPipeline(Instance("maxflow"), agents, PipelineConfig{});
  EXPECT_EQ(r.outcome, Outcome::kAccepted) << r.error;
  EXPECT_EQ(r.refinements, 1);
  ASSERT_EQ(r.models.size(), 2u);
  EXPECT_EQ(r.models[1].side, "structure");
  EXPECT_NE(r.models[1].trigger.find("Flow Conservation"), std::string::npos);
  EXPECT_NEAR(*r.final_solution->objective_value, 36.0, 1e-6);
}

TEST(Pipeline, ZeroBudgetsExhaust) {
  MockAgents agents;
  PipelineConfig c = BruteConfig();
  c.max_structure_rounds = 0;
  c.max_solution_rounds = 0;
  c.max_total_refinements = 0;
  RunRecord r = RunPipeline(Instance("maxflow"), agents, c);
  EXPECT_EQ(r.outcome, Outcome::kBudgetExhausted);
  EXPECT_EQ(r.refinements, 0);
  EXPECT_FALSE(r.final_solution.has_value());
  ASSERT_TRUE(r.structure_verdict.has_value());
  EXPECT_EQ(r.structure_verdict->score, 0);
}

TEST(Pipeline, NegativeBudgetIsConfigError) {
  PipelineConfig c;
  c.max_compile_retries = -1;
  try {
    c.Check();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
}

TEST(Pipeline, UnboundedModelIsRefinedOnSolutionSide) {
  if (!HaveExternalSolver()) GTEST_SKIP() << "no external solver";
  OptimizationModel m0 = LibraryModel("fishery");
  // Same constraint names, but the budget row now points the wrong way.
  m0.constraints[0].formulation =
      "CostPerSledDogTrip * NumberOfSledDogTrips + CostPerTruckTrip * NumberOfTruckTrips "
      ">= TotalBudget";
  ASSERT_TRUE(ValidateModel(m0).valid());
  MockAgents agents;
  RunRecord r = VerifyAndRefine(Instance("fishery"), m0, agents, PipelineConfig{});
  EXPECT_EQ(r.outcome, Outcome::kAccepted) << r.error;
  ASSERT_GE(r.models.size(), 2u);
  EXPECT_EQ(r.models[1].side, "solve");
  EXPECT_NEAR(*r.final_solution->objective_value, 3000.0, 1e-6);
  EXPECT_EQ(r.models[0].model.provenance.kind, Provenance::Kind::kExternallySupplied);
}

TEST(Pipeline, InvalidInitialModelRejected) {
  OptimizationModel m0 = LibraryModel("fishery");
  m0.constraints[0].formulation = "Ghost <= 3";
  MockAgents agents;
  try {
    VerifyAndRefine(Instance("fishery"), m0, agents, BruteConfig());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(Pipeline, TotalsEqualEventSums) {
  MockAgents agents;
  RunRecord r = RunPipeline(Instance("knapsack"), agents, BruteConfig());
  std::int64_t calls = 0, completions = 0, prompt = 0, completion = 0;
  for (const auto& e : r.events) {
    if (!IsLlmStage(e.stage)) continue;
    ++calls;
    completions += e.completions;
    prompt += e.usage.prompt_tokens;
    completion += e.usage.completion_tokens;
  }
  EXPECT_EQ(r.totals.agent_calls, calls);
  EXPECT_EQ(r.totals.completions, completions);
  EXPECT_EQ(r.totals.prompt_tokens, prompt);
  EXPECT_EQ(r.totals.completion_tokens, completion);
}

TEST(Pipeline, RecordJsonWithoutTimingIsStable) {
  MockAgents a1, a2;
  auto r1 = RunPipeline(Instance("knapsack"), a1, BruteConfig());
  auto r2 = RunPipeline(Instance("knapsack"), a2, BruteConfig());
  EXPECT_EQ(RunRecordToJson(r1, false).dump(), RunRecordToJson(r2, false).dump());
}

TEST(Pipeline, ReportMentionsOutcome) {
  MockAgents agents;
  auto r = RunPipeline(Instance("knapsack"), agents, BruteConfig());
  std::string text = RenderRunReport(r);
  EXPECT_NE(text.find("accepted"), std::string::npos);
  EXPECT_FALSE(RenderRunReport(RunRecord{}).empty());
}

TEST(Pipeline, FailedRunKeepsErrorCode) {
  MockAgents agents;
  PipelineConfig c = BruteConfig();
  RunRecord r = RunPipeline(Instance("tsp"), agents, c);  // brute force cannot do MTZ
  EXPECT_EQ(r.outcome, Outcome::kFailed);
  EXPECT_FALSE(r.error_code.empty());
}

TEST(Pipeline, DiffModelsNamesChanges) {
  const auto& entry = ModelLibrary::Builtin().Get("maxflow");
  auto lines = DiffModels(*entry.initial_model, entry.model);
  ASSERT_FALSE(lines.empty());
  bool found = false;
  for (const auto& l : lines) found |= l.find("Flow Conservation") != std::string::npos;
  EXPECT_TRUE(found);
  EXPECT_TRUE(DiffModels(entry.model, entry.model).empty());
}

}  // namespace
}  // namespace optverifier
