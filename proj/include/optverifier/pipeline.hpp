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

// The verification pipeline: distill, formulate, structure loop, compile and
// solve, solution loop, accept. Every run yields a RunRecord; errors end the
// run with outcome "failed" instead of propagating.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optverifier/agents.hpp"
#include "optverifier/compile.hpp"
#include "optverifier/solve.hpp"

namespace optverifier {

struct PipelineConfig {
  int max_structure_rounds = 2;
  int max_solution_rounds = 2;
  int max_total_refinements = 6;
  int max_compile_retries = 2;
  // Re-run the structure loop after each solution-side refinement.
  bool strict_reverify = false;
  SolverConfig solver;
  FeasibilityTolerances tolerances;
  // Ground models with external parameters on a seeded synthetic instance.
  bool toy_instantiation = false;
  std::uint64_t toy_seed = 0;
  std::map<std::string, std::int64_t> toy_dims;
  // Data file for external parameters; used when toy instantiation is off.
  std::filesystem::path data_path;

  // Throws CONFIG_ERROR on negative budgets.
  void Check() const;
};

enum class Outcome { kAccepted, kBudgetExhausted, kFailed };
std::string_view OutcomeName(Outcome outcome);

inline constexpr std::string_view kLlmStages[] = {
    "distill", "formulate", "stru_interp", "stru_eval", "sol_interp", "sol_eval", "refine"};
bool IsLlmStage(std::string_view stage);

struct RunEvent {
  std::string stage;  // an LLM stage, "compile" or "solve"
  std::string detail;
  double started_at = 0.0;  // seconds since the run began
  double seconds = 0.0;
  int completions = 0;
  TokenUsage usage;
  std::string request_digest;
  std::string response_digest;
  std::vector<std::string> notes;
  Json payload = Json::object();
};

struct ModelVersion {
  int step = 0;  // 0 = initial model
  OptimizationModel model;
  std::string trigger;  // comment that caused the refinement
  std::string side;     // "structure", "compile", "solve" or "solution"
  bool no_change = false;
};

struct RunTotals {
  std::int64_t agent_calls = 0;  // events with an LLM stage label
  std::int64_t completions = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool estimated = false;
  double wall_time = 0.0;

  std::int64_t tokens() const { return prompt_tokens + completion_tokens; }
};

struct RunRecord {
  std::string instance_id;
  std::optional<ModelingStructure> structure;
  std::vector<RunEvent> events;
  std::vector<ModelVersion> models;
  std::optional<OptimizationModel> final_model;
  std::optional<Solution> final_solution;
  std::optional<bool> final_feasible;
  std::optional<Verdict> structure_verdict;
  std::optional<Verdict> solution_verdict;
  Outcome outcome = Outcome::kFailed;
  std::string error_code;
  std::string error;
  int refinements = 0;
  RunTotals totals;

  // Sums the events into `totals` (wall_time is left alone).
  void Recount();
};

// With `timing` false, timestamps, durations and wall times are omitted so
// that replayed runs serialize identically.
Json RunRecordToJson(const RunRecord& record, bool timing = true);

RunRecord RunPipeline(const ProblemInstance& d, AgentSuite& agents,
                      const PipelineConfig& config);

// Verification and refinement of a model produced elsewhere. Throws
// PRECONDITION when `m0` does not validate.
RunRecord VerifyAndRefine(const ProblemInstance& d, const OptimizationModel& m0,
                          AgentSuite& agents, const PipelineConfig& config);

std::string RenderRunReport(const RunRecord& record);

// Line-level summary of how `after` differs from `before`.
std::vector<std::string> DiffModels(const OptimizationModel& before,
                                    const OptimizationModel& after);

}  // namespace optverifier
