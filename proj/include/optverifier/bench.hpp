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

// Benchmark harness: datasets, solving accuracy, model perturbations, the
// verifier precision/recall study, a tour-enumeration oracle for small TSPs,
// and efficiency tables.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "optverifier/agents.hpp"
#include "optverifier/library.hpp"
#include "optverifier/pipeline.hpp"

namespace optverifier {

// ---- datasets --------------------------------------------------------------

// JSON Lines: {"id", "description", "ground_truth_objective"?, "difficulty"?,
// "category"?}. Blank lines are skipped. Throws MALFORMED_LINE naming the line.
std::vector<ProblemInstance> ParseDataset(std::string_view text);
std::vector<ProblemInstance> LoadDataset(const std::filesystem::path& path);

// ---- solving accuracy ------------------------------------------------------

struct BenchResult {
  std::string id;
  std::string dataset = "default";
  std::string difficulty;
  std::optional<double> truth;
  std::optional<double> predicted;
  std::string status;   // solve status of the final solution, "" if none
  std::string outcome;  // pipeline outcome
  std::int64_t agent_calls = 0;
  std::int64_t tokens = 0;
  double seconds = 0.0;
};

BenchResult MakeBenchResult(const ProblemInstance& instance, const RunRecord& record);

// correct iff outcome accepted, status optimal and
// |pred - truth| <= max(tol_abs, tol_rel * |truth|).
bool IsCorrect(const BenchResult& result, double tol_rel = 1e-4, double tol_abs = 1e-6);

struct GroupStats {
  std::int64_t instances = 0;
  std::int64_t with_truth = 0;
  std::int64_t correct = 0;
  std::optional<double> sa;  // correct / with_truth; empty when no truth
  double mean_seconds = 0.0;
  double mean_agent_calls = 0.0;
  double mean_tokens = 0.0;
};

struct ScoredResult {
  BenchResult result;
  std::optional<bool> correct;  // empty without truth
};

struct BenchReport {
  std::vector<ScoredResult> instances;
  GroupStats overall;
  std::map<std::string, GroupStats> by_dataset;
  std::map<std::string, GroupStats> by_difficulty;
  // Micro: pooled over instances. Macro: mean of per-dataset SA.
  std::optional<double> micro_sa;
  std::optional<double> macro_sa;
  std::vector<std::string> without_truth;

  Json ToJson(bool timing = false) const;
  std::string ToMarkdown() const;
};

BenchReport ScoreSolvingAccuracy(const std::vector<BenchResult>& results, double tol_rel = 1e-4,
                                 double tol_abs = 1e-6);

using AgentFactory = std::function<std::unique_ptr<AgentSuite>()>;

// Runs the pipeline on every instance with at most `jobs` concurrent runs.
// Records come back in input order.
std::vector<RunRecord> RunBench(const std::vector<ProblemInstance>& instances,
                                const AgentFactory& make_agents, const PipelineConfig& config,
                                int jobs = 1);

// ---- perturbations ---------------------------------------------------------

enum class PerturbOp {
  kDropConstraint,
  kDropVariable,
  kFlipRelop,
  kScaleRhs,
  kDropSumGuard,
  kFlipVarType,
};
std::string_view PerturbOpName(PerturbOp op);
std::optional<PerturbOp> ParsePerturbOp(std::string_view name);
const std::vector<PerturbOp>& AllPerturbOps();

struct PerturbationSpec {
  std::uint64_t seed = 7;
  int k = 9;
  std::vector<PerturbOp> ops = AllPerturbOps();
};

// One random application of `op`; nullopt when the model offers no site.
std::optional<OptimizationModel> ApplyPerturbation(const OptimizationModel& model, PerturbOp op,
                                                   std::mt19937_64& rng);

// k pairwise-distinct valid perturbations, each differing from `model`.
// Throws PRECONDITION for an invalid model or spec, PERTURBATION_EXHAUSTED
// when a slot takes more than 100 draws.
std::vector<OptimizationModel> PerturbModel(const OptimizationModel& model,
                                            const PerturbationSpec& spec);

// ---- verifier study --------------------------------------------------------

struct StudyPositive {
  std::string id;
  std::string difficulty;
  std::string description;
  OptimizationModel model;
  ModelingStructure truth;
};

// Random small production-planning MILPs, `per_difficulty` each for easy,
// medium and hard. Deterministic for a seed.
std::vector<StudyPositive> SyntheticPositives(int per_difficulty, std::uint64_t seed);

StudyPositive PositiveFromEntry(const LibraryEntry& entry, std::string difficulty);

// Library whose entries are the positives, for the rule-based agents.
ModelLibrary LibraryFromPositives(const std::vector<StudyPositive>& positives);

struct Confusion {
  std::int64_t tp = 0;  // perturbed and flagged
  std::int64_t fp = 0;  // original and flagged
  std::int64_t fn = 0;  // perturbed and passed
  std::int64_t tn = 0;  // original and passed
  std::int64_t abstain = 0;

  void Add(bool perturbed, bool flagged);
  std::optional<double> precision() const;
  std::optional<double> recall() const;
};

struct StratumMetrics {
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
  Confusion structure;
  Confusion solution;
  Confusion combined;
  std::map<std::string, Confusion> structure_by_op;
  std::map<std::string, Confusion> solution_by_op;

  std::int64_t samples() const { return positives + negatives; }
};

struct StudyOptions {
  PerturbationSpec spec;
  bool solution_side = true;
  SolverConfig solver;
  FeasibilityTolerances tolerances;
};

struct StudyReport {
  std::map<std::string, StratumMetrics> strata;  // keyed by difficulty
  StratumMetrics overall;

  Json ToJson() const;
  std::string ToMarkdown() const;
};

// The positive class is "incorrect model detected": a sample counts as
// flagged when the evaluator scores it 0 (or, on the solution side, when the
// solver finds it infeasible or unbounded).
StudyReport VerifierStudy(const std::vector<StudyPositive>& positives, AgentSuite& agents,
                          const StudyOptions& options = {});

// ---- oracles and tables ----------------------------------------------------

struct TourResult {
  double cost = 0.0;
  std::vector<int> tour;  // 0-based, starts at city 0, closing edge implied
};

// Exhaustive search over tours from city 0; ties go to the lexicographically
// smallest tour. Throws TOO_LARGE above 10 cities.
TourResult TspTourOracle(const std::vector<std::vector<double>>& cost);

// Markdown table of per-dataset means (time, agent calls, tokens) followed by
// per-stage mean tokens. `datasets` labels each record; empty means "all".
std::string EfficiencyTable(const std::vector<RunRecord>& records,
                            const std::vector<std::string>& datasets = {});

}  // namespace optverifier
