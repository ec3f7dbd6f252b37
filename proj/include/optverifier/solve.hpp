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

// Solver backends: an external MILP solver driven through LP files, and an
// exhaustive enumeration oracle for small pure-integer models.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "optverifier/compile.hpp"

namespace optverifier {

enum class SolveStatus { kOptimal, kFeasible, kInfeasible, kUnbounded, kError };

std::string_view SolveStatusName(SolveStatus status);
std::optional<SolveStatus> ParseSolveStatus(std::string_view text);

struct Solution {
  SolveStatus status = SolveStatus::kError;
  Assignment assignment;
  std::optional<double> objective_value;
  std::string solver_id;
  double wall_time_seconds = 0.0;
  std::string message;
};

enum class SolutionFormat { kGenericJson, kCbcSol };

struct ExternalSolverConfig {
  std::string command;
  std::vector<std::string> args;  // "{lp}" and "{sol}" are substituted
  SolutionFormat format = SolutionFormat::kGenericJson;
  double timeout_seconds = 60.0;
  std::string solver_id = "external";
};

enum class SolverBackend { kAuto, kExternal, kBruteForce };

struct SolverConfig {
  SolverBackend backend = SolverBackend::kAuto;
  ExternalSolverConfig external;
  double brute_force_cap = 1e7;
  // Auto mode enumerates only below this many points, else goes external.
  double auto_enumeration_cap = 1e5;
};

// The bundled adapter: python3 running tools/highs_solve.py.
ExternalSolverConfig DefaultExternalSolver();

// Resolves `command` on PATH (or as a path). Returns nullopt when missing.
std::optional<std::filesystem::path> FindExecutable(const std::string& command);

Solution Solve(const GroundedModel& grounded, const SolverConfig& config);

// {"status", "objective", "solver_id", "values", "message"} plus
// "wall_time_seconds" when `timing` is set.
Json SolutionToJson(const Solution& solution, bool timing = true);
Solution SolveExternal(const GroundedModel& grounded, const ExternalSolverConfig& config);

// Enumerates every integer point after implied-bound tightening. Ties keep
// the lexicographically smallest assignment in flat-variable order.
Solution BruteForceSolve(const GroundedModel& grounded, double cap = 1e7);

// Whether BruteForceSolve would accept the model.
bool BruteForceApplicable(const GroundedModel& grounded, double cap = 1e7);

Solution ParseGenericJsonSolution(std::string_view text, const GroundedModel& grounded);
Solution ParseCbcSolution(std::string_view text, const GroundedModel& grounded);

}  // namespace optverifier
