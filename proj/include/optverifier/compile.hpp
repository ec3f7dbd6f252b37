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

// Grounding of indexed models into flat linear rows, LP-file emission,
// feasibility checking, and parameter binding.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optverifier/model.hpp"

namespace optverifier {

struct FlatVariable {
  std::string name;  // symbol with "_i_j" index suffix, 0-based
  std::string symbol;
  VarType type = VarType::kContinuous;
  double lower = 0.0;
  double upper = kInfinity;
};

using LinearTerms = std::map<size_t, double>;  // flat variable -> coefficient

struct LinearRow {
  std::string name;
  LinearTerms coefs;
  Relop relop = Relop::kLe;
  double rhs = 0.0;
};

struct LinearObjective {
  ObjectiveSense sense = ObjectiveSense::kMaximize;
  LinearTerms coefs;
  double constant = 0.0;
};

struct GroundedModel {
  std::vector<FlatVariable> variables;
  std::vector<LinearRow> rows;
  LinearObjective objective;
  std::vector<std::string> warnings;

  std::optional<size_t> FindVariable(std::string_view name) const;
  const LinearRow* FindRow(std::string_view name) const;
  double Evaluate(const LinearTerms& terms, const std::vector<double>& values) const;
};

// Parameter values supplied outside the model, keyed by symbol. Dimension
// names that are not parameters may be bound here as plain integers.
using Bindings = std::map<std::string, Json>;

GroundedModel Ground(const OptimizationModel& model, const Bindings& bindings = {});

// CPLEX-LP text: Maximize|Minimize, Subject To, Bounds, then Generals and
// Binaries when non-empty, End. Coefficients use 12 significant digits.
std::string EmitLp(const GroundedModel& grounded);

// Replaces characters outside [A-Za-z0-9_] with '_'.
std::string SanitizeName(std::string_view name);

std::string FormatNumber12(double value);

struct FeasibilityTolerances {
  double absolute = 1e-6;
  double relative = 1e-6;
  double integrality = 1e-5;
};

struct RowViolation {
  std::string row;
  double lhs = 0.0;
  Relop relop = Relop::kLe;
  double rhs = 0.0;
  double magnitude = 0.0;
};

struct VariableViolation {
  std::string variable;
  double value = 0.0;
  double magnitude = 0.0;
  std::string detail;
};

struct FeasibilityReport {
  std::vector<RowViolation> violated_rows;
  std::vector<VariableViolation> integrality_violations;
  std::vector<VariableViolation> bound_violations;
  bool feasible = true;
  double objective_recomputed = 0.0;

  std::string Render(size_t max_items = 20) const;
};

using Assignment = std::map<std::string, double>;

std::vector<double> AssignmentValues(const GroundedModel& grounded,
                                     const Assignment& assignment);

FeasibilityReport CheckFeasibility(const GroundedModel& grounded,
                                   const Assignment& assignment,
                                   const FeasibilityTolerances& tolerances = {});

struct ToyInstance {
  OptimizationModel model;
  Bindings bindings;
};

// Binds every external parameter to seeded synthetic data. Symbolic
// dimensions take `dim_overrides`, else min(nominal, 10). Values are
// integers in [1, 100]; parameters whose symbol mentions "Capacity" are set
// to 2x the mean demand load so instances are usually feasible.
ToyInstance InstantiateToy(const OptimizationModel& model, std::uint64_t seed,
                           const std::map<std::string, std::int64_t>& dim_overrides = {});

// Reads CSV (one column per 1-D parameter) or JSON ({symbol: value}) data
// for the model's external parameters.
Bindings LoadExternalParameters(const OptimizationModel& model,
                                const std::filesystem::path& data_path);

// Replaces external parameter values by their bindings.
OptimizationModel BindModel(const OptimizationModel& model, const Bindings& bindings);

}  // namespace optverifier
