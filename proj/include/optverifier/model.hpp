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

// Optimization model data model, JSON schema, and validation.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "optverifier/formula.hpp"

namespace optverifier {

using Json = nlohmann::ordered_json;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarType { kContinuous, kInteger, kBinary };
enum class ObjectiveSense { kMaximize, kMinimize };

std::string_view VarTypeName(VarType type);
std::string_view SenseName(ObjectiveSense sense);

// A concrete extent or the name of a scalar parameter that supplies it.
using Dim = std::variant<std::int64_t, std::string>;

// Marker for parameter data that lives outside the model document.
struct ExternalRef {
  std::string source;
  std::string column;             // defaults to the parameter symbol
  std::optional<double> nominal;  // declared full-scale value, if any

  bool operator==(const ExternalRef&) const = default;
};

struct Parameter {
  std::string symbol;
  std::string definition;
  std::variant<Json, ExternalRef> value;
  std::vector<Dim> shape;

  bool IsExternal() const { return std::holds_alternative<ExternalRef>(value); }
  bool operator==(const Parameter&) const = default;
};

struct DecisionVariable {
  std::string symbol;
  std::string definition;
  VarType type = VarType::kContinuous;
  std::vector<Dim> shape;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;

  double EffectiveLower() const;
  double EffectiveUpper() const;
  bool operator==(const DecisionVariable&) const = default;
};

struct Constraint {
  std::string name;
  std::string description;
  std::string formulation;

  bool operator==(const Constraint&) const = default;
};

struct Objective {
  std::string description;
  std::string formulation;
  ObjectiveSense sense = ObjectiveSense::kMaximize;

  bool operator==(const Objective&) const = default;
};

struct Provenance {
  enum class Kind { kLlmFormulated, kExternallySupplied, kRefined, kPerturbed };
  Kind kind = Kind::kLlmFormulated;
  int step = 0;              // kRefined
  std::uint64_t seed = 0;    // kPerturbed
  std::string op;            // kPerturbed

  bool operator==(const Provenance&) const = default;
};

struct OptimizationModel {
  std::vector<Parameter> parameters;
  std::vector<DecisionVariable> variables;
  std::vector<Constraint> constraints;
  std::optional<Objective> objective;
  Provenance provenance;

  SymbolKinds Kinds() const;
  const Parameter* FindParameter(std::string_view symbol) const;
  const DecisionVariable* FindVariable(std::string_view symbol) const;
  bool HasExternalParameters() const;

  bool operator==(const OptimizationModel&) const = default;
};

struct ProblemInstance {
  std::string id;
  std::string description;
  std::optional<double> ground_truth_objective;
  std::optional<std::string> difficulty;
  std::optional<std::string> category;
};

enum class ViolationCode {
  kUndeclaredSymbol,
  kDuplicateSymbol,
  kShapeMismatch,
  kBadBounds,
  kParseError,
  kNoObjective,
};

std::string_view ViolationCodeName(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  bool valid() const { return violations.empty(); }
  bool Has(ViolationCode code) const;
  std::string Render() const;
};

ValidationReport ValidateModel(const OptimizationModel& model);

// Parses the canonical model document. Unknown keys are skipped and noted in
// `warnings` when it is non-null.
OptimizationModel ParseModelJson(std::string_view text,
                                 std::vector<std::string>* warnings = nullptr);
OptimizationModel ModelFromJson(const Json& doc,
                                std::vector<std::string>* warnings = nullptr);
Json ModelToJson(const OptimizationModel& model);
std::string SerializeModel(const OptimizationModel& model);

std::set<std::string> ModelFreeSymbols(const OptimizationModel& model);

Json ProvenanceToJson(const Provenance& provenance);

}  // namespace optverifier
