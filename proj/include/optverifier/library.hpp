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

// Reference models used by the rule-based agents and the worked examples.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "optverifier/structure.hpp"

namespace optverifier {

inline constexpr double kModelMatchThreshold = 0.5;

struct LibraryEntry {
  std::string name;
  std::vector<std::string> keywords;
  std::string problem_type;
  std::string specific_type;
  NamedEntries subdivisions;
  std::string description;
  std::optional<double> ground_truth_objective;
  OptimizationModel model;
  // A flawed first formulation, when the entry demonstrates a repair.
  std::optional<OptimizationModel> initial_model;

  ProblemInstance Instance() const;
};

LibraryEntry LibraryEntryFromJson(const Json& doc);

class ModelLibrary {
 public:
  // The entries compiled from data/library.
  static const ModelLibrary& Builtin();
  static ModelLibrary FromDirectory(const std::filesystem::path& dir);
  explicit ModelLibrary(std::vector<LibraryEntry> entries = {});

  const std::vector<LibraryEntry>& entries() const { return entries_; }
  const LibraryEntry* Find(std::string_view name) const;
  const LibraryEntry& Get(std::string_view name) const;

  // Entry with the most keyword hits in `text`; nullptr when none hits.
  const LibraryEntry* MatchDescription(std::string_view text) const;
  // Entry whose declared symbols overlap most with the model's; the Jaccard
  // overlap must reach kModelMatchThreshold.
  const LibraryEntry* MatchModel(const OptimizationModel& model) const;

 private:
  std::vector<LibraryEntry> entries_;
};

// Low-level entries read off the model: one per constraint (name ->
// description) and one "Variable <symbol>" per decision variable.
NamedEntries ModelRequirements(const OptimizationModel& model);

ModelingStructure StructureFromModel(const OptimizationModel& model,
                                     std::string problem_type,
                                     std::string specific_type);

// Reference structure of an entry: its levels and subdivisions with the
// requirements of its correct model.
ModelingStructure ReferenceStructure(const LibraryEntry& entry);

}  // namespace optverifier
