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

// Multi-level modeling structure: problem type (high), specific type
// (medium), and named low-level requirements.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optverifier/model.hpp"

namespace optverifier {

using NamedEntries = std::vector<std::pair<std::string, std::string>>;

struct ModelingStructure {
  enum class Origin { kDistilledFromDescription, kInterpretedFromModel };

  std::string problem_type;
  std::string specific_type;
  NamedEntries subdivisions;
  NamedEntries implicit_constraints;
  Origin provenance = Origin::kDistilledFromDescription;

  bool operator==(const ModelingStructure&) const = default;
};

struct LevelMismatch {
  std::string level;  // "high" or "medium"
  std::string reference;
  std::string candidate;
};

struct StructureDiff {
  std::vector<std::string> missing_low_level;
  std::vector<std::string> extra_low_level;
  std::vector<LevelMismatch> level_mismatch;
  double similarity = 1.0;

  std::string Render() const;
};

ModelingStructure ParseStructure(std::string_view json_text);
ModelingStructure StructureFromJson(const Json& doc);
Json StructureToJson(const ModelingStructure& structure);
std::string SerializeStructure(const ModelingStructure& structure);

// Lower-cased alphanumeric word set used for fuzzy name matching.
std::vector<std::string> NameTokens(std::string_view name);
double TokenJaccard(std::string_view a, std::string_view b);

inline constexpr double kNameMatchThreshold = 0.5;

// Compares low-level entries (implicit constraints) by one-to-one greedy
// matching on token Jaccard >= 0.5; high and medium levels use the same
// fuzzy test. similarity = matched / max(|ref|, |cand|), capped at 0.5 on
// any level mismatch.
StructureDiff DiffStructures(const ModelingStructure& reference,
                             const ModelingStructure& candidate);

}  // namespace optverifier
