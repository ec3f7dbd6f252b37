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

#include "optverifier/library.hpp"
#include "optverifier/model.hpp"
#include "optverifier/structure.hpp"
#include "test_support.hpp"

namespace optverifier {
namespace {

using testing::LibraryModel;

TEST(Model, LibraryModelsValidate) {
  for (const auto& entry : ModelLibrary::Builtin().entries()) {
    auto report = ValidateModel(entry.model);
    EXPECT_TRUE(report.valid()) << entry.name << "\n" << report.Render();
  }
}

TEST(Model, JsonRoundTripPreservesModel) {
  for (const auto& entry : ModelLibrary::Builtin().entries()) {
    std::string text = SerializeModel(entry.model);
    OptimizationModel back = ParseModelJson(text);
    EXPECT_EQ(back, entry.model) << entry.name;
    EXPECT_EQ(SerializeModel(back), text);
  }
}

TEST(Model, UndeclaredSymbolReported) {
  OptimizationModel m = LibraryModel("fishery");
  m.constraints.push_back({"Extra", "", "Ghost + NumberOfTruckTrips <= 4"});
  auto report = ValidateModel(m);
  EXPECT_FALSE(report.valid());
  EXPECT_TRUE(report.Has(ViolationCode::kUndeclaredSymbol));
}

TEST(Model, DuplicateSymbolReported) {
  OptimizationModel m = LibraryModel("fishery");
  m.variables.push_back(m.variables.front());
  EXPECT_TRUE(ValidateModel(m).Has(ViolationCode::kDuplicateSymbol));
}

TEST(Model, InvertedBoundsReported) {
  OptimizationModel m = LibraryModel("fishery");
  m.variables[0].lower_bound = 5;
  m.variables[0].upper_bound = 1;
  EXPECT_TRUE(ValidateModel(m).Has(ViolationCode::kBadBounds));
}

TEST(Model, MissingObjectiveReported) {
  OptimizationModel m = LibraryModel("fishery");
  m.objective.reset();
  EXPECT_TRUE(ValidateModel(m).Has(ViolationCode::kNoObjective));
}

TEST(Model, ParseErrorReportedPerConstraint) {
  OptimizationModel m = LibraryModel("fishery");
  m.constraints[0].formulation = "NumberOfTruckTrips < 3";
  EXPECT_TRUE(ValidateModel(m).Has(ViolationCode::kParseError));
}

TEST(Model, MalformedJsonRaises) {
  try {
    ParseModelJson("{\"parameters\": [");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedJson);
  }
}

TEST(Model, SchemaErrorRaises) {
  try {
    ParseModelJson("{\"parameters\": 3}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaError);
  }
}

TEST(Model, ExternalParametersDetected) {
  auto m = testing::LoadModelFile(testing::DataPath("warehouse_param.json"));
  EXPECT_TRUE(m.HasExternalParameters());
  EXPECT_FALSE(LibraryModel("knapsack").HasExternalParameters());
}

ModelingStructure Make(std::string high, std::string medium, NamedEntries low) {
  ModelingStructure s;
  s.problem_type = std::move(high);
  s.specific_type = std::move(medium);
  s.implicit_constraints = std::move(low);
  return s;
}

TEST(Structure, JsonRoundTrip) {
  ModelingStructure s = Make("Network flow", "Maximum flow",
                             {{"Capacity Constraints", "edge capacity"},
                              {"Flow Conservation", "in equals out"}});
  s.subdivisions = {{"Subdivision 1", "Directed"}};
  EXPECT_EQ(ParseStructure(SerializeStructure(s)), s);
}

TEST(Structure, MissingKeyIsSchemaError) {
  try {
    ParseStructure(R"({"problem_type": "x"})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaError);
  }
}

TEST(Structure, TokenJaccard) {
  EXPECT_DOUBLE_EQ(TokenJaccard("Flow Conservation", "flow-conservation"), 1.0);
  EXPECT_DOUBLE_EQ(TokenJaccard("Flow Conservation", "Flow Capacity"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(TokenJaccard("", ""), 1.0);
}

TEST(Structure, DiffFindsMissingConstraint) {
  auto ref = Make("Network flow", "Maximum flow",
                  {{"Capacity Constraints", ""}, {"Flow Conservation", ""}});
  auto cand = Make("Network flow", "Maximum flow", {{"Capacity Constraints", ""}});
  auto diff = DiffStructures(ref, cand);
  ASSERT_EQ(diff.missing_low_level.size(), 1u);
  EXPECT_EQ(diff.missing_low_level[0], "Flow Conservation");
  EXPECT_TRUE(diff.extra_low_level.empty());
  EXPECT_DOUBLE_EQ(diff.similarity, 0.5);
  EXPECT_NE(diff.Render().find("Flow Conservation"), std::string::npos);
}

TEST(Structure, DiffIdenticalIsOne) {
  auto s = Make("A b", "C d", {{"X y", ""}});
  EXPECT_DOUBLE_EQ(DiffStructures(s, s).similarity, 1.0);
}

TEST(Structure, LevelMismatchCapsSimilarity) {
  auto ref = Make("Integer programming", "Knapsack", {{"Weight Limit", ""}});
  auto cand = Make("Network flow", "Knapsack", {{"Weight Limit", ""}});
  auto diff = DiffStructures(ref, cand);
  ASSERT_EQ(diff.level_mismatch.size(), 1u);
  EXPECT_EQ(diff.level_mismatch[0].level, "high");
  EXPECT_DOUBLE_EQ(diff.similarity, 0.5);
}

TEST(Library, BuiltinHasWorkedExamples) {
  const auto& lib = ModelLibrary::Builtin();
  for (const char* name : {"knapsack", "fishery", "tsp", "maxflow", "warehouse"}) {
    EXPECT_NE(lib.Find(name), nullptr) << name;
  }
  EXPECT_EQ(lib.Find("nope"), nullptr);
}

TEST(Library, MatchDescriptionAndModel) {
  const auto& lib = ModelLibrary::Builtin();
  const auto* e = lib.MatchDescription("We fill a knapsack with items.");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->name, "knapsack");
  const auto* m = lib.MatchModel(LibraryModel("tsp"));
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->name, "tsp");
}

TEST(Library, MaxflowInitialModelLacksConservation) {
  const auto& entry = ModelLibrary::Builtin().Get("maxflow");
  ASSERT_TRUE(entry.initial_model.has_value());
  auto reference = ReferenceStructure(entry);
  auto interpreted = StructureFromModel(*entry.initial_model, reference.problem_type,
                                        reference.specific_type);
  auto diff = DiffStructures(reference, interpreted);
  ASSERT_EQ(diff.missing_low_level.size(), 1u);
  EXPECT_NE(diff.missing_low_level[0].find("Flow Conservation"), std::string::npos);
}

}  // namespace
}  // namespace optverifier
