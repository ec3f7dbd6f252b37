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

#include <set>

#include "optverifier/bench.hpp"
#include "optverifier/config.hpp"
#include "test_support.hpp"

namespace optverifier {
namespace {

using testing::DataPath;
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

TEST(Config, ParsesAndApplies) {
  auto values = ParseConfigText(
      "# budgets\n"
      "max_structure_rounds = 3\n"
      "strict_reverify = true\n"
      "solver = brute_force\n"
      "toy_dims = A=10,B=20\n"
      "model_name = gpt-test\n"
      "perturb_ops = drop_constraint, flip_relop\n");
  Settings s;
  ApplyConfig(values, s);
  EXPECT_EQ(s.pipeline.max_structure_rounds, 3);
  EXPECT_TRUE(s.pipeline.strict_reverify);
  EXPECT_EQ(s.pipeline.solver.backend, SolverBackend::kBruteForce);
  EXPECT_EQ(s.pipeline.toy_dims.at("B"), 20);
  EXPECT_EQ(s.gateway.model_name, "gpt-test");
  EXPECT_EQ(s.perturb_ops, (std::vector<std::string>{"drop_constraint", "flip_relop"}));
}

TEST(Config, RejectsBadInput) {
  EXPECT_EQ(CodeOf([] { ParseConfigText("a = 1\na = 2\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { ParseConfigText("just words\n"); }), ErrorCode::kConfigError);
  Settings s;
  EXPECT_EQ(CodeOf([&] { ApplyConfig({{"no_such_key", "1"}}, s); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { ApplyConfig({{"max_structure_rounds", "two"}}, s); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { ApplyConfig({{"max_structure_rounds", "-1"}}, s); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([] { LoadConfigFile(DataPath("missing.conf")); }), ErrorCode::kConfigError);
}

TEST(Config, EveryDocumentedKeyIsAccepted) {
  std::set<std::string> seen;
  for (const auto& [key, doc] : ConfigKeys()) {
    EXPECT_TRUE(seen.insert(key).second) << key;
    EXPECT_FALSE(doc.empty()) << key;
  }
  EXPECT_TRUE(seen.count("max_total_refinements"));
  EXPECT_TRUE(seen.count("prompt_set"));
}

TEST(Dataset, ParsesFixture) {
  auto instances = LoadDataset(DataPath("bench4.jsonl"));
  ASSERT_EQ(instances.size(), 4u);
  EXPECT_EQ(instances[0].id, "knapsack");
  EXPECT_DOUBLE_EQ(*instances[3].ground_truth_objective, 36.0);
  EXPECT_EQ(*instances[2].difficulty, "medium");
}

TEST(Dataset, MalformedLine) {
  EXPECT_EQ(CodeOf([] { ParseDataset("{\"description\": \"a\"}\nnot json\n"); }),
            ErrorCode::kMalformedLine);
  EXPECT_EQ(CodeOf([] { ParseDataset("{\"id\": \"x\"}\n"); }), ErrorCode::kMalformedLine);
  EXPECT_EQ(ParseDataset("\n{\"description\": \"a\"}\n\n").size(), 1u);
}

BenchResult Result(std::string id, std::string dataset, std::optional<double> truth,
                   std::optional<double> predicted) {
  BenchResult r;
  r.id = std::move(id);
  r.dataset = std::move(dataset);
  r.difficulty = "easy";
  r.truth = truth;
  r.predicted = predicted;
  r.status = "optimal";
  r.outcome = "accepted";
  return r;
}

TEST(Scoring, Tolerances) {
  EXPECT_TRUE(IsCorrect(Result("a", "d", 3000, 2999.9999)));
  EXPECT_FALSE(IsCorrect(Result("a", "d", 3000, 2999)));
  EXPECT_FALSE(IsCorrect(Result("a", "d", 3000, std::nullopt)));
  BenchResult exhausted = Result("a", "d", 3000, 3000);
  exhausted.outcome = "budget_exhausted";
  EXPECT_FALSE(IsCorrect(exhausted));
  EXPECT_TRUE(IsCorrect(Result("a", "d", 0, 1e-7)));
}

TEST(Scoring, MicroAndMacro) {
  // d1: 1 of 1 correct; d2: 1 of 3 correct.
  std::vector<BenchResult> rs = {
      Result("a", "d1", 1, 1), Result("b", "d2", 1, 1),
      Result("c", "d2", 1, 2), Result("e", "d2", 1, std::nullopt),
      Result("f", "d2", std::nullopt, 5),
  };
  BenchReport rep = ScoreSolvingAccuracy(rs);
  EXPECT_DOUBLE_EQ(*rep.micro_sa, 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(*rep.macro_sa, (1.0 + 1.0 / 3.0) / 2.0);
  EXPECT_EQ(rep.without_truth, (std::vector<std::string>{"f"}));
  EXPECT_EQ(rep.by_dataset.at("d2").with_truth, 3);
  EXPECT_FALSE(rep.instances.back().correct.has_value());
}

TEST(Scoring, NoTruthGivesNotAvailable) {
  BenchReport rep = ScoreSolvingAccuracy({Result("a", "d", std::nullopt, 1)});
  EXPECT_FALSE(rep.micro_sa.has_value());
  EXPECT_NE(rep.ToMarkdown().find("n/a"), std::string::npos);
  EXPECT_TRUE(rep.ToJson()["micro_sa"].is_null());
}

TEST(Perturb, ProducesDistinctValidModels) {
  const auto& m = LibraryModel("tsp");
  PerturbationSpec spec;
  auto out = PerturbModel(m, spec);
  ASSERT_EQ(out.size(), 9u);
  std::set<std::string> seen{SerializeModel(m)};
  for (const auto& p : out) {
    EXPECT_TRUE(ValidateModel(p).valid());
    EXPECT_EQ(p.provenance.kind, Provenance::Kind::kPerturbed);
    OptimizationModel stripped = p;
    stripped.provenance = m.provenance;
    EXPECT_TRUE(seen.insert(SerializeModel(stripped)).second);
  }
  auto again = PerturbModel(m, spec);
  for (size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], again[i]);
}

TEST(Perturb, SmallModelRunsOutOfDistinctEdits) {
  // One variable and two constraints admit fewer than nine distinct edits.
  EXPECT_EQ(CodeOf([] { PerturbModel(LibraryModel("knapsack"), PerturbationSpec{}); }),
            ErrorCode::kPerturbationExhausted);
}

TEST(Perturb, DropConstraintRemovesOne) {
  const auto& m = LibraryModel("fishery");
  std::mt19937_64 rng(3);
  auto p = ApplyPerturbation(m, PerturbOp::kDropConstraint, rng);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->constraints.size(), m.constraints.size() - 1);
}

TEST(Perturb, FlipRelopOnlyTouchesInequalities) {
  OptimizationModel m = LibraryModel("maxflow");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    auto p = ApplyPerturbation(m, PerturbOp::kFlipRelop, rng);
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(p->constraints[2].formulation, m.constraints[2].formulation);
  }
}

TEST(Perturb, Names) {
  for (auto op : AllPerturbOps()) EXPECT_EQ(ParsePerturbOp(PerturbOpName(op)), op);
  EXPECT_FALSE(ParsePerturbOp("nope").has_value());
}

TEST(Perturb, EmptyOpsIsPrecondition) {
  PerturbationSpec spec;
  spec.ops.clear();
  EXPECT_EQ(CodeOf([&] { PerturbModel(LibraryModel("fishery"), spec); }),
            ErrorCode::kPrecondition);
}

TEST(TourOracle, FiveCityExample) {
  const auto& p = LibraryModel("tsp").FindParameter("TravelCosts");
  std::vector<std::vector<double>> cost = std::get<Json>(p->value).get<std::vector<std::vector<double>>>();
  TourResult t = TspTourOracle(cost);
  EXPECT_DOUBLE_EQ(t.cost, 159.0);
  EXPECT_EQ(t.tour, (std::vector<int>{0, 1, 4, 3, 2}));
}

TEST(TourOracle, EdgeCases) {
  TourResult two = TspTourOracle({{0, 3}, {4, 0}});
  EXPECT_DOUBLE_EQ(two.cost, 7.0);
  std::vector<std::vector<double>> big(11, std::vector<double>(11, 1.0));
  EXPECT_EQ(CodeOf([&] { TspTourOracle(big); }), ErrorCode::kTooLarge);
  EXPECT_EQ(CodeOf([] { TspTourOracle({{0, 1}, {1}}); }), ErrorCode::kPrecondition);
}

TEST(Study, SyntheticPositivesValidateAndMatchTruth) {
  auto ps = SyntheticPositives(3, 11);
  ASSERT_EQ(ps.size(), 9u);
  std::set<std::string> ids;
  for (const auto& p : ps) {
    EXPECT_TRUE(ValidateModel(p.model).valid()) << p.id;
    EXPECT_TRUE(ids.insert(p.id).second);
    EXPECT_DOUBLE_EQ(DiffStructures(p.truth, StructureFromModel(p.model, p.truth.problem_type,
                                                                p.truth.specific_type))
                         .similarity,
                     1.0);
  }
}

TEST(Study, ConfusionMetrics) {
  Confusion c;
  EXPECT_FALSE(c.precision().has_value());
  c.Add(true, true);
  c.Add(true, false);
  c.Add(false, true);
  c.Add(false, false);
  EXPECT_DOUBLE_EQ(*c.precision(), 0.5);
  EXPECT_DOUBLE_EQ(*c.recall(), 0.5);
}

TEST(Efficiency, MeansPerDataset) {
  RunRecord a, b;
  a.totals.agent_calls = 8;
  b.totals.agent_calls = 10;
  a.totals.prompt_tokens = 100;
  b.totals.prompt_tokens = 300;
  std::string table = EfficiencyTable({a, b}, {"x", "x"});
  EXPECT_NE(table.find("9.0"), std::string::npos);
  EXPECT_NE(table.find("200"), std::string::npos);
}

}  // namespace
}  // namespace optverifier
