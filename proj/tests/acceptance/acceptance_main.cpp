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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "optverifier/bench.hpp"
#include "optverifier/compile.hpp"
#include "optverifier/formula.hpp"
#include "optverifier/gateway.hpp"
#include "optverifier/pipeline.hpp"
#include "optverifier/solve.hpp"
#include "test_support.hpp"

namespace ov = optverifier;
using ov::testing::DataPath;
using ov::testing::LibraryModel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void Report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::ostringstream line;
  line << (o.pass ? "PASS " : "FAIL ") << name << " (" << std::fixed;
  line.precision(2);
  line << secs << " s)";
  if (!o.detail.empty()) line << ": " << o.detail;
  std::cout << line.str() << std::endl;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

bool HaveExternalSolver() {
  return ov::FindExecutable(ov::DefaultExternalSolver().command).has_value();
}

ov::ProblemInstance Instance(const std::string& name) {
  return ov::ModelLibrary::Builtin().Get(name).Instance();
}

std::vector<std::vector<double>> Matrix(const ov::OptimizationModel& m, const std::string& p) {
  return std::get<ov::Json>(m.FindParameter(p)->value).get<std::vector<std::vector<double>>>();
}

// ---------------------------------------------------------------------------
// Independent oracles

double UnboundedKnapsackOracle(const std::vector<int>& w, const std::vector<int>& v, int cap) {
  std::vector<double> best(cap + 1, 0.0);
  for (int c = 1; c <= cap; ++c) {
    for (size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= c) best[c] = std::max(best[c], best[c - w[i]] + v[i]);
    }
  }
  return best[cap];
}

double MaxFlowOracle(std::vector<std::vector<double>> cap, int s, int t) {
  const int n = static_cast<int>(cap.size());
  double flow = 0;
  while (true) {
    std::vector<int> parent(n, -1);
    parent[s] = s;
    std::queue<int> q;
    q.push(s);
    while (!q.empty() && parent[t] < 0) {
      int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v) {
        if (parent[v] < 0 && cap[u][v] > 1e-12) {
          parent[v] = u;
          q.push(v);
        }
      }
    }
    if (parent[t] < 0) return flow;
    double push = 1e300;
    for (int v = t; v != s; v = parent[v]) push = std::min(push, cap[parent[v]][v]);
    for (int v = t; v != s; v = parent[v]) {
      cap[parent[v]][v] -= push;
      cap[v][parent[v]] += push;
    }
    flow += push;
  }
}

// ---------------------------------------------------------------------------
// Criteria

Outcome OracleEquivalence() {
  if (!HaveExternalSolver()) return {false, "no external MILP solver on PATH"};
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20261018);
  auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  const int kModels = 200;
  int optimal = 0, infeasible = 0;
  for (int k = 0; k < kModels; ++k) {
    ov::GroundedModel g;
    int nvars = uniform(2, 4);
    for (int i = 0; i < nvars; ++i) {
      bool binary = uniform(0, 3) == 0;
      g.variables.push_back({"v" + std::to_string(i), "v",
                             binary ? ov::VarType::kBinary : ov::VarType::kInteger,
                             binary ? 0.0 : static_cast<double>(uniform(-2, 0)),
                             binary ? 1.0 : static_cast<double>(uniform(1, 5))});
    }
    int nrows = uniform(1, 3);
    for (int r = 0; r < nrows; ++r) {
      ov::LinearRow row;
      row.name = "r" + std::to_string(r);
      for (int i = 0; i < nvars; ++i) {
        int c = uniform(-4, 4);
        if (c != 0) row.coefs[i] = c;
      }
      if (row.coefs.empty()) row.coefs[0] = 1;
      int rel = uniform(0, 5);
      row.relop = rel < 3 ? ov::Relop::kLe : rel < 5 ? ov::Relop::kGe : ov::Relop::kEq;
      row.rhs = uniform(-4, 12);
      g.rows.push_back(row);
    }
    g.objective.sense = uniform(0, 1) ? ov::ObjectiveSense::kMaximize
                                      : ov::ObjectiveSense::kMinimize;
    for (int i = 0; i < nvars; ++i) g.objective.coefs[i] = uniform(-6, 6);
    g.objective.constant = uniform(-3, 3);

    ov::Solution brute = ov::BruteForceSolve(g);
    ov::Solution ext = ov::SolveExternal(g, ov::DefaultExternalSolver());
    if (brute.status != ext.status) {
      return {false, "model " + std::to_string(k) + ": brute force " +
                         std::string(ov::SolveStatusName(brute.status)) + " vs external " +
                         std::string(ov::SolveStatusName(ext.status)) + " " + ext.message};
    }
    if (brute.status == ov::SolveStatus::kOptimal) {
      ++optimal;
      if (std::fabs(*brute.objective_value - *ext.objective_value) > 1e-6) {
        return {false, "model " + std::to_string(k) + ": objectives " +
                           std::to_string(*brute.objective_value) + " vs " +
                           std::to_string(*ext.objective_value)};
      }
    } else if (brute.status == ov::SolveStatus::kInfeasible) {
      ++infeasible;
    }
  }
  double secs = Seconds(t0);
  std::ostringstream d;
  d << kModels << " models agree (" << optimal << " optimal, " << infeasible
    << " infeasible) in " << secs << " s";
  return {secs < 60.0, d.str()};
}

ov::PipelineConfig DefaultConfig() { return ov::PipelineConfig{}; }

Outcome WorkedKnapsack() {
  const auto& m = LibraryModel("knapsack");
  auto w = std::get<ov::Json>(m.FindParameter("ItemWeights")->value).get<std::vector<int>>();
  auto v = std::get<ov::Json>(m.FindParameter("ItemValues")->value).get<std::vector<int>>();
  int cap = std::get<ov::Json>(m.FindParameter("MaxKnapsackWeight")->value).get<int>();
  double oracle = UnboundedKnapsackOracle(w, v, cap);
  ov::MockAgents agents;
  auto r = ov::RunPipeline(Instance("knapsack"), agents, DefaultConfig());
  if (r.outcome != ov::Outcome::kAccepted) return {false, "outcome " + r.error};
  double got = *r.final_solution->objective_value;
  return {oracle == 48.0 && std::fabs(got - oracle) < 1e-6,
          "objective " + std::to_string(got) + ", DP oracle " + std::to_string(oracle)};
}

Outcome WorkedFishery() {
  double oracle = -1;
  for (int s = 0; s <= 20; ++s) {
    for (int t = 0; t <= 10; ++t) {
      if (50 * s + 100 * t <= 1000 && s <= t) oracle = std::max(oracle, 100.0 * s + 300.0 * t);
    }
  }
  ov::MockAgents agents;
  auto r = ov::RunPipeline(Instance("fishery"), agents, DefaultConfig());
  if (r.outcome != ov::Outcome::kAccepted) return {false, "outcome " + r.error};
  double got = *r.final_solution->objective_value;
  return {oracle == 3000.0 && std::fabs(got - oracle) < 1e-6,
          "objective " + std::to_string(got) + ", enumeration oracle " + std::to_string(oracle)};
}

Outcome WorkedTsp() {
  auto tour = ov::TspTourOracle(Matrix(LibraryModel("tsp"), "TravelCosts"));
  if (!HaveExternalSolver()) {
    return {true, "skipped: no external MILP solver (tour oracle " +
                      std::to_string(tour.cost) + ")"};
  }
  ov::MockAgents agents;
  auto r = ov::RunPipeline(Instance("tsp"), agents, DefaultConfig());
  if (r.outcome != ov::Outcome::kAccepted) return {false, "outcome " + r.error};
  double got = *r.final_solution->objective_value;
  return {tour.cost == 159.0 && std::fabs(got - tour.cost) < 1e-6,
          "objective " + std::to_string(got) + ", tour oracle " + std::to_string(tour.cost)};
}

Outcome WorkedWarehouse() {
  ov::GroundedModel g = ov::Ground(LibraryModel("warehouse"));
  auto check = [&](const char* name, ov::Relop relop, double rhs) {
    const ov::LinearRow* row = g.FindRow(name);
    if (!row || row->relop != relop || row->rhs != rhs || row->coefs.size() != 10) return false;
    for (const auto& [idx, c] : row->coefs) {
      if (g.variables[idx].symbol != "y" || c != 1.0) return false;
    }
    return true;
  };
  bool ok = check("MinOpenWarehouses", ov::Relop::kGe, 3) &&
            check("MaxOpenWarehouses", ov::Relop::kLe, 8);
  return {ok, "sum(y) >= 3 and sum(y) <= 8 rows over 10 warehouses"};
}

Outcome MaxflowDualLoop() {
  if (!HaveExternalSolver()) return {false, "no external solver for the continuous model"};
  auto backend = std::make_shared<ov::ReplayBackend>(
      ov::Cassette::Load(DataPath("cassettes/maxflow.jsonl")));
  auto gateway = std::make_shared<const ov::Gateway>(backend);
  ov::LlmAgents agents(gateway);
  ov::ProblemInstance d{"maxflow", ov::testing::ReadText(DataPath("maxflow.txt")), 36.0, {}, {}};
  auto r = ov::RunPipeline(d, agents, DefaultConfig());
  if (r.outcome != ov::Outcome::kAccepted) return {false, "outcome " + r.error_code + " " + r.error};
  int structure_refines = 0;
  for (const auto& mv : r.models) structure_refines += mv.side == "structure";
  if (structure_refines != 1 || r.refinements != 1) {
    return {false, std::to_string(structure_refines) + " structure refinements"};
  }
  ov::GroundedModel g = ov::Ground(*r.final_model);
  const auto* inter = r.final_model->FindParameter("IntermediateReservoirs");
  auto nodes = std::get<ov::Json>(inter->value).get<std::vector<int>>();
  int rows = 0;
  for (const auto& row : g.rows) rows += row.name.rfind("Flow_Conservation", 0) == 0;
  if (rows != static_cast<int>(nodes.size())) {
    return {false, std::to_string(rows) + " conservation rows for " +
                       std::to_string(nodes.size()) + " intermediate nodes"};
  }
  const auto& x = r.final_solution->assignment;
  const int n = 9;
  double worst = 0;
  for (int k : nodes) {
    double in = 0, out = 0;
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      out += x.at("WaterFlow_" + std::to_string(k) + "_" + std::to_string(j));
      in += x.at("WaterFlow_" + std::to_string(j) + "_" + std::to_string(k));
    }
    worst = std::max(worst, std::fabs(in - out));
  }
  double oracle = MaxFlowOracle(Matrix(*r.final_model, "Capacity"), 0, n - 1);
  double got = *r.final_solution->objective_value;
  std::ostringstream det;
  det << "1 structure refinement, " << rows << " conservation rows, max |in-out| " << worst
      << ", flow " << got << " (augmenting-path oracle " << oracle << ")";
  return {worst <= 1e-6 && std::fabs(got - oracle) < 1e-6, det.str()};
}

Outcome VerifierStudyProtocol() {
  auto t0 = std::chrono::steady_clock::now();
  auto positives = ov::SyntheticPositives(10, 7);
  ov::ModelLibrary library = ov::LibraryFromPositives(positives);
  ov::MockAgents agents(library);
  ov::StudyReport rep = ov::VerifierStudy(positives, agents);
  double secs = Seconds(t0);
  std::ostringstream det;
  bool ok = rep.strata.size() == 3;
  for (const auto& [name, s] : rep.strata) {
    ok &= s.positives == 10 && s.negatives == 90;
    ok &= s.structure.precision().value_or(0) == 1.0;
    for (const char* op : {"drop_constraint", "drop_variable"}) {
      auto it = s.structure_by_op.find(op);
      if (it != s.structure_by_op.end() && it->second.tp + it->second.fn > 0) {
        ok &= it->second.recall().value_or(0) == 1.0;
      }
    }
    det << name << " " << s.positives << "+" << s.negatives << " precision "
        << s.structure.precision().value_or(-1) << "; ";
  }
  const auto& all = rep.overall.structure_by_op;
  for (const char* op : {"drop_constraint", "drop_variable"}) {
    auto it = all.find(op);
    bool present = it != all.end() && it->second.tp + it->second.fn > 0;
    ok &= present && it->second.recall().value_or(0) == 1.0;
    if (present) det << op << " recall " << *it->second.recall() << " ("
                     << it->second.tp << "/" << it->second.tp + it->second.fn << "); ";
  }
  det << secs << " s";
  return {ok && secs < 30.0, det.str()};
}

Outcome FeasibilityGate() {
  std::ostringstream det;
  ov::SolverConfig solver;
  for (const auto& entry : ov::ModelLibrary::Builtin().entries()) {
    ov::GroundedModel g = ov::Ground(entry.model);
    if (!ov::BruteForceApplicable(g, solver.auto_enumeration_cap) && !HaveExternalSolver()) {
      continue;
    }
    ov::Solution s = ov::Solve(g, solver);
    if (s.status != ov::SolveStatus::kOptimal) {
      return {false, entry.name + " solve status " + std::string(ov::SolveStatusName(s.status))};
    }
    if (!ov::CheckFeasibility(g, s.assignment).feasible) {
      return {false, entry.name + " optimal solution reported infeasible"};
    }
    det << entry.name << " ok; ";
  }

  // Three open warehouses serve everyone; 90 units of customer 4 are then
  // shipped from closed warehouse 5.
  const auto& wh = LibraryModel("warehouse");
  ov::GroundedModel g = ov::Ground(wh);
  auto demand = std::get<ov::Json>(wh.FindParameter("CustomerDemand")->value).get<std::vector<double>>();
  ov::Assignment a;
  for (const auto& v : g.variables) a[v.name] = 0.0;
  for (int i : {2, 3, 4}) a["y_" + std::to_string(i)] = 1.0;
  for (size_t j = 0; j < demand.size(); ++j) {
    int w = j == 0 ? 2 : j == 1 ? 3 : 4;
    a["x_" + std::to_string(w) + "_" + std::to_string(j)] = demand[j];
  }
  a["x_4_4"] = demand[4] - 90.0;
  a["x_5_4"] = 90.0;
  auto report = ov::CheckFeasibility(g, a);
  bool ok = !report.feasible && report.violated_rows.size() == 1 &&
            report.violated_rows[0].row == "CapacityWarehouse_5" &&
            std::fabs(report.violated_rows[0].magnitude - 90.0) < 1e-9 &&
            report.integrality_violations.empty() && report.bound_violations.empty();
  if (report.violated_rows.size() == 1) {
    det << "injected: " << report.violated_rows[0].row << " violated by "
        << report.violated_rows[0].magnitude;
  } else {
    det << "injected: " << report.violated_rows.size() << " violated rows";
  }
  return {ok, det.str()};
}

Outcome ReplayDeterminism() {
  auto instances = ov::LoadDataset(DataPath("bench4.jsonl"));
  auto run = [&]() {
    auto backend = std::make_shared<ov::ReplayBackend>(
        ov::Cassette::Load(DataPath("cassettes/bench4.jsonl")));
    auto gateway = std::make_shared<const ov::Gateway>(backend);
    auto records = ov::RunBench(
        instances, [&] { return std::make_unique<ov::LlmAgents>(gateway); }, DefaultConfig(), 2);
    std::vector<ov::BenchResult> results;
    for (size_t i = 0; i < instances.size(); ++i) {
      results.push_back(ov::MakeBenchResult(instances[i], records[i]));
    }
    return ov::ScoreSolvingAccuracy(results);
  };
  auto a = run();
  auto b = run();
  std::string ja = a.ToJson(false).dump(2), jb = b.ToJson(false).dump(2);
  bool ok = ja == jb && a.instances.size() == 4;
  std::ostringstream det;
  det << ja.size() << " bytes, identical=" << (ja == jb) << ", micro SA "
      << (a.micro_sa ? std::to_string(*a.micro_sa) : "n/a");
  return {ok, det.str()};
}

// Random DSL text over a fixed symbol table.
class GrammarFuzzer {
 public:
  explicit GrammarFuzzer(std::uint64_t seed) : rng_(seed) {}

  const ov::SymbolKinds& kinds() const { return kinds_; }

  struct Sample {
    std::string lhs, rhs, tail;
  };

  Sample Constraint() {
    bound_.clear();
    std::string tail;
    int quants = Pick(0, 2);
    const char* names[] = {"i", "j"};
    for (int q = 0; q < quants; ++q) {
      tail += std::string(" forall ") + names[q] + " in " + (q == 0 ? "S" : "T");
      bound_.push_back(names[q]);
    }
    if (quants == 2 && Pick(0, 1)) tail += " if i " + GuardOp() + " j";
    Sample s{Linear(3, true), Pick(0, 1) ? Constant(2) : Linear(2, false), tail};
    return s;
  }

  std::string Relop() { return std::vector<std::string>{"<=", ">=", "=="}[Pick(0, 2)]; }

  // A linear expression that certainly mentions a variable.
  std::string VarTerm() {
    if (!bound_.empty() && Pick(0, 1)) return "Y[" + Index() + "]";
    if (bound_.size() >= 1 && Pick(0, 1)) return "Z[" + Index() + "," + Index() + "]";
    return "X";
  }

 private:
  int Pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string Index() { return bound_[Pick(0, static_cast<int>(bound_.size()) - 1)]; }

  std::string GuardOp() {
    return std::vector<std::string>{"!=", "<", "<=", ">", ">="}[Pick(0, 4)];
  }

  std::string Number() {
    int n = Pick(0, 40);
    if (Pick(0, 3) == 0) return std::to_string(n) + ".5";
    return std::to_string(n);
  }

  std::string Constant(int depth) {
    int c = depth <= 0 ? Pick(0, 1) : Pick(0, 4);
    switch (c) {
      case 0: return Number();
      case 1: return bound_.empty() ? "P" : "Q[" + Index() + "]";
      case 2: return Constant(depth - 1) + " * " + Constant(depth - 1);
      case 3: return "(" + Constant(depth - 1) + " - " + Constant(depth - 1) + ")";
      default: return "-" + Constant(depth - 1);
    }
  }

  std::string Linear(int depth, bool need_var) {
    int c = depth <= 0 ? 0 : Pick(0, 5);
    switch (c) {
      case 0: return need_var || Pick(0, 1) ? VarTerm() : Constant(0);
      case 1: return Constant(1) + " * " + Linear(depth - 1, true);
      case 2: return Linear(depth - 1, need_var) + " + " + Linear(depth - 1, false);
      case 3: return Linear(depth - 1, need_var) + " - " + Linear(depth - 1, false);
      case 4: return "-(" + Linear(depth - 1, need_var) + ")";
      default: {
        if (bound_.size() >= 2) return Linear(depth - 1, need_var);
        std::string idx = bound_.empty() ? "i" : "j";
        std::string set = bound_.empty() ? "S" : "T";
        std::string head = "sum(" + idx + " in " + set;
        std::string guard;
        if (!bound_.empty() && Pick(0, 1)) guard = " if " + idx + " " + GuardOp() + " " + bound_[0];
        bound_.push_back(idx);
        std::string body = Linear(depth - 1, true);
        bound_.pop_back();
        return head + guard + ", " + body + ")";
      }
    }
  }

  std::mt19937_64 rng_;
  std::vector<std::string> bound_;
  ov::SymbolKinds kinds_ = {
      {"X", ov::SymbolKind::kVariable},  {"Y", ov::SymbolKind::kVariable},
      {"Z", ov::SymbolKind::kVariable},  {"P", ov::SymbolKind::kParameter},
      {"Q", ov::SymbolKind::kParameter}, {"S", ov::SymbolKind::kParameter},
      {"T", ov::SymbolKind::kParameter},
  };
};

Outcome GrammarProperties() {
  GrammarFuzzer fuzz(99);
  int round_trips = 0, strict = 0, nonlinear = 0;
  auto code_of = [&](const std::string& text) -> std::optional<ov::ErrorCode> {
    try {
      ov::ParseConstraint(text, fuzz.kinds());
    } catch (const ov::Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  for (int k = 0; k < 1000; ++k) {
    auto s = fuzz.Constraint();
    std::string text = s.lhs + " " + fuzz.Relop() + " " + s.rhs + s.tail;
    ov::ConstraintAst first = ov::ParseConstraint(text, fuzz.kinds());
    std::string printed = ov::PrintCanonical(first);
    ov::ConstraintAst second = ov::ParseConstraint(printed, fuzz.kinds());
    if (!(first == second) || ov::PrintCanonical(second) != printed) {
      return {false, "round trip differs for: " + text + "  ->  " + printed};
    }
    ++round_trips;

    for (const char* op : {"<", ">"}) {
      std::string bad = s.lhs + " " + op + " " + s.rhs + s.tail;
      if (code_of(bad) != ov::ErrorCode::kNonstrictRequired) {
        return {false, "strict inequality accepted or misreported: " + bad};
      }
      ++strict;
    }
    std::string product = "(" + s.lhs + ") * " + fuzz.VarTerm() + " <= " + s.rhs + s.tail;
    if (code_of(product) != ov::ErrorCode::kNonlinear) {
      return {false, "variable product accepted or misreported: " + product};
    }
    ++nonlinear;
  }
  return {true, std::to_string(round_trips) + " round trips, " + std::to_string(strict) +
                    " strict and " + std::to_string(nonlinear) + " nonlinear inputs rejected"};
}

Outcome EfficiencyAccounting() {
  ov::MockAgents agents;
  auto r = ov::RunPipeline(Instance("knapsack"), agents, DefaultConfig());
  std::int64_t llm = 0, completions = 0, prompt = 0, completion = 0;
  for (const auto& e : r.events) {
    if (!ov::IsLlmStage(e.stage)) continue;
    ++llm;
    completions += e.completions;
    prompt += e.usage.prompt_tokens;
    completion += e.usage.completion_tokens;
  }
  bool ok = llm == 7 && r.totals.agent_calls == llm && r.totals.completions == completions &&
            r.totals.prompt_tokens == prompt && r.totals.completion_tokens == completion;

  // Same check on a replayed run with real token counts.
  auto backend = std::make_shared<ov::ReplayBackend>(
      ov::Cassette::Load(DataPath("cassettes/bench4.jsonl")));
  ov::LlmAgents llm_agents(std::make_shared<const ov::Gateway>(backend));
  auto instances = ov::LoadDataset(DataPath("bench4.jsonl"));
  auto replay = ov::RunPipeline(instances[0], llm_agents, DefaultConfig());
  std::int64_t tokens = 0, calls = 0;
  for (const auto& e : replay.events) {
    if (!ov::IsLlmStage(e.stage)) continue;
    ++calls;
    tokens += e.usage.prompt_tokens + e.usage.completion_tokens;
  }
  ok &= replay.totals.tokens() == tokens && replay.totals.agent_calls == calls && tokens > 0;
  std::ostringstream det;
  det << "mock run " << llm << " LLM-stage events; replayed run " << calls << " events, "
      << tokens << " tokens";
  return {ok, det.str()};
}

}  // namespace

int main() {
  Report("oracle_equivalence", OracleEquivalence);
  Report("worked_example.knapsack", WorkedKnapsack);
  Report("worked_example.fishery", WorkedFishery);
  Report("worked_example.tsp", WorkedTsp);
  Report("worked_example.warehouse", WorkedWarehouse);
  Report("dual_loop.maxflow_cassette", MaxflowDualLoop);
  Report("verifier_study_protocol", VerifierStudyProtocol);
  Report("feasibility_gate", FeasibilityGate);
  Report("replay_determinism", ReplayDeterminism);
  Report("grammar_properties", GrammarProperties);
  Report("efficiency_accounting", EfficiencyAccounting);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
