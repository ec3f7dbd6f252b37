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

#include "optverifier/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace optverifier {

namespace {

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string MaybeFixed(const std::optional<double>& v, int digits) {
  return v ? Fixed(*v, digits) : "n/a";
}

Json MaybeJson(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------
// Datasets

std::vector<ProblemInstance> ParseDataset(std::string_view text) {
  std::vector<ProblemInstance> out;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::kMalformedLine, "line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json doc;
    try {
      doc = Json::parse(line);
    } catch (const Json::parse_error& e) {
      bad(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) bad("expected a JSON object");
    ProblemInstance inst;
    if (!doc.contains("description") || !doc["description"].is_string() ||
        doc["description"].get<std::string>().empty()) {
      bad("missing \"description\"");
    }
    inst.description = doc["description"].get<std::string>();
    if (doc.contains("id")) {
      inst.id = doc["id"].is_string() ? doc["id"].get<std::string>() : doc["id"].dump();
    } else {
      inst.id = "line" + std::to_string(lineno);
    }
    if (doc.contains("ground_truth_objective") && !doc["ground_truth_objective"].is_null()) {
      if (!doc["ground_truth_objective"].is_number()) bad("ground_truth_objective is not a number");
      inst.ground_truth_objective = doc["ground_truth_objective"].get<double>();
    }
    for (const char* key : {"difficulty", "category"}) {
      if (!doc.contains(key) || doc[key].is_null()) continue;
      if (!doc[key].is_string()) bad(std::string(key) + " is not a string");
      (std::string(key) == "difficulty" ? inst.difficulty : inst.category) =
          doc[key].get<std::string>();
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<ProblemInstance> LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read dataset " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseDataset(buf.str());
}

// ---------------------------------------------------------------------------
// Solving accuracy

BenchResult MakeBenchResult(const ProblemInstance& instance, const RunRecord& record) {
  BenchResult r;
  r.id = instance.id;
  r.dataset = instance.category.value_or("default");
  r.difficulty = instance.difficulty.value_or("");
  r.truth = instance.ground_truth_objective;
  if (record.final_solution) {
    r.status = std::string(SolveStatusName(record.final_solution->status));
    r.predicted = record.final_solution->objective_value;
  }
  r.outcome = std::string(OutcomeName(record.outcome));
  r.agent_calls = record.totals.agent_calls;
  r.tokens = record.totals.tokens();
  r.seconds = record.totals.wall_time;
  return r;
}

bool IsCorrect(const BenchResult& r, double tol_rel, double tol_abs) {
  if (!r.truth || !r.predicted) return false;
  if (r.outcome != "accepted" || r.status != "optimal") return false;
  return std::abs(*r.predicted - *r.truth) <= std::max(tol_abs, tol_rel * std::abs(*r.truth));
}

namespace {

GroupStats Summarize(const std::vector<const ScoredResult*>& rows) {
  GroupStats g;
  g.instances = static_cast<std::int64_t>(rows.size());
  for (const auto* s : rows) {
    if (s->correct) {
      ++g.with_truth;
      if (*s->correct) ++g.correct;
    }
    g.mean_seconds += s->result.seconds;
    g.mean_agent_calls += static_cast<double>(s->result.agent_calls);
    g.mean_tokens += static_cast<double>(s->result.tokens);
  }
  if (g.instances) {
    double n = static_cast<double>(g.instances);
    g.mean_seconds /= n;
    g.mean_agent_calls /= n;
    g.mean_tokens /= n;
  }
  if (g.with_truth) {
    g.sa = static_cast<double>(g.correct) / static_cast<double>(g.with_truth);
  }
  return g;
}

Json GroupJson(const GroupStats& g, bool timing) {
  Json doc = {{"instances", g.instances},
              {"with_truth", g.with_truth},
              {"correct", g.correct},
              {"sa", MaybeJson(g.sa)},
              {"mean_agent_calls", g.mean_agent_calls},
              {"mean_tokens", g.mean_tokens}};
  if (timing) doc["mean_seconds"] = g.mean_seconds;
  return doc;
}

}  // namespace

BenchReport ScoreSolvingAccuracy(const std::vector<BenchResult>& results, double tol_rel,
                                 double tol_abs) {
  BenchReport rep;
  for (const auto& r : results) {
    ScoredResult s{r, std::nullopt};
    if (r.truth) {
      s.correct = IsCorrect(r, tol_rel, tol_abs);
    } else {
      rep.without_truth.push_back(r.id);
    }
    rep.instances.push_back(std::move(s));
  }
  std::vector<const ScoredResult*> all;
  std::map<std::string, std::vector<const ScoredResult*>> by_ds, by_diff;
  for (const auto& s : rep.instances) {
    all.push_back(&s);
    by_ds[s.result.dataset].push_back(&s);
    by_diff[s.result.difficulty.empty() ? "unspecified" : s.result.difficulty].push_back(&s);
  }
  rep.overall = Summarize(all);
  for (const auto& [k, v] : by_ds) rep.by_dataset[k] = Summarize(v);
  for (const auto& [k, v] : by_diff) rep.by_difficulty[k] = Summarize(v);
  rep.micro_sa = rep.overall.sa;
  double sum = 0.0;
  int n = 0;
  for (const auto& [k, g] : rep.by_dataset) {
    if (g.sa) {
      sum += *g.sa;
      ++n;
    }
  }
  if (n) rep.macro_sa = sum / n;
  return rep;
}

Json BenchReport::ToJson(bool timing) const {
  Json doc;
  doc["instances"] = Json::array();
  for (const auto& s : instances) {
    const BenchResult& r = s.result;
    Json row = {{"id", r.id},
                {"dataset", r.dataset},
                {"difficulty", r.difficulty},
                {"truth", MaybeJson(r.truth)},
                {"predicted", MaybeJson(r.predicted)},
                {"status", r.status},
                {"outcome", r.outcome},
                {"correct", s.correct ? Json(*s.correct) : Json(nullptr)},
                {"agent_calls", r.agent_calls},
                {"tokens", r.tokens}};
    if (timing) row["seconds"] = r.seconds;
    doc["instances"].push_back(std::move(row));
  }
  Json agg;
  agg["overall"] = GroupJson(overall, timing);
  agg["micro_sa"] = MaybeJson(micro_sa);
  agg["macro_sa"] = MaybeJson(macro_sa);
  agg["by_dataset"] = Json::object();
  for (const auto& [k, g] : by_dataset) agg["by_dataset"][k] = GroupJson(g, timing);
  agg["by_difficulty"] = Json::object();
  for (const auto& [k, g] : by_difficulty) agg["by_difficulty"][k] = GroupJson(g, timing);
  doc["aggregates"] = std::move(agg);
  doc["without_truth"] = without_truth;
  return doc;
}

std::string BenchReport::ToMarkdown() const {
  std::ostringstream os;
  os << "# Benchmark report\n\n";
  os << "Solving accuracy (micro, pooled over instances): " << MaybeFixed(micro_sa, 4) << "\n";
  os << "Solving accuracy (macro, mean over datasets): " << MaybeFixed(macro_sa, 4) << "\n\n";
  os << "| Instance | Dataset | Difficulty | Truth | Predicted | Outcome | Correct | Agent calls "
        "| Tokens |\n";
  os << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& s : instances) {
    const BenchResult& r = s.result;
    os << "| " << r.id << " | " << r.dataset << " | " << (r.difficulty.empty() ? "-" : r.difficulty)
       << " | " << (r.truth ? FormatNumber12(*r.truth) : "-") << " | "
       << (r.predicted ? FormatNumber12(*r.predicted) : "-") << " | " << r.outcome << " | "
       << (s.correct ? (*s.correct ? "yes" : "no") : "n/a") << " | " << r.agent_calls << " | "
       << r.tokens << " |\n";
  }
  auto table = [&](const char* title, const std::map<std::string, GroupStats>& groups) {
    os << "\n## By " << title << "\n\n";
    os << "| " << title << " | Instances | With truth | Correct | SA | Time (s) | Agent Calls "
          "| Tokens |\n";
    os << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& [k, g] : groups) {
      os << "| " << k << " | " << g.instances << " | " << g.with_truth << " | " << g.correct
         << " | " << MaybeFixed(g.sa, 4) << " | " << Fixed(g.mean_seconds, 2) << " | "
         << Fixed(g.mean_agent_calls, 1) << " | " << Fixed(g.mean_tokens, 0) << " |\n";
    }
  };
  table("dataset", by_dataset);
  table("difficulty", by_difficulty);
  if (!without_truth.empty()) {
    os << "\nWithout ground truth (excluded from SA):";
    for (const auto& id : without_truth) os << " " << id;
    os << "\n";
  }
  return os.str();
}

std::vector<RunRecord> RunBench(const std::vector<ProblemInstance>& instances,
                                const AgentFactory& make_agents, const PipelineConfig& config,
                                int jobs) {
  std::vector<RunRecord> records(instances.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < instances.size(); i = next++) {
      std::unique_ptr<AgentSuite> agents = make_agents();
      records[i] = RunPipeline(instances[i], *agents, config);
    }
  };
  size_t n = std::min<size_t>(std::max(1, jobs), std::max<size_t>(1, instances.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

// ---------------------------------------------------------------------------
// Perturbations

std::string_view PerturbOpName(PerturbOp op) {
  switch (op) {
    case PerturbOp::kDropConstraint: return "drop_constraint";
    case PerturbOp::kDropVariable: return "drop_variable";
    case PerturbOp::kFlipRelop: return "flip_relop";
    case PerturbOp::kScaleRhs: return "scale_rhs";
    case PerturbOp::kDropSumGuard: return "drop_sum_guard";
    case PerturbOp::kFlipVarType: return "flip_var_type";
  }
  return "?";
}

const std::vector<PerturbOp>& AllPerturbOps() {
  static const std::vector<PerturbOp> ops = {
      PerturbOp::kDropConstraint, PerturbOp::kDropVariable, PerturbOp::kFlipRelop,
      PerturbOp::kScaleRhs,       PerturbOp::kDropSumGuard, PerturbOp::kFlipVarType};
  return ops;
}

std::optional<PerturbOp> ParsePerturbOp(std::string_view name) {
  for (PerturbOp op : AllPerturbOps()) {
    if (PerturbOpName(op) == name) return op;
  }
  return std::nullopt;
}

namespace {

size_t Pick(std::mt19937_64& rng, size_t n) { return static_cast<size_t>(rng() % n); }

// The expression with every term mentioning `symbol` removed; nullopt when
// nothing is left.
std::optional<Expr> RemoveSymbol(const Expr& e, const std::string& symbol) {
  switch (e.kind) {
    case ExprKind::kNumber:
      return e;
    case ExprKind::kRef:
      if (e.symbol == symbol) return std::nullopt;
      return e;
    case ExprKind::kNegate: {
      auto inner = RemoveSymbol(e.operands[0], symbol);
      if (!inner) return std::nullopt;
      return Expr::Unary(ExprKind::kNegate, std::move(*inner));
    }
    case ExprKind::kAdd:
    case ExprKind::kSub: {
      auto l = RemoveSymbol(e.operands[0], symbol);
      auto r = RemoveSymbol(e.operands[1], symbol);
      if (!l && !r) return std::nullopt;
      if (!l) {
        return e.kind == ExprKind::kAdd ? std::move(*r)
                                        : Expr::Unary(ExprKind::kNegate, std::move(*r));
      }
      if (!r) return l;
      return Expr::Binary(e.kind, std::move(*l), std::move(*r));
    }
    case ExprKind::kMul: {
      auto l = RemoveSymbol(e.operands[0], symbol);
      auto r = RemoveSymbol(e.operands[1], symbol);
      if (!l || !r) return std::nullopt;
      return Expr::Binary(ExprKind::kMul, std::move(*l), std::move(*r));
    }
    case ExprKind::kSum: {
      auto body = RemoveSymbol(e.operands[0], symbol);
      if (!body) return std::nullopt;
      return Expr::Sum(e.binders, e.guard, std::move(*body));
    }
  }
  return e;
}

// Visits every guard slot (sum guards and quantifier guards) of a constraint.
void CollectGuards(Expr& e, std::vector<std::optional<Guard>*>& out) {
  if (e.kind == ExprKind::kSum && e.guard) out.push_back(&e.guard);
  for (auto& op : e.operands) CollectGuards(op, out);
}

struct ParsedModel {
  std::vector<ConstraintAst> constraints;
  std::optional<Expr> objective;
};

ParsedModel ParseAll(const OptimizationModel& m) {
  ParsedModel p;
  SymbolKinds kinds = m.Kinds();
  for (const auto& c : m.constraints) p.constraints.push_back(ParseConstraint(c.formulation, kinds));
  if (m.objective) p.objective = ParseExpression(m.objective->formulation, kinds);
  return p;
}

std::optional<OptimizationModel> DropConstraint(const OptimizationModel& m, std::mt19937_64& rng) {
  if (m.constraints.empty()) return std::nullopt;
  OptimizationModel out = m;
  out.constraints.erase(out.constraints.begin() + static_cast<long>(Pick(rng, m.constraints.size())));
  return out;
}

std::optional<OptimizationModel> DropVariable(const OptimizationModel& m, std::mt19937_64& rng) {
  if (m.variables.size() < 2) return std::nullopt;
  size_t vi = Pick(rng, m.variables.size());
  std::string sym = m.variables[vi].symbol;
  ParsedModel parsed = ParseAll(m);
  OptimizationModel out = m;
  out.variables.erase(out.variables.begin() + static_cast<long>(vi));
  SymbolKinds kinds = out.Kinds();
  out.constraints.clear();
  for (size_t i = 0; i < m.constraints.size(); ++i) {
    ConstraintAst c = parsed.constraints[i];
    if (c.domain) {
      if (c.lhs.symbol == sym) continue;
      out.constraints.push_back(m.constraints[i]);
      continue;
    }
    auto l = RemoveSymbol(c.lhs, sym);
    auto r = RemoveSymbol(c.rhs, sym);
    bool live = (l && MentionsVariable(*l, kinds)) || (r && MentionsVariable(*r, kinds));
    if (!live) continue;
    c.lhs = l ? std::move(*l) : Expr::Number(0);
    c.rhs = r ? std::move(*r) : Expr::Number(0);
    Constraint kept = m.constraints[i];
    kept.formulation = PrintCanonical(c);
    out.constraints.push_back(std::move(kept));
  }
  if (out.objective && parsed.objective) {
    auto obj = RemoveSymbol(*parsed.objective, sym);
    out.objective->formulation = PrintCanonical(obj ? *obj : Expr::Number(0));
  }
  return out;
}

std::optional<OptimizationModel> FlipRelop(const OptimizationModel& m, std::mt19937_64& rng) {
  ParsedModel parsed = ParseAll(m);
  std::vector<size_t> sites;
  for (size_t i = 0; i < parsed.constraints.size(); ++i) {
    const auto& c = parsed.constraints[i];
    if (!c.domain && c.relop != Relop::kEq) sites.push_back(i);
  }
  if (sites.empty()) return std::nullopt;
  size_t i = sites[Pick(rng, sites.size())];
  ConstraintAst c = parsed.constraints[i];
  c.relop = c.relop == Relop::kLe ? Relop::kGe : Relop::kLe;
  OptimizationModel out = m;
  out.constraints[i].formulation = PrintCanonical(c);
  return out;
}

std::optional<OptimizationModel> ScaleRhs(const OptimizationModel& m, std::mt19937_64& rng) {
  ParsedModel parsed = ParseAll(m);
  std::vector<size_t> sites;
  for (size_t i = 0; i < parsed.constraints.size(); ++i) {
    if (!parsed.constraints[i].domain) sites.push_back(i);
  }
  if (sites.empty()) return std::nullopt;
  size_t i = sites[Pick(rng, sites.size())];
  double factor = rng() % 2 ? 2.0 : 0.5;
  ConstraintAst c = parsed.constraints[i];
  if (c.rhs.kind == ExprKind::kNumber) {
    c.rhs.number *= factor;
  } else {
    c.rhs = Expr::Binary(ExprKind::kMul, Expr::Number(factor), std::move(c.rhs));
  }
  OptimizationModel out = m;
  out.constraints[i].formulation = PrintCanonical(c);
  return out;
}

std::optional<OptimizationModel> DropGuard(const OptimizationModel& m, std::mt19937_64& rng) {
  ParsedModel parsed = ParseAll(m);
  struct Site {
    size_t constraint;  // constraints.size() = objective
    size_t slot;
  };
  std::vector<Site> sites;
  for (size_t i = 0; i < parsed.constraints.size(); ++i) {
    std::vector<std::optional<Guard>*> slots;
    auto& c = parsed.constraints[i];
    CollectGuards(c.lhs, slots);
    if (!c.domain) CollectGuards(c.rhs, slots);
    for (auto& q : c.quantifiers) {
      if (q.guard) slots.push_back(&q.guard);
    }
    for (size_t s = 0; s < slots.size(); ++s) sites.push_back({i, s});
  }
  if (parsed.objective) {
    std::vector<std::optional<Guard>*> slots;
    CollectGuards(*parsed.objective, slots);
    for (size_t s = 0; s < slots.size(); ++s) sites.push_back({parsed.constraints.size(), s});
  }
  if (sites.empty()) return std::nullopt;
  Site site = sites[Pick(rng, sites.size())];
  OptimizationModel out = m;
  std::vector<std::optional<Guard>*> slots;
  if (site.constraint < parsed.constraints.size()) {
    auto& c = parsed.constraints[site.constraint];
    CollectGuards(c.lhs, slots);
    if (!c.domain) CollectGuards(c.rhs, slots);
    for (auto& q : c.quantifiers) {
      if (q.guard) slots.push_back(&q.guard);
    }
    slots[site.slot]->reset();
    out.constraints[site.constraint].formulation = PrintCanonical(c);
  } else {
    CollectGuards(*parsed.objective, slots);
    slots[site.slot]->reset();
    out.objective->formulation = PrintCanonical(*parsed.objective);
  }
  return out;
}

std::optional<OptimizationModel> FlipVarType(const OptimizationModel& m, std::mt19937_64& rng) {
  ParsedModel parsed = ParseAll(m);
  std::set<std::string> declared;
  for (const auto& c : parsed.constraints) {
    if (c.domain) declared.insert(c.lhs.symbol);
  }
  std::vector<size_t> sites;
  for (size_t i = 0; i < m.variables.size(); ++i) {
    const auto& v = m.variables[i];
    if (v.type != VarType::kContinuous || declared.count(v.symbol)) sites.push_back(i);
  }
  if (sites.empty()) return std::nullopt;
  size_t vi = sites[Pick(rng, sites.size())];
  OptimizationModel out = m;
  DecisionVariable& v = out.variables[vi];
  bool binary = v.type == VarType::kBinary;
  v.type = VarType::kContinuous;
  if (binary) {
    v.lower_bound = 0.0;
    v.upper_bound = 1.0;
  }
  // Integrality declarations would otherwise restore the type on grounding.
  out.constraints.clear();
  for (size_t i = 0; i < m.constraints.size(); ++i) {
    const auto& c = parsed.constraints[i];
    if (c.domain && c.lhs.symbol == v.symbol) continue;
    out.constraints.push_back(m.constraints[i]);
  }
  return out;
}

std::string CanonicalKey(OptimizationModel m) {
  m.provenance = Provenance{};
  return SerializeModel(m);
}

}  // namespace

std::optional<OptimizationModel> ApplyPerturbation(const OptimizationModel& m, PerturbOp op,
                                                   std::mt19937_64& rng) {
  switch (op) {
    case PerturbOp::kDropConstraint: return DropConstraint(m, rng);
    case PerturbOp::kDropVariable: return DropVariable(m, rng);
    case PerturbOp::kFlipRelop: return FlipRelop(m, rng);
    case PerturbOp::kScaleRhs: return ScaleRhs(m, rng);
    case PerturbOp::kDropSumGuard: return DropGuard(m, rng);
    case PerturbOp::kFlipVarType: return FlipVarType(m, rng);
  }
  return std::nullopt;
}

std::vector<OptimizationModel> PerturbModel(const OptimizationModel& model,
                                            const PerturbationSpec& spec) {
  if (spec.k < 1) throw Error(ErrorCode::kPrecondition, "perturbation k must be >= 1");
  if (spec.ops.empty()) throw Error(ErrorCode::kPrecondition, "no perturbation op enabled");
  if (auto report = ValidateModel(model); !report.valid()) {
    throw Error(ErrorCode::kPrecondition, "cannot perturb an invalid model:\n" + report.Render());
  }
  if (model.constraints.empty()) {
    throw Error(ErrorCode::kPrecondition, "cannot perturb a model without constraints");
  }
  constexpr int kMaxDraws = 100;
  std::mt19937_64 rng(spec.seed);
  std::set<std::string> seen = {CanonicalKey(model)};
  std::vector<OptimizationModel> out;
  for (int slot = 0; slot < spec.k; ++slot) {
    bool filled = false;
    for (int draw = 0; draw < kMaxDraws && !filled; ++draw) {
      PerturbOp op = spec.ops[Pick(rng, spec.ops.size())];
      std::optional<OptimizationModel> cand;
      try {
        cand = ApplyPerturbation(model, op, rng);
      } catch (const Error&) {
        continue;
      }
      if (!cand || cand->variables.empty() || !ValidateModel(*cand).valid()) continue;
      if (!seen.insert(CanonicalKey(*cand)).second) continue;
      cand->provenance = Provenance{};
      cand->provenance.kind = Provenance::Kind::kPerturbed;
      cand->provenance.seed = spec.seed;
      cand->provenance.op = std::string(PerturbOpName(op));
      out.push_back(std::move(*cand));
      filled = true;
    }
    if (!filled) {
      throw Error(ErrorCode::kPerturbationExhausted,
                  "no new valid perturbation after 100 draws for slot " + std::to_string(slot));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verifier study

namespace {

struct Resource {
  const char* name;
  const char* use;
  const char* available;
};

constexpr Resource kResources[] = {
    {"Labor Hours Limit", "LaborHoursPerUnit", "LaborHoursAvailable"},
    {"Machine Time Limit", "MachineTimePerUnit", "MachineTimeAvailable"},
    {"Storage Space Limit", "StorageSpacePerUnit", "StorageSpaceAvailable"},
    {"Energy Budget Limit", "EnergyPerUnit", "EnergyAvailable"},
};

Parameter Scalar(std::string symbol, std::string def, double v) {
  Parameter p;
  p.symbol = std::move(symbol);
  p.definition = std::move(def);
  p.value = Json(v);
  return p;
}

Parameter Vector(std::string symbol, std::string def, const std::vector<double>& v) {
  Parameter p;
  p.symbol = std::move(symbol);
  p.definition = std::move(def);
  p.value = Json(v);
  p.shape = {static_cast<std::int64_t>(v.size())};
  return p;
}

StudyPositive MakeSynthetic(const std::string& difficulty, int level, int index,
                            std::mt19937_64& rng) {
  const int n = 3 + level;          // products
  const int resources = 2 + level;  // resource rows
  const int max_units = 4 + level;
  OptimizationModel m;
  Parameter products;
  products.symbol = "Products";
  products.definition = "Number of products";
  products.value = Json(n);
  m.parameters.push_back(products);
  m.parameters.push_back(Scalar("MaxUnitsPerProduct", "Production cap per product", max_units));
  std::vector<double> profit(n);
  for (auto& p : profit) p = static_cast<double>(1 + rng() % 20);
  m.parameters.push_back(Vector("ProfitPerUnit", "Profit per unit of each product", profit));

  DecisionVariable x;
  x.symbol = "UnitsProduced";
  x.definition = "Units of each product to make";
  x.type = VarType::kInteger;
  x.shape = {std::string("Products")};
  x.upper_bound = max_units;
  m.variables.push_back(x);
  DecisionVariable overtime;
  overtime.symbol = "OvertimeShifts";
  overtime.definition = "Overtime shifts adding labor hours";
  overtime.type = VarType::kInteger;
  overtime.upper_bound = 2;
  m.variables.push_back(overtime);
  double shift_hours = static_cast<double>(2 + rng() % 4);
  double shift_cost = static_cast<double>(1 + rng() % 10);
  m.parameters.push_back(Scalar("OvertimeHoursPerShift", "Labor hours per overtime shift",
                                shift_hours));
  m.parameters.push_back(Scalar("OvertimeCostPerShift", "Cost of one overtime shift", shift_cost));

  for (int r = 0; r < resources; ++r) {
    const Resource& res = kResources[r];
    std::vector<double> use(n);
    for (auto& u : use) u = static_cast<double>(1 + rng() % 9);
    double total = std::accumulate(use.begin(), use.end(), 0.0);
    double cap = std::floor(total * max_units * 0.4) +
                 *std::max_element(use.begin(), use.end());
    m.parameters.push_back(Vector(res.use, std::string("Use of ") + res.name, use));
    m.parameters.push_back(Scalar(res.available, std::string("Available for ") + res.name, cap));
    std::string rhs = res.available;
    if (r == 0) rhs += " + OvertimeHoursPerShift * OvertimeShifts";
    m.constraints.push_back({res.name, std::string("Respect the ") + res.name,
                             std::string("sum(i in Products, ") + res.use +
                                 "[i] * UnitsProduced[i]) <= " + rhs});
  }
  m.constraints.push_back({"Non-negativity", "Production is non-negative",
                           "UnitsProduced[i] >= 0 forall i in Products"});
  if (level >= 1) {
    m.parameters.push_back(Scalar("MinimumTotalOutput", "Least total units to produce", 1));
    m.constraints.push_back({"Minimum Total Output", "Produce at least the minimum in total",
                             "sum(i in Products, UnitsProduced[i]) >= MinimumTotalOutput"});
  }
  if (level >= 2) {
    m.parameters.push_back(Scalar("MaxProductionGap", "Largest gap between two products", 3));
    m.constraints.push_back(
        {"Product Balance", "No product exceeds another by more than the gap",
         "UnitsProduced[i] <= UnitsProduced[j] + MaxProductionGap forall i in Products forall j "
         "in Products if i != j"});
  }
  m.objective = Objective{"Maximize total profit",
                          "sum(i in Products, ProfitPerUnit[i] * UnitsProduced[i]) - "
                          "OvertimeCostPerShift * OvertimeShifts",
                          ObjectiveSense::kMaximize};

  StudyPositive p;
  p.id = "synthetic-" + difficulty + "-" + std::to_string(index);
  p.difficulty = difficulty;
  p.description = "A plant makes " + std::to_string(n) + " products from " +
                  std::to_string(resources) +
                  " limited resources, may buy overtime shifts, and chooses integer production "
                  "quantities to maximize profit.";
  p.model = std::move(m);
  p.truth = StructureFromModel(p.model, "Integer linear programming",
                               "Multi-resource production planning");
  return p;
}

}  // namespace

std::vector<StudyPositive> SyntheticPositives(int per_difficulty, std::uint64_t seed) {
  static const char* kLevels[] = {"easy", "medium", "hard"};
  std::vector<StudyPositive> out;
  for (int level = 0; level < 3; ++level) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(level) * 1000003ULL);
    for (int i = 0; i < per_difficulty; ++i) {
      out.push_back(MakeSynthetic(kLevels[level], level, i, rng));
    }
  }
  return out;
}

StudyPositive PositiveFromEntry(const LibraryEntry& entry, std::string difficulty) {
  StudyPositive p;
  p.id = entry.name;
  p.difficulty = std::move(difficulty);
  p.description = entry.description;
  p.model = entry.model;
  p.truth = ReferenceStructure(entry);
  return p;
}

ModelLibrary LibraryFromPositives(const std::vector<StudyPositive>& positives) {
  std::vector<LibraryEntry> entries;
  for (const auto& p : positives) {
    LibraryEntry e;
    e.name = p.id;
    e.problem_type = p.truth.problem_type;
    e.specific_type = p.truth.specific_type;
    e.subdivisions = p.truth.subdivisions;
    e.description = p.description;
    e.model = p.model;
    entries.push_back(std::move(e));
  }
  return ModelLibrary(std::move(entries));
}

void Confusion::Add(bool perturbed, bool flagged) {
  if (perturbed) {
    (flagged ? tp : fn) += 1;
  } else {
    (flagged ? fp : tn) += 1;
  }
}

std::optional<double> Confusion::precision() const {
  if (tp + fp == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> Confusion::recall() const {
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

namespace {

void Merge(Confusion& into, const Confusion& c) {
  into.tp += c.tp;
  into.fp += c.fp;
  into.fn += c.fn;
  into.tn += c.tn;
  into.abstain += c.abstain;
}

void Merge(StratumMetrics& into, const StratumMetrics& s) {
  into.positives += s.positives;
  into.negatives += s.negatives;
  Merge(into.structure, s.structure);
  Merge(into.solution, s.solution);
  Merge(into.combined, s.combined);
  for (const auto& [k, c] : s.structure_by_op) Merge(into.structure_by_op[k], c);
  for (const auto& [k, c] : s.solution_by_op) Merge(into.solution_by_op[k], c);
}

Json ConfusionJson(const Confusion& c) {
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"fn", c.fn},
          {"tn", c.tn},
          {"abstain", c.abstain},
          {"precision", MaybeJson(c.precision())},
          {"recall", MaybeJson(c.recall())}};
}

Json StratumJson(const StratumMetrics& s) {
  Json doc = {{"positives", s.positives},
              {"negatives", s.negatives},
              {"samples", s.samples()},
              {"structure", ConfusionJson(s.structure)},
              {"solution", ConfusionJson(s.solution)},
              {"combined", ConfusionJson(s.combined)}};
  doc["structure_by_op"] = Json::object();
  for (const auto& [k, c] : s.structure_by_op) doc["structure_by_op"][k] = ConfusionJson(c);
  doc["solution_by_op"] = Json::object();
  for (const auto& [k, c] : s.solution_by_op) doc["solution_by_op"][k] = ConfusionJson(c);
  return doc;
}

}  // namespace

StudyReport VerifierStudy(const std::vector<StudyPositive>& positives, AgentSuite& agents,
                          const StudyOptions& options) {
  StudyReport report;
  for (const auto& pos : positives) {
    StratumMetrics& stratum = report.strata[pos.difficulty.empty() ? "unspecified"
                                                                   : pos.difficulty];
    std::vector<OptimizationModel> samples = {pos.model};
    for (auto& neg : PerturbModel(pos.model, options.spec)) samples.push_back(std::move(neg));
    ProblemInstance d;
    d.id = pos.id;
    d.description = pos.description;

    for (size_t i = 0; i < samples.size(); ++i) {
      const OptimizationModel& m = samples[i];
      bool perturbed = i > 0;
      std::string op = perturbed ? m.provenance.op : "original";
      (perturbed ? stratum.negatives : stratum.positives) += 1;

      std::optional<bool> sflag;
      try {
        ModelingStructure interpreted = agents.InterpretStructure(m);
        sflag = agents.EvaluateStructure(pos.truth, interpreted, m).score == 0;
      } catch (const std::exception&) {
      }
      std::optional<bool> vflag;
      if (options.solution_side) {
        try {
          GroundedModel g = Ground(m);
          Solution x = Solve(g, options.solver);
          if (x.status == SolveStatus::kInfeasible || x.status == SolveStatus::kUnbounded) {
            vflag = true;
          } else if (x.status != SolveStatus::kError) {
            FeasibilityReport fr = CheckFeasibility(g, x.assignment, options.tolerances);
            std::string narrative = agents.InterpretSolution(d, pos.truth, m, x);
            Verdict v = agents.EvaluateSolution(d, pos.truth, m, x, narrative, fr);
            vflag = v.score == 0 || !fr.feasible;
          }
        } catch (const std::exception&) {
        }
      }

      auto tally = [&](Confusion& c, std::optional<bool> flag) {
        if (flag) {
          c.Add(perturbed, *flag);
        } else {
          ++c.abstain;
        }
      };
      tally(stratum.structure, sflag);
      tally(stratum.structure_by_op[op], sflag);
      if (options.solution_side) {
        tally(stratum.solution, vflag);
        tally(stratum.solution_by_op[op], vflag);
      }
      std::optional<bool> any;
      if (sflag || vflag) any = sflag.value_or(false) || vflag.value_or(false);
      tally(stratum.combined, any);
    }
  }
  for (const auto& [k, s] : report.strata) Merge(report.overall, s);
  return report;
}

Json StudyReport::ToJson() const {
  Json doc;
  doc["positive_class"] = "incorrect model detected";
  doc["strata"] = Json::object();
  for (const auto& [k, s] : strata) doc["strata"][k] = StratumJson(s);
  doc["overall"] = StratumJson(overall);
  return doc;
}

std::string StudyReport::ToMarkdown() const {
  std::ostringstream os;
  os << "# Verifier study\n\nPositive class: incorrect (perturbed) model detected.\n\n";
  os << "| Difficulty | Samples | Positives | Negatives | Structure precision | Structure "
        "recall | Solution precision | Solution recall | Combined precision | Combined recall "
        "| Abstentions |\n";
  os << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  auto row = [&](const std::string& name, const StratumMetrics& s) {
    os << "| " << name << " | " << s.samples() << " | " << s.positives << " | " << s.negatives
       << " | " << MaybeFixed(s.structure.precision(), 3) << " | "
       << MaybeFixed(s.structure.recall(), 3) << " | " << MaybeFixed(s.solution.precision(), 3)
       << " | " << MaybeFixed(s.solution.recall(), 3) << " | "
       << MaybeFixed(s.combined.precision(), 3) << " | " << MaybeFixed(s.combined.recall(), 3)
       << " | " << s.structure.abstain + s.solution.abstain << " |\n";
  };
  for (const auto& [k, s] : strata) row(k, s);
  row("all", overall);
  os << "\n## Structure-side recall by operator\n\n| Operator | TP | FN | Recall |\n|---|---|---|---|\n";
  for (const auto& [op, c] : overall.structure_by_op) {
    if (op == "original") continue;
    os << "| " << op << " | " << c.tp << " | " << c.fn << " | " << MaybeFixed(c.recall(), 3)
       << " |\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Oracles and tables

TourResult TspTourOracle(const std::vector<std::vector<double>>& cost) {
  const size_t n = cost.size();
  if (n > 10) throw Error(ErrorCode::kTooLarge, "tour oracle handles at most 10 cities");
  for (const auto& row : cost) {
    if (row.size() != n) throw Error(ErrorCode::kPrecondition, "cost matrix must be square");
  }
  TourResult best;
  if (n == 0) return best;
  if (n == 1) {
    best.tour = {0};
    return best;
  }
  std::vector<int> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  bool have = false;
  do {
    double c = cost[0][static_cast<size_t>(rest.front())];
    for (size_t i = 0; i + 1 < rest.size(); ++i) {
      c += cost[static_cast<size_t>(rest[i])][static_cast<size_t>(rest[i + 1])];
    }
    c += cost[static_cast<size_t>(rest.back())][0];
    // Permutations arrive in lexicographic order, so strict improvement keeps
    // the smallest tour among ties.
    if (!have || c < best.cost) {
      have = true;
      best.cost = c;
      best.tour = {0};
      best.tour.insert(best.tour.end(), rest.begin(), rest.end());
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

std::string EfficiencyTable(const std::vector<RunRecord>& records,
                            const std::vector<std::string>& datasets) {
  if (records.empty()) return "";
  struct Acc {
    int runs = 0;
    double seconds = 0.0, calls = 0.0, tokens = 0.0;
  };
  std::map<std::string, Acc> by_ds;
  std::vector<std::string> stage_order;
  std::map<std::string, double> stage_tokens;
  for (size_t i = 0; i < records.size(); ++i) {
    const RunRecord& r = records[i];
    Acc& a = by_ds[i < datasets.size() ? datasets[i] : "all"];
    ++a.runs;
    a.seconds += r.totals.wall_time;
    a.calls += static_cast<double>(r.totals.agent_calls);
    a.tokens += static_cast<double>(r.totals.tokens());
    for (const auto& e : r.events) {
      if (!IsLlmStage(e.stage)) continue;
      if (!stage_tokens.count(e.stage)) stage_order.push_back(e.stage);
      stage_tokens[e.stage] +=
          static_cast<double>(e.usage.prompt_tokens + e.usage.completion_tokens);
    }
  }
  std::ostringstream os;
  os << "| Dataset | Runs | Time (s) | Agent Calls | Tokens |\n|---|---|---|---|---|\n";
  for (const auto& [name, a] : by_ds) {
    os << "| " << name << " | " << a.runs << " | " << Fixed(a.seconds / a.runs, 2) << " | "
       << Fixed(a.calls / a.runs, 1) << " | " << Fixed(a.tokens / a.runs, 0) << " |\n";
  }
  if (!stage_order.empty()) {
    os << "\n| Stage | Mean tokens per run |\n|---|---|\n";
    for (const auto& st : stage_order) {
      os << "| " << st << " | " << Fixed(stage_tokens[st] / static_cast<double>(records.size()), 1)
         << " |\n";
    }
  }
  return os.str();
}

}  // namespace optverifier
