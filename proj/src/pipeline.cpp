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

#include "optverifier/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

namespace optverifier {

void PipelineConfig::Check() const {
  auto need = [](int v, const char* name) {
    if (v < 0) throw Error(ErrorCode::kConfigError, std::string(name) + " must be >= 0");
  };
  need(max_structure_rounds, "max_structure_rounds");
  need(max_solution_rounds, "max_solution_rounds");
  need(max_total_refinements, "max_total_refinements");
  need(max_compile_retries, "max_compile_retries");
}

std::string_view OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kAccepted: return "accepted";
    case Outcome::kBudgetExhausted: return "budget_exhausted";
    case Outcome::kFailed: return "failed";
  }
  return "failed";
}

bool IsLlmStage(std::string_view stage) {
  return std::find(std::begin(kLlmStages), std::end(kLlmStages), stage) !=
         std::end(kLlmStages);
}

void RunRecord::Recount() {
  double wall = totals.wall_time;
  totals = RunTotals{};
  totals.wall_time = wall;
  for (const auto& e : events) {
    if (IsLlmStage(e.stage)) ++totals.agent_calls;
    totals.completions += e.completions;
    totals.prompt_tokens += e.usage.prompt_tokens;
    totals.completion_tokens += e.usage.completion_tokens;
    totals.estimated = totals.estimated || e.usage.estimated;
  }
}

namespace {

Json VerdictToJson(const Verdict& v) {
  Json doc = {{"score", v.score}, {"comment", v.comment}};
  if (v.anomaly) doc["anomaly"] = true;
  return doc;
}

Json DiffToJson(const StructureDiff& diff) {
  Json doc;
  doc["similarity"] = diff.similarity;
  doc["missing_low_level"] = diff.missing_low_level;
  doc["extra_low_level"] = diff.extra_low_level;
  doc["level_mismatch"] = Json::array();
  for (const auto& m : diff.level_mismatch) {
    doc["level_mismatch"].push_back(
        {{"level", m.level}, {"reference", m.reference}, {"candidate", m.candidate}});
  }
  return doc;
}

Json FeasibilityToJson(const FeasibilityReport& r) {
  Json doc;
  doc["feasible"] = r.feasible;
  doc["objective_recomputed"] = r.objective_recomputed;
  doc["violated_rows"] = Json::array();
  for (const auto& v : r.violated_rows) {
    doc["violated_rows"].push_back({{"row", v.row},
                                    {"lhs", v.lhs},
                                    {"relop", std::string(RelopText(v.relop))},
                                    {"rhs", v.rhs},
                                    {"magnitude", v.magnitude}});
  }
  auto vars = [](const std::vector<VariableViolation>& list) {
    Json arr = Json::array();
    for (const auto& v : list) {
      arr.push_back({{"variable", v.variable},
                     {"value", v.value},
                     {"magnitude", v.magnitude},
                     {"detail", v.detail}});
    }
    return arr;
  };
  doc["integrality_violations"] = vars(r.integrality_violations);
  doc["bound_violations"] = vars(r.bound_violations);
  return doc;
}

// Errors a refinement can plausibly repair: the model text itself is wrong.
bool IsModelDefect(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError:
    case ErrorCode::kNonstrictRequired:
    case ErrorCode::kNonlinear:
    case ErrorCode::kUnboundIndex:
    case ErrorCode::kIndexOutOfRange:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kNameCollision:
    case ErrorCode::kSchemaError:
      return true;
    default:
      return false;
  }
}

using Clock = std::chrono::steady_clock;

class Runner {
 public:
  Runner(const ProblemInstance& d, AgentSuite& agents, const PipelineConfig& config)
      : d_(d), agents_(agents), config_(config), start_(Clock::now()) {
    record_.instance_id = d.id;
  }

  RunRecord Run(const std::optional<OptimizationModel>& m0) {
    agents_.SetEventSink([this](AgentEvent e) { OnAgentEvent(std::move(e)); });
    try {
      config_.Check();
      Execute(m0);
    } catch (const Error& e) {
      record_.outcome = Outcome::kFailed;
      record_.error_code = std::string(ErrorCodeName(e.code()));
      record_.error = e.what();
    } catch (const std::exception& e) {
      record_.outcome = Outcome::kFailed;
      record_.error_code = "INTERNAL";
      record_.error = e.what();
    }
    agents_.SetEventSink(nullptr);
    if (!record_.models.empty()) record_.final_model = record_.models.back().model;
    record_.totals.wall_time = Elapsed();
    record_.Recount();
    return std::move(record_);
  }

 private:
  double Elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  void OnAgentEvent(AgentEvent e) {
    RunEvent ev;
    ev.stage = std::move(e.stage);
    ev.detail = std::move(e.detail);
    ev.seconds = e.seconds;
    ev.started_at = std::max(0.0, Elapsed() - e.seconds);
    ev.completions = e.completions;
    ev.usage = e.usage;
    ev.request_digest = std::move(e.request_digest);
    ev.response_digest = std::move(e.response_digest);
    ev.notes = std::move(e.notes);
    record_.events.push_back(std::move(ev));
  }

  RunEvent& Last(std::string_view stage) {
    for (auto it = record_.events.rbegin(); it != record_.events.rend(); ++it) {
      if (it->stage == stage) return *it;
    }
    throw Error(ErrorCode::kPrecondition, "no event for stage " + std::string(stage));
  }

  RunEvent& Deterministic(std::string stage, std::string detail, double began) {
    RunEvent ev;
    ev.stage = std::move(stage);
    ev.detail = std::move(detail);
    ev.started_at = began;
    ev.seconds = Elapsed() - began;
    record_.events.push_back(std::move(ev));
    return record_.events.back();
  }

  bool CanRefine() const { return record_.refinements < config_.max_total_refinements; }

  void Refine(const std::string& comment, const std::string& side, RefineContext ctx) {
    ctx.step = record_.refinements + 1;
    OptimizationModel next = agents_.Refine(d_, s_, m_, comment, ctx);
    ++record_.refinements;
    ModelVersion v;
    v.step = record_.refinements;
    v.trigger = comment;
    v.side = side;
    v.no_change = SerializeModel(WithoutProvenance(next)) == SerializeModel(WithoutProvenance(m_));
    v.model = next;
    RunEvent& ev = Last("refine");
    ev.payload["step"] = v.step;
    ev.payload["trigger"] = comment;
    if (v.no_change) ev.notes.push_back("no_change");
    record_.models.push_back(std::move(v));
    m_ = std::move(next);
  }

  static OptimizationModel WithoutProvenance(OptimizationModel m) {
    m.provenance = Provenance{};
    return m;
  }

  // Returns false when the loop gave up; the outcome is then set.
  bool StructureLoop() {
    int rounds = 0;
    while (true) {
      ModelingStructure interpreted = agents_.InterpretStructure(m_);
      Last("stru_interp").payload["structure"] = StructureToJson(interpreted);
      Verdict v = agents_.EvaluateStructure(s_, interpreted, m_);
      RunEvent& ev = Last("stru_eval");
      ev.payload["verdict"] = VerdictToJson(v);
      ev.payload["structure_diff"] = DiffToJson(DiffStructures(s_, interpreted));
      record_.structure_verdict = v;
      if (v.score == 1) return true;
      if (rounds >= config_.max_structure_rounds || !CanRefine()) {
        record_.outcome = Outcome::kBudgetExhausted;
        return false;
      }
      RefineContext ctx;
      ctx.side = RefineSide::kStructure;
      ctx.interpreted = interpreted;
      Refine(v.comment, "structure", ctx);
      ++rounds;
    }
  }

  // Grounds the current model, refining on model defects. Returns nullopt
  // when the retry budget ran out.
  std::optional<GroundedModel> Compile() {
    int retries = 0;
    while (true) {
      double began = Elapsed();
      try {
        OptimizationModel target = m_;
        Bindings bindings;
        if (m_.HasExternalParameters()) {
          if (config_.toy_instantiation) {
            ToyInstance toy = InstantiateToy(m_, config_.toy_seed, config_.toy_dims);
            target = std::move(toy.model);
            bindings = std::move(toy.bindings);
          } else if (!config_.data_path.empty()) {
            bindings = LoadExternalParameters(m_, config_.data_path);
            target = BindModel(m_, bindings);
          }
        }
        GroundedModel g = Ground(target, bindings);
        RunEvent& ev = Deterministic("compile", "", began);
        ev.payload["variables"] = g.variables.size();
        ev.payload["rows"] = g.rows.size();
        for (const auto& w : g.warnings) ev.notes.push_back(w);
        return g;
      } catch (const Error& e) {
        RunEvent& ev = Deterministic("compile", "", began);
        std::string code(ErrorCodeName(e.code()));
        ev.notes.push_back("error: " + code + ": " + e.what());
        if (!IsModelDefect(e.code())) throw;
        if (retries >= config_.max_compile_retries || !CanRefine()) {
          record_.outcome = Outcome::kBudgetExhausted;
          record_.error_code = code;
          record_.error = e.what();
          return std::nullopt;
        }
        RefineContext ctx;
        ctx.side = RefineSide::kStructure;
        Refine("The model could not be compiled (" + code + "): " + e.what() +
                   "\nPlease correct the formulation.",
               "compile", ctx);
        ++retries;
      }
    }
  }

  void Execute(const std::optional<OptimizationModel>& m0) {
    s_ = agents_.Distill(d_);
    record_.structure = s_;
    Last("distill").payload["structure"] = StructureToJson(s_);
    if (m0) {
      m_ = *m0;
      m_.provenance = Provenance{};
      m_.provenance.kind = Provenance::Kind::kExternallySupplied;
    } else {
      m_ = agents_.Formulate(d_, s_);
    }
    record_.models.push_back(ModelVersion{0, m_, "", "", false});

    if (!StructureLoop()) return;
    int solution_rounds = 0;
    while (true) {
      std::optional<GroundedModel> g = Compile();
      if (!g) return;

      double began = Elapsed();
      Solution x = Solve(*g, config_.solver);
      RunEvent& sev = Deterministic("solve", x.solver_id, began);
      sev.payload["status"] = std::string(SolveStatusName(x.status));
      if (x.objective_value) sev.payload["objective"] = *x.objective_value;
      record_.final_solution = x;
      record_.final_feasible.reset();

      std::string comment;
      RefineContext ctx;
      ctx.side = RefineSide::kSolution;
      ctx.solution = x;
      std::string side = "solution";
      if (x.status == SolveStatus::kError) {
        throw Error(ErrorCode::kSolverParseError, "solver reported an error: " + x.message);
      } else if (x.status == SolveStatus::kInfeasible) {
        comment = "The model is infeasible: no assignment satisfies all constraints. "
                  "Some constraint is too strict or has the wrong direction.";
        side = "solve";
      } else if (x.status == SolveStatus::kUnbounded) {
        comment = "The model is unbounded: the objective can improve without limit, so a "
                  "limiting constraint is missing or has the wrong direction.";
        side = "solve";
      } else {
        FeasibilityReport report = CheckFeasibility(*g, x.assignment, config_.tolerances);
        std::string rendered = report.Render();
        sev.payload["feasibility"] = FeasibilityToJson(report);
        record_.final_feasible = report.feasible;
        std::string narrative = agents_.InterpretSolution(d_, s_, m_, x);
        Verdict v = agents_.EvaluateSolution(d_, s_, m_, x, narrative, report);
        if (!report.feasible && v.score == 1) {
          // The deterministic gate outranks the evaluator.
          v = Verdict{0, rendered, false};
          Last("sol_eval").notes.push_back("overridden by feasibility check");
        }
        Last("sol_eval").payload["verdict"] = VerdictToJson(v);
        record_.solution_verdict = v;
        if (v.score == 1) {
          record_.outcome = Outcome::kAccepted;
          return;
        }
        comment = v.comment;
        ctx.narrative = narrative;
        ctx.feasibility = rendered;
      }

      if (solution_rounds >= config_.max_solution_rounds || !CanRefine()) {
        record_.outcome = Outcome::kBudgetExhausted;
        return;
      }
      Refine(comment, side, ctx);
      ++solution_rounds;
      if (config_.strict_reverify && !StructureLoop()) return;
    }
  }

  const ProblemInstance& d_;
  AgentSuite& agents_;
  const PipelineConfig& config_;
  Clock::time_point start_;
  RunRecord record_;
  ModelingStructure s_;
  OptimizationModel m_;
};

}  // namespace

RunRecord RunPipeline(const ProblemInstance& d, AgentSuite& agents,
                      const PipelineConfig& config) {
  return Runner(d, agents, config).Run(std::nullopt);
}

RunRecord VerifyAndRefine(const ProblemInstance& d, const OptimizationModel& m0,
                          AgentSuite& agents, const PipelineConfig& config) {
  if (auto report = ValidateModel(m0); !report.valid()) {
    throw Error(ErrorCode::kPrecondition,
                "verify_and_refine: supplied model is invalid:\n" + report.Render());
  }
  return Runner(d, agents, config).Run(m0);
}

Json RunRecordToJson(const RunRecord& r, bool timing) {
  Json doc;
  doc["instance_id"] = r.instance_id;
  doc["outcome"] = std::string(OutcomeName(r.outcome));
  if (!r.error_code.empty()) {
    doc["error"] = {{"code", r.error_code}, {"message", r.error}};
  }
  doc["refinements"] = r.refinements;
  doc["structure"] = r.structure ? StructureToJson(*r.structure) : Json(nullptr);
  doc["events"] = Json::array();
  for (size_t i = 0; i < r.events.size(); ++i) {
    const RunEvent& e = r.events[i];
    Json ev;
    ev["index"] = i;
    ev["stage"] = e.stage;
    if (!e.detail.empty()) ev["detail"] = e.detail;
    if (timing) {
      ev["started_at"] = e.started_at;
      ev["seconds"] = e.seconds;
    }
    if (IsLlmStage(e.stage)) {
      ev["completions"] = e.completions;
      ev["prompt_tokens"] = e.usage.prompt_tokens;
      ev["completion_tokens"] = e.usage.completion_tokens;
      if (e.usage.estimated) ev["tokens_estimated"] = true;
      if (!e.request_digest.empty()) ev["request_digest"] = e.request_digest;
      if (!e.response_digest.empty()) ev["response_digest"] = e.response_digest;
    }
    if (!e.notes.empty()) ev["notes"] = e.notes;
    if (!e.payload.empty()) ev["payload"] = e.payload;
    doc["events"].push_back(std::move(ev));
  }
  doc["models"] = Json::array();
  for (const auto& v : r.models) {
    Json mv;
    mv["step"] = v.step;
    if (!v.side.empty()) mv["side"] = v.side;
    if (!v.trigger.empty()) mv["trigger"] = v.trigger;
    if (v.no_change) mv["no_change"] = true;
    mv["model"] = ModelToJson(v.model);
    doc["models"].push_back(std::move(mv));
  }
  doc["final_model"] = r.final_model ? ModelToJson(*r.final_model) : Json(nullptr);
  doc["final_solution"] =
      r.final_solution ? SolutionToJson(*r.final_solution, timing) : Json(nullptr);
  if (r.final_feasible) doc["final_feasible"] = *r.final_feasible;
  doc["verdicts"] = {
      {"structure", r.structure_verdict ? VerdictToJson(*r.structure_verdict) : Json(nullptr)},
      {"solution", r.solution_verdict ? VerdictToJson(*r.solution_verdict) : Json(nullptr)}};
  Json totals = {{"agent_calls", r.totals.agent_calls},
                 {"completions", r.totals.completions},
                 {"prompt_tokens", r.totals.prompt_tokens},
                 {"completion_tokens", r.totals.completion_tokens},
                 {"tokens", r.totals.tokens()}};
  if (r.totals.estimated) totals["tokens_estimated"] = true;
  if (timing) totals["wall_time"] = r.totals.wall_time;
  doc["totals"] = std::move(totals);
  return doc;
}

std::vector<std::string> DiffModels(const OptimizationModel& before,
                                    const OptimizationModel& after) {
  std::vector<std::string> out;
  auto find_c = [](const OptimizationModel& m, const std::string& name) -> const Constraint* {
    for (const auto& c : m.constraints) {
      if (c.name == name) return &c;
    }
    return nullptr;
  };
  for (const auto& c : before.constraints) {
    const Constraint* other = find_c(after, c.name);
    if (!other) {
      out.push_back("- constraint " + c.name + ": " + c.formulation);
    } else if (other->formulation != c.formulation) {
      out.push_back("~ constraint " + c.name + ": " + c.formulation + "  =>  " +
                    other->formulation);
    }
  }
  for (const auto& c : after.constraints) {
    if (!find_c(before, c.name)) out.push_back("+ constraint " + c.name + ": " + c.formulation);
  }
  for (const auto& v : before.variables) {
    const DecisionVariable* other = after.FindVariable(v.symbol);
    if (!other) {
      out.push_back("- variable " + v.symbol);
    } else if (other->type != v.type) {
      out.push_back("~ variable " + v.symbol + ": " + std::string(VarTypeName(v.type)) +
                    " => " + std::string(VarTypeName(other->type)));
    }
  }
  for (const auto& v : after.variables) {
    if (!before.FindVariable(v.symbol)) {
      out.push_back("+ variable " + v.symbol + " (" + std::string(VarTypeName(v.type)) + ")");
    }
  }
  for (const auto& p : before.parameters) {
    if (!after.FindParameter(p.symbol)) out.push_back("- parameter " + p.symbol);
  }
  for (const auto& p : after.parameters) {
    if (!before.FindParameter(p.symbol)) out.push_back("+ parameter " + p.symbol);
  }
  std::string ob = before.objective ? before.objective->formulation : "";
  std::string oa = after.objective ? after.objective->formulation : "";
  if (ob != oa) out.push_back("~ objective: " + ob + "  =>  " + oa);
  return out;
}

std::string RenderRunReport(const RunRecord& r) {
  std::ostringstream os;
  os << "Run report: " << (r.instance_id.empty() ? "(unnamed)" : r.instance_id) << "\n";
  if (r.events.empty() && r.models.empty()) return os.str();

  os << "Outcome: " << OutcomeName(r.outcome);
  if (!r.error_code.empty()) os << " (" << r.error_code << ": " << r.error << ")";
  os << "\nRefinements: " << r.refinements << "\n";

  struct Row {
    std::int64_t events = 0;
    std::int64_t completions = 0;
    std::int64_t tokens = 0;
    double seconds = 0.0;
  };
  std::vector<std::pair<std::string, Row>> rows;
  for (const auto& e : r.events) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const auto& p) { return p.first == e.stage; });
    if (it == rows.end()) {
      rows.emplace_back(e.stage, Row{});
      it = rows.end() - 1;
    }
    ++it->second.events;
    it->second.completions += e.completions;
    it->second.tokens += e.usage.prompt_tokens + e.usage.completion_tokens;
    it->second.seconds += e.seconds;
  }
  os << "\nStage         events  completions    tokens   seconds\n";
  for (const auto& [stage, row] : rows) {
    os << std::left << std::setw(12) << stage << std::right << std::setw(8) << row.events
       << std::setw(13) << row.completions << std::setw(10) << row.tokens << std::setw(10)
       << std::fixed << std::setprecision(3) << row.seconds << "\n";
  }
  os.unsetf(std::ios::floatfield);
  os << "Totals: " << r.totals.agent_calls << " agent calls, " << r.totals.completions
     << " completions, " << r.totals.tokens() << " tokens (" << r.totals.prompt_tokens
     << " prompt + " << r.totals.completion_tokens << " completion"
     << (r.totals.estimated ? ", estimated" : "") << ")\n";

  for (size_t i = 1; i < r.models.size(); ++i) {
    const ModelVersion& v = r.models[i];
    os << "\nModel diff " << i - 1 << " -> " << i << " (" << v.side << " refinement"
       << (v.no_change ? ", no change" : "") << ")\n";
    os << "Trigger: " << v.trigger << "\n";
    for (const auto& line : DiffModels(r.models[i - 1].model, v.model)) os << "  " << line << "\n";
  }

  os << "\n";
  if (r.structure_verdict) {
    os << "Structure verdict: " << r.structure_verdict->score
       << (r.structure_verdict->comment.empty() ? "" : " - " + r.structure_verdict->comment)
       << "\n";
  }
  if (r.solution_verdict) {
    os << "Solution verdict: " << r.solution_verdict->score
       << (r.solution_verdict->comment.empty() ? "" : " - " + r.solution_verdict->comment)
       << "\n";
  }
  if (r.final_solution) {
    os << "Final status: " << SolveStatusName(r.final_solution->status);
    if (r.final_solution->objective_value) {
      os << ", objective " << FormatNumber12(*r.final_solution->objective_value);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace optverifier
