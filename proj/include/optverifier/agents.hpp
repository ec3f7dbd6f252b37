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

// The seven agent operations: structure distillation, formulation,
// structure interpretation and evaluation, solution interpretation and
// evaluation, and refinement. LlmAgents drives them through the gateway
// with a prompt set; MockAgents answers from the reference library.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "optverifier/gateway.hpp"
#include "optverifier/library.hpp"
#include "optverifier/prompts.hpp"
#include "optverifier/solve.hpp"
#include "optverifier/structure.hpp"

namespace optverifier {

struct Verdict {
  int score = 0;  // 1 = consistent / valid
  std::string comment;
  bool anomaly = false;  // reply was empty
};

// Score 1 iff the first whitespace-delimited token, with trailing
// punctuation removed, is "yes" in any letter case.
Verdict ParseVerdict(std::string_view reply);

struct AgentEvent {
  std::string stage;   // distill, formulate, stru_interp, stru_eval, sol_interp, sol_eval, refine
  std::string detail;  // sub-step, e.g. "parameters" or "model" for formulate
  int completions = 0;
  TokenUsage usage;
  std::string request_digest;
  std::string response_digest;
  double seconds = 0.0;
  std::vector<std::string> notes;
};

using EventSink = std::function<void(AgentEvent)>;

enum class RefineSide { kStructure, kSolution };

struct RefineContext {
  RefineSide side = RefineSide::kStructure;
  int step = 1;
  // Structure side: the interpretation that was judged inconsistent.
  std::optional<ModelingStructure> interpreted;
  // Solution side: the solution, its narrative and the checker report.
  std::optional<Solution> solution;
  std::string narrative;
  std::string feasibility;
};

class AgentSuite {
 public:
  virtual ~AgentSuite() = default;

  void SetEventSink(EventSink sink) { sink_ = std::move(sink); }

  ModelingStructure Distill(const ProblemInstance& d);
  OptimizationModel Formulate(const ProblemInstance& d, const ModelingStructure& s);
  ModelingStructure InterpretStructure(const OptimizationModel& m);
  Verdict EvaluateStructure(const ModelingStructure& s, const ModelingStructure& interpreted,
                            const OptimizationModel& m);
  std::string InterpretSolution(const ProblemInstance& d, const ModelingStructure& s,
                                const OptimizationModel& m, const Solution& x);
  Verdict EvaluateSolution(const ProblemInstance& d, const ModelingStructure& s,
                           const OptimizationModel& m, const Solution& x,
                           const std::string& narrative, const FeasibilityReport& report);
  OptimizationModel Refine(const ProblemInstance& d, const ModelingStructure& s,
                           const OptimizationModel& m, const std::string& comment,
                           const RefineContext& context);

 protected:
  virtual ModelingStructure DoDistill(const ProblemInstance& d) = 0;
  virtual OptimizationModel DoFormulate(const ProblemInstance& d, const ModelingStructure& s) = 0;
  virtual ModelingStructure DoInterpretStructure(const OptimizationModel& m) = 0;
  virtual Verdict DoEvaluateStructure(const ModelingStructure& s,
                                      const ModelingStructure& interpreted,
                                      const OptimizationModel& m) = 0;
  virtual std::string DoInterpretSolution(const ProblemInstance& d, const ModelingStructure& s,
                                          const OptimizationModel& m, const Solution& x) = 0;
  virtual Verdict DoEvaluateSolution(const ProblemInstance& d, const ModelingStructure& s,
                                     const OptimizationModel& m, const Solution& x,
                                     const std::string& narrative,
                                     const FeasibilityReport& report) = 0;
  virtual OptimizationModel DoRefine(const ProblemInstance& d, const ModelingStructure& s,
                                     const OptimizationModel& m, const std::string& comment,
                                     const RefineContext& context) = 0;

  void Emit(AgentEvent event) const;

 private:
  EventSink sink_;
};

struct LlmAgentOptions {
  PromptSetId prompt_set = PromptSetId::kDsl;
  // Replaces the built-in templates when non-empty.
  std::filesystem::path prompt_dir;
};

class LlmAgents : public AgentSuite {
 public:
  LlmAgents(std::shared_ptr<const Gateway> gateway, LlmAgentOptions options = {});

 protected:
  ModelingStructure DoDistill(const ProblemInstance& d) override;
  OptimizationModel DoFormulate(const ProblemInstance& d, const ModelingStructure& s) override;
  ModelingStructure DoInterpretStructure(const OptimizationModel& m) override;
  Verdict DoEvaluateStructure(const ModelingStructure& s, const ModelingStructure& interpreted,
                              const OptimizationModel& m) override;
  std::string DoInterpretSolution(const ProblemInstance& d, const ModelingStructure& s,
                                  const OptimizationModel& m, const Solution& x) override;
  Verdict DoEvaluateSolution(const ProblemInstance& d, const ModelingStructure& s,
                             const OptimizationModel& m, const Solution& x,
                             const std::string& narrative,
                             const FeasibilityReport& report) override;
  OptimizationModel DoRefine(const ProblemInstance& d, const ModelingStructure& s,
                             const OptimizationModel& m, const std::string& comment,
                             const RefineContext& context) override;

 private:
  class Conversation;

  ModelingStructure Interpret(const std::string& stage, const std::string& problem,
                              std::string base_hint, ModelingStructure::Origin origin);
  OptimizationModel FinishModel(Conversation& conv, const std::vector<Parameter>& fallback);

  std::shared_ptr<const Gateway> gateway_;
  PromptSet prompts_;
};

// Rule-based agents over the reference library; deterministic and offline.
class MockAgents : public AgentSuite {
 public:
  explicit MockAgents(const ModelLibrary& library = ModelLibrary::Builtin());
  // The library is held by reference and must outlive the agents.
  explicit MockAgents(ModelLibrary&&) = delete;

 protected:
  ModelingStructure DoDistill(const ProblemInstance& d) override;
  OptimizationModel DoFormulate(const ProblemInstance& d, const ModelingStructure& s) override;
  ModelingStructure DoInterpretStructure(const OptimizationModel& m) override;
  Verdict DoEvaluateStructure(const ModelingStructure& s, const ModelingStructure& interpreted,
                              const OptimizationModel& m) override;
  std::string DoInterpretSolution(const ProblemInstance& d, const ModelingStructure& s,
                                  const OptimizationModel& m, const Solution& x) override;
  Verdict DoEvaluateSolution(const ProblemInstance& d, const ModelingStructure& s,
                             const OptimizationModel& m, const Solution& x,
                             const std::string& narrative,
                             const FeasibilityReport& report) override;
  OptimizationModel DoRefine(const ProblemInstance& d, const ModelingStructure& s,
                             const OptimizationModel& m, const std::string& comment,
                             const RefineContext& context) override;

 private:
  void Note(const std::string& stage, const std::string& detail = "") const;

  const ModelLibrary& library_;
};

// A chat backend that plays a cooperative model: it recognizes each prompt
// turn of the shipped templates and answers from the reference library.
// Used to record cassettes without network access.
class SimulatedBackend : public ChatBackend {
 public:
  explicit SimulatedBackend(const ModelLibrary& library = ModelLibrary::Builtin());
  explicit SimulatedBackend(ModelLibrary&&) = delete;
  ChatResponse Complete(const ChatRequest& request) override;

 private:
  std::string Answer(const std::vector<ChatMessage>& messages) const;
  const LibraryEntry* Resolve(const std::vector<ChatMessage>& messages) const;

  const ModelLibrary& library_;
};

}  // namespace optverifier
