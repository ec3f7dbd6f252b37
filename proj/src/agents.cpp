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

#include "optverifier/agents.hpp"

#include <cctype>
#include <chrono>
#include <sstream>

namespace optverifier {

namespace {

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool Contains(std::string_view hay, std::string_view needle) {
  return hay.find(needle) != std::string_view::npos;
}

std::string Fenced(const Json& doc) { return "```json\n" + doc.dump(2) + "\n```"; }

// Model document as shown to an agent; provenance is bookkeeping only.
Json PromptModelJson(const OptimizationModel& m) {
  Json doc = ModelToJson(m);
  doc.erase("provenance");
  return doc;
}

std::string ProblemTypeOf(const ModelingStructure& s) {
  return s.specific_type.empty() ? s.problem_type : s.specific_type;
}

ModelingStructure Unclassified() {
  ModelingStructure s;
  s.problem_type = "Unclassified";
  s.specific_type = "Unclassified";
  return s;
}

const LibraryEntry* FindBySpecificType(const ModelLibrary& lib, std::string_view type) {
  std::string want = Lower(type);
  for (const auto& e : lib.entries()) {
    if (Lower(e.specific_type) == want) return &e;
  }
  return nullptr;
}

}  // namespace

Verdict ParseVerdict(std::string_view reply) {
  Verdict v;
  std::string text = Trim(reply);
  if (text.empty()) {
    v.comment = "(empty reply)";
    v.anomaly = true;
    return v;
  }
  size_t end = 0;
  while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
  std::string token = text.substr(0, end);
  while (!token.empty() && std::ispunct(static_cast<unsigned char>(token.back()))) {
    token.pop_back();
  }
  if (Lower(token) == "yes") {
    v.score = 1;
  } else {
    v.comment = text;
  }
  return v;
}

// ---------------------------------------------------------------------------
// AgentSuite wrappers

void AgentSuite::Emit(AgentEvent event) const {
  if (sink_) sink_(std::move(event));
}

ModelingStructure AgentSuite::Distill(const ProblemInstance& d) {
  if (Trim(d.description).empty()) {
    throw Error(ErrorCode::kPrecondition, "distill: problem description is empty");
  }
  ModelingStructure s = DoDistill(d);
  s.provenance = ModelingStructure::Origin::kDistilledFromDescription;
  return s;
}

OptimizationModel AgentSuite::Formulate(const ProblemInstance& d, const ModelingStructure& s) {
  if (s.problem_type.empty() || s.specific_type.empty()) {
    throw Error(ErrorCode::kPrecondition, "formulate: structure lacks its type levels");
  }
  OptimizationModel m = DoFormulate(d, s);
  if (auto report = ValidateModel(m); !report.valid()) {
    throw Error(ErrorCode::kAgentOutputInvalid,
                "formulated model does not validate:\n" + report.Render());
  }
  m.provenance = Provenance{};
  m.provenance.kind = Provenance::Kind::kLlmFormulated;
  return m;
}

ModelingStructure AgentSuite::InterpretStructure(const OptimizationModel& m) {
  if (auto report = ValidateModel(m); !report.valid()) {
    throw Error(ErrorCode::kPrecondition, "interpret_structure: model is invalid:\n" +
                                              report.Render());
  }
  ModelingStructure s = DoInterpretStructure(m);
  s.provenance = ModelingStructure::Origin::kInterpretedFromModel;
  return s;
}

Verdict AgentSuite::EvaluateStructure(const ModelingStructure& s,
                                      const ModelingStructure& interpreted,
                                      const OptimizationModel& m) {
  Verdict v = DoEvaluateStructure(s, interpreted, m);
  if (v.score == 1) v.comment.clear();
  if (v.score == 0 && v.comment.empty()) v.comment = "(no comment)";
  return v;
}

std::string AgentSuite::InterpretSolution(const ProblemInstance& d, const ModelingStructure& s,
                                          const OptimizationModel& m, const Solution& x) {
  if (x.status != SolveStatus::kOptimal && x.status != SolveStatus::kFeasible) {
    throw Error(ErrorCode::kPrecondition,
                "interpret_solution: solution status is " +
                    std::string(SolveStatusName(x.status)));
  }
  std::string text = DoInterpretSolution(d, s, m, x);
  if (Trim(text).empty()) {
    throw Error(ErrorCode::kAgentOutputInvalid, "solution narrative is empty");
  }
  return text;
}

Verdict AgentSuite::EvaluateSolution(const ProblemInstance& d, const ModelingStructure& s,
                                     const OptimizationModel& m, const Solution& x,
                                     const std::string& narrative,
                                     const FeasibilityReport& report) {
  Verdict v = DoEvaluateSolution(d, s, m, x, narrative, report);
  if (v.score == 1) v.comment.clear();
  if (v.score == 0 && v.comment.empty()) v.comment = "(no comment)";
  return v;
}

OptimizationModel AgentSuite::Refine(const ProblemInstance& d, const ModelingStructure& s,
                                     const OptimizationModel& m, const std::string& comment,
                                     const RefineContext& context) {
  if (Trim(comment).empty()) {
    throw Error(ErrorCode::kPrecondition, "refine: comment is empty");
  }
  OptimizationModel out = DoRefine(d, s, m, comment, context);
  if (auto report = ValidateModel(out); !report.valid()) {
    throw Error(ErrorCode::kAgentOutputInvalid,
                "refined model does not validate:\n" + report.Render());
  }
  out.provenance = Provenance{};
  out.provenance.kind = Provenance::Kind::kRefined;
  out.provenance.step = context.step;
  return out;
}

// ---------------------------------------------------------------------------
// LlmAgents

class LlmAgents::Conversation {
 public:
  explicit Conversation(const Gateway& gateway) : gateway_(gateway) {}

  void System(std::string text) { messages_.push_back({Role::kSystem, std::move(text)}); }
  void User(std::string text) { messages_.push_back({Role::kUser, std::move(text)}); }
  void Assistant(std::string text) {
    messages_.push_back({Role::kAssistant, std::move(text)});
  }

  std::string Say(std::string text) {
    messages_.push_back({Role::kUser, std::move(text)});
    ChatRequest req;
    req.model_name = gateway_.config().model_name;
    req.temperature = gateway_.config().temperature;
    req.seed = gateway_.config().seed;
    req.messages = messages_;
    std::string fp = Fingerprint(req);
    ChatResponse resp = gateway_.Complete(req);
    ++completions_;
    usage_ += resp.usage;
    request_chain_ += fp;
    response_chain_ += Sha256Hex(resp.content);
    messages_.push_back({Role::kAssistant, resp.content});
    return resp.content;
  }

  // Moves the accumulated accounting into `event` and starts afresh.
  void Flush(AgentEvent& event) {
    event.completions = completions_;
    event.usage = usage_;
    event.request_digest = completions_ ? Sha256Hex(request_chain_) : "";
    event.response_digest = completions_ ? Sha256Hex(response_chain_) : "";
    completions_ = 0;
    usage_ = TokenUsage{};
    request_chain_.clear();
    response_chain_.clear();
  }

 private:
  const Gateway& gateway_;
  std::vector<ChatMessage> messages_;
  int completions_ = 0;
  TokenUsage usage_;
  std::string request_chain_;
  std::string response_chain_;
};

namespace {

// Runs `body`, then emits one event for the completions it made, on both the
// success and the error path.
template <typename Conv, typename Body>
auto Staged(const std::function<void(AgentEvent)>& emit, Conv& conv, std::string stage,
            std::string detail, Body body) {
  AgentEvent event;
  event.stage = std::move(stage);
  event.detail = std::move(detail);
  auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    event.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    conv.Flush(event);
    emit(std::move(event));
  };
  try {
    auto result = body();
    finish();
    return result;
  } catch (const std::exception& e) {
    event.notes.push_back(std::string("error: ") + e.what());
    finish();
    throw;
  }
}

PromptVars BaseVars() {
  PromptVars v;
  for (const auto& name : KnownPlaceholders()) v[name] = "";
  v["grammar"] = DslGrammarText();
  return v;
}

}  // namespace

LlmAgents::LlmAgents(std::shared_ptr<const Gateway> gateway, LlmAgentOptions options)
    : gateway_(std::move(gateway)),
      prompts_(options.prompt_dir.empty() ? PromptSet::Builtin(options.prompt_set)
                                          : PromptSet::FromDirectory(options.prompt_dir)) {
  if (!gateway_) throw Error(ErrorCode::kPrecondition, "LlmAgents: gateway is null");
}

namespace {

// Parses the first JSON block of `reply` with `parse`; on failure asks once
// more with the reask template and then gives up with AGENT_OUTPUT_INVALID.
template <typename Conv, typename Parse>
auto ParseWithReask(Conv& conv, const PromptSet& prompts, std::string reply, Parse parse,
                    std::vector<std::string>* notes) {
  std::string problem;
  try {
    return parse(reply);
  } catch (const Error& e) {
    problem = std::string(ErrorCodeName(e.code())) + ": " + e.what();
  }
  if (notes) notes->push_back("re-ask: " + problem);
  PromptVars vars = BaseVars();
  vars["errors"] = problem;
  reply = conv.Say(RenderTemplate(prompts.Get("reask").turns.at(0), vars));
  try {
    return parse(reply);
  } catch (const Error& e) {
    throw Error(ErrorCode::kAgentOutputInvalid,
                "unusable agent output after re-ask: " + std::string(ErrorCodeName(e.code())) +
                    ": " + e.what());
  }
}

}  // namespace

ModelingStructure LlmAgents::Interpret(const std::string& stage, const std::string& problem,
                                       std::string base_hint,
                                       ModelingStructure::Origin origin) {
  Conversation conv(*gateway_);
  auto emit = [this](AgentEvent e) { Emit(std::move(e)); };
  return Staged(emit, conv, stage, "", [&] {
    const auto& t = prompts_.Get("interpretation");
    PromptVars vars = BaseVars();
    vars["problem"] = problem;
    conv.System(t.turns.at(0));
    std::string first = conv.Say(RenderTemplate(t.turns.at(1), vars));
    if (base_hint.empty()) {
      base_hint = LookupBaseFormulation(first);
      if (base_hint == "none available") base_hint = LookupBaseFormulation(problem);
    }
    vars["base_formulation"] = base_hint;
    conv.Say(RenderTemplate(t.turns.at(2), vars));
    conv.Say(RenderTemplate(t.turns.at(3), vars));
    std::string reply = conv.Say(RenderTemplate(t.turns.at(4), vars));
    ModelingStructure s = ParseWithReask(conv, prompts_, reply, [](const std::string& text) {
      return StructureFromJson(ExtractJsonBlock(text));
    }, nullptr);
    s.provenance = origin;
    return s;
  });
}

ModelingStructure LlmAgents::DoDistill(const ProblemInstance& d) {
  return Interpret("distill", d.description, "",
                   ModelingStructure::Origin::kDistilledFromDescription);
}

OptimizationModel LlmAgents::FinishModel(Conversation& conv,
                                         const std::vector<Parameter>& fallback) {
  PromptVars vars = BaseVars();
  std::string reply = conv.Say(RenderTemplate(prompts_.Get("model_json").turns.at(0), vars));
  auto parse = [&](const std::string& text) {
    Json doc = ExtractJsonBlock(text);
    if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "model must be a JSON object");
    if (!doc.contains("parameters")) {
      OptimizationModel holder;
      holder.parameters = fallback;
      doc["parameters"] = ModelToJson(holder)["parameters"];
    }
    OptimizationModel m = ModelFromJson(doc);
    if (auto report = ValidateModel(m); !report.valid()) {
      throw Error(ErrorCode::kSchemaError, "model does not validate:\n" + report.Render());
    }
    return m;
  };
  return ParseWithReask(conv, prompts_, reply, parse, nullptr);
}

OptimizationModel LlmAgents::DoFormulate(const ProblemInstance& d, const ModelingStructure& s) {
  Conversation conv(*gateway_);
  auto emit = [this](AgentEvent e) { Emit(std::move(e)); };
  const auto& t = prompts_.Get("formulation");
  PromptVars vars = BaseVars();
  vars["problem"] = d.description;
  vars["problem_type"] = ProblemTypeOf(s);
  vars["structure"] = SerializeStructure(s);
  std::string base = LookupBaseFormulation(s.problem_type + " " + s.specific_type);
  if (base == "none available") base = LookupBaseFormulation(d.description);
  vars["base_formulation"] = base;

  std::vector<Parameter> params = Staged(emit, conv, "formulate", "parameters", [&] {
    conv.System(t.turns.at(0));
    conv.Say(RenderTemplate(t.turns.at(1), vars));
    std::string reply = conv.Say(RenderTemplate(t.turns.at(2), vars));
    return ParseWithReask(conv, prompts_, reply, [](const std::string& text) {
      Json doc = ExtractJsonBlock(text);
      Json wrapped = {{"parameters", doc.is_object() && doc.contains("parameters")
                                         ? doc.at("parameters")
                                         : doc},
                      {"variables", Json::array()},
                      {"constraints", Json::array()},
                      {"objective", Json::array()}};
      return ModelFromJson(wrapped).parameters;
    }, nullptr);
  });

  return Staged(emit, conv, "formulate", "model", [&] {
    conv.Say(RenderTemplate(t.turns.at(3), vars));
    conv.Say(RenderTemplate(t.turns.at(4), vars));
    return FinishModel(conv, params);
  });
}

ModelingStructure LlmAgents::DoInterpretStructure(const OptimizationModel& m) {
  std::string problem = "Optimization model:\n" + RenderFormulation(m) + "\n" +
                        Fenced(PromptModelJson(m));
  return Interpret("stru_interp", problem, "none available",
                   ModelingStructure::Origin::kInterpretedFromModel);
}

namespace {

PromptVars ModificationVars(const ModelingStructure& s, const ModelingStructure* interpreted,
                            const OptimizationModel& m) {
  PromptVars vars = BaseVars();
  vars["problem_type"] = ProblemTypeOf(s);
  vars["parameters"] = RenderParameters(m);
  std::string formulation = RenderFormulation(m);
  if (interpreted) {
    formulation += "\nStructure read from this formulation:\n" +
                   Fenced(StructureToJson(*interpreted));
  }
  vars["formulation_interpretation"] = formulation;
  vars["original_problem_interpretation"] = Fenced(StructureToJson(s));
  return vars;
}

PromptVars SolutionVars(const ProblemInstance& d, const ModelingStructure& s,
                        const OptimizationModel& m, const Solution& x,
                        const std::string& feasibility) {
  PromptVars vars = BaseVars();
  vars["problem_type"] = ProblemTypeOf(s);
  vars["solutions"] = RenderSolution(x);
  vars["formulation_interpretation"] = RenderFormulation(m);
  vars["original_problem_interpretation"] = d.description + "\n\n" + feasibility;
  return vars;
}

}  // namespace

Verdict LlmAgents::DoEvaluateStructure(const ModelingStructure& s,
                                       const ModelingStructure& interpreted,
                                       const OptimizationModel& m) {
  Conversation conv(*gateway_);
  auto emit = [this](AgentEvent e) { Emit(std::move(e)); };
  return Staged(emit, conv, "stru_eval", "", [&] {
    const auto& t = prompts_.Get("modification");
    conv.System(t.turns.at(0));
    Verdict v = ParseVerdict(conv.Say(RenderTemplate(t.turns.at(1),
                                                     ModificationVars(s, &interpreted, m))));
    return v;
  });
}

std::string LlmAgents::DoInterpretSolution(const ProblemInstance& d, const ModelingStructure& s,
                                           const OptimizationModel& m, const Solution& x) {
  Conversation conv(*gateway_);
  auto emit = [this](AgentEvent e) { Emit(std::move(e)); };
  return Staged(emit, conv, "sol_interp", "", [&] {
    const auto& t = prompts_.Get("solution");
    conv.System(t.turns.at(0));
    return conv.Say(RenderTemplate(t.turns.at(1), SolutionVars(d, s, m, x, "")));
  });
}

Verdict LlmAgents::DoEvaluateSolution(const ProblemInstance& d, const ModelingStructure& s,
                                      const OptimizationModel& m, const Solution& x,
                                      const std::string& narrative,
                                      const FeasibilityReport& report) {
  Conversation conv(*gateway_);
  auto emit = [this](AgentEvent e) { Emit(std::move(e)); };
  return Staged(emit, conv, "sol_eval", "", [&] {
    const auto& t = prompts_.Get("solution");
    PromptVars vars = SolutionVars(d, s, m, x, report.Render());
    conv.System(t.turns.at(0));
    // The interpretation exchange is replayed as history rather than re-asked.
    conv.User(RenderTemplate(t.turns.at(1), vars));
    conv.Assistant(narrative.empty() ? "(no interpretation)" : narrative);
    return ParseVerdict(conv.Say(RenderTemplate(t.turns.at(2), vars)));
  });
}

OptimizationModel LlmAgents::DoRefine(const ProblemInstance& d, const ModelingStructure& s,
                                      const OptimizationModel& m, const std::string& comment,
                                      const RefineContext& context) {
  Conversation conv(*gateway_);
  auto emit = [this](AgentEvent e) { Emit(std::move(e)); };
  std::string side = context.side == RefineSide::kStructure ? "structure" : "solution";
  return Staged(emit, conv, "refine", side, [&] {
    if (context.side == RefineSide::kStructure) {
      const auto& t = prompts_.Get("modification");
      PromptVars vars = ModificationVars(
          s, context.interpreted ? &*context.interpreted : nullptr, m);
      conv.System(t.turns.at(0));
      conv.User(RenderTemplate(t.turns.at(1), vars));
      conv.Assistant(comment);
      conv.Say(RenderTemplate(t.turns.at(2), vars));
    } else {
      const auto& t = prompts_.Get("solution");
      Solution x = context.solution.value_or(Solution{});
      PromptVars vars = SolutionVars(d, s, m, x, context.feasibility);
      conv.System(t.turns.at(0));
      conv.User(RenderTemplate(t.turns.at(1), vars));
      conv.Assistant(context.narrative.empty() ? "(no interpretation)" : context.narrative);
      conv.User(RenderTemplate(t.turns.at(2), vars));
      conv.Assistant(comment);
      conv.Say(RenderTemplate(t.turns.at(3), vars));
    }
    return FinishModel(conv, m.parameters);
  });
}

// ---------------------------------------------------------------------------
// MockAgents

MockAgents::MockAgents(const ModelLibrary& library) : library_(library) {}

void MockAgents::Note(const std::string& stage, const std::string& detail) const {
  AgentEvent e;
  e.stage = stage;
  e.detail = detail;
  e.notes.push_back("mock");
  Emit(std::move(e));
}

ModelingStructure MockAgents::DoDistill(const ProblemInstance& d) {
  Note("distill");
  const LibraryEntry* entry = library_.MatchDescription(d.description);
  return entry ? ReferenceStructure(*entry) : Unclassified();
}

OptimizationModel MockAgents::DoFormulate(const ProblemInstance& d, const ModelingStructure& s) {
  Note("formulate", "parameters");
  Note("formulate", "model");
  const LibraryEntry* entry = FindBySpecificType(library_, s.specific_type);
  if (!entry) entry = library_.MatchDescription(d.description);
  if (!entry) {
    throw Error(ErrorCode::kAgentOutputInvalid,
                "mock formulate: no library model matches \"" + s.specific_type + "\"");
  }
  return entry->initial_model.value_or(entry->model);
}

ModelingStructure MockAgents::DoInterpretStructure(const OptimizationModel& m) {
  Note("stru_interp");
  const LibraryEntry* entry = library_.MatchModel(m);
  if (!entry) return StructureFromModel(m, "Unclassified", "Unclassified");
  return StructureFromModel(m, entry->problem_type, entry->specific_type);
}

Verdict MockAgents::DoEvaluateStructure(const ModelingStructure& s,
                                        const ModelingStructure& interpreted,
                                        const OptimizationModel&) {
  Note("stru_eval");
  StructureDiff diff = DiffStructures(s, interpreted);
  if (diff.similarity == 1.0) return Verdict{1, "", false};
  return Verdict{0, diff.Render(), false};
}

std::string MockAgents::DoInterpretSolution(const ProblemInstance&, const ModelingStructure&,
                                            const OptimizationModel&, const Solution& x) {
  Note("sol_interp");
  return RenderSolution(x);
}

Verdict MockAgents::DoEvaluateSolution(const ProblemInstance&, const ModelingStructure&,
                                       const OptimizationModel&, const Solution&,
                                       const std::string&, const FeasibilityReport& report) {
  Note("sol_eval");
  if (report.feasible) return Verdict{1, "", false};
  return Verdict{0, report.Render(), false};
}

OptimizationModel MockAgents::DoRefine(const ProblemInstance& d, const ModelingStructure& s,
                                       const OptimizationModel& m, const std::string&,
                                       const RefineContext& context) {
  Note("refine", context.side == RefineSide::kStructure ? "structure" : "solution");
  const LibraryEntry* entry = library_.MatchDescription(d.description);
  if (!entry) entry = FindBySpecificType(library_, s.specific_type);
  if (!entry) entry = library_.MatchModel(m);
  if (!entry) {
    throw Error(ErrorCode::kAgentOutputInvalid, "mock refine: no library model to fall back on");
  }
  return entry->model;
}

// ---------------------------------------------------------------------------
// SimulatedBackend

SimulatedBackend::SimulatedBackend(const ModelLibrary& library) : library_(library) {}

ChatResponse SimulatedBackend::Complete(const ChatRequest& request) {
  ChatResponse resp;
  resp.content = Answer(request.messages);
  resp.usage = EstimateUsage(request, resp.content);
  return resp;
}

namespace {

std::vector<Json> AllBlocks(const std::vector<ChatMessage>& messages) {
  std::vector<Json> out;
  for (const auto& m : messages) {
    for (auto& j : ExtractJsonBlocks(m.content)) out.push_back(std::move(j));
  }
  return out;
}

std::optional<OptimizationModel> TryModel(const Json& doc) {
  if (!doc.is_object() || !doc.contains("variables") || !doc.contains("constraints")) {
    return std::nullopt;
  }
  try {
    return ModelFromJson(doc);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<ModelingStructure> TryStructure(const Json& doc) {
  if (!doc.is_object() || !doc.contains("specific_type")) return std::nullopt;
  try {
    return StructureFromJson(doc);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string EntryList(const NamedEntries& entries) {
  std::ostringstream os;
  for (const auto& [name, desc] : entries) {
    os << "- " << name;
    if (!desc.empty()) os << ": " << desc;
    os << "\n";
  }
  return entries.empty() ? "- none\n" : os.str();
}

}  // namespace

const LibraryEntry* SimulatedBackend::Resolve(const std::vector<ChatMessage>& messages) const {
  for (const auto& doc : AllBlocks(messages)) {
    if (auto s = TryStructure(doc)) {
      if (const auto* e = FindBySpecificType(library_, s->specific_type)) return e;
    }
    if (auto m = TryModel(doc)) {
      if (const auto* e = library_.MatchModel(*m)) return e;
    }
  }
  for (const auto& m : messages) {
    if (m.role != Role::kUser) continue;
    if (const auto* e = library_.MatchDescription(m.content)) return e;
  }
  return nullptr;
}

std::string SimulatedBackend::Answer(const std::vector<ChatMessage>& messages) const {
  if (messages.empty() || messages.back().role != Role::kUser) return "I am not sure.";
  const std::string& ask = messages.back().content;

  if (Contains(ask, "Your previous answer could not be used")) {
    // Answer the question before the failed reply again.
    for (size_t i = messages.size() - 1; i-- > 0;) {
      if (messages[i].role == Role::kUser) {
        std::vector<ChatMessage> prefix(messages.begin(), messages.begin() + i + 1);
        return Answer(prefix);
      }
    }
    return "I am not sure.";
  }

  const LibraryEntry* entry = Resolve(messages);
  if (!entry) return "I cannot classify this problem.";
  bool reformulating = false;
  bool from_model = false;
  for (const auto& m : messages) {
    if (m.role != Role::kUser) continue;
    if (Contains(m.content, "Please reformulate")) reformulating = true;
    if (Contains(m.content, "Optimization model:")) from_model = true;
  }
  const OptimizationModel& draft =
      reformulating ? entry->model : entry->initial_model.value_or(entry->model);

  if (Contains(ask, "What is the specific problem type")) {
    return "This is a " + entry->problem_type + " problem; more specifically a " +
           entry->specific_type + ".";
  }
  if (Contains(ask, "What is the subdivision")) {
    return "Subdivisions of this problem:\n" + EntryList(entry->subdivisions) +
           "The base formulation is a reasonable starting point.";
  }
  if (Contains(ask, "implicit constraints")) {
    return "Requirements implied by the description:\n" +
           EntryList(ReferenceStructure(*entry).implicit_constraints);
  }
  if (Contains(ask, "Please summarize and write in JSON Format")) {
    ModelingStructure s = ReferenceStructure(*entry);
    if (from_model) {
      std::optional<OptimizationModel> shown;
      for (const auto& doc : AllBlocks(messages)) {
        if ((shown = TryModel(doc))) break;
      }
      if (shown) {
        s = StructureFromModel(*shown, entry->problem_type, entry->specific_type);
        s.subdivisions = entry->subdivisions;
      }
    }
    return Fenced(StructureToJson(s));
  }
  if (Contains(ask, "summarize the parameters and their tensor sizes")) {
    return "Parameters:\n" + RenderParameters(draft);
  }
  if (Contains(ask, "Make sure the bracket is closed")) {
    Json doc = {{"parameters", PromptModelJson(draft)["parameters"]}};
    return Fenced(doc);
  }
  if (Contains(ask, "auxiliary binary")) {
    bool has_binary = false;
    for (const auto& v : draft.variables) has_binary |= v.type == VarType::kBinary;
    return has_binary ? "Yes, binary decision variables are part of the formulation."
                      : "No auxiliary binary variables are needed.";
  }
  if (Contains(ask, "formulate this problem according to") ||
      Contains(ask, "Please reformulate")) {
    return RenderFormulation(draft);
  }
  if (Contains(ask, "Now write the complete optimization model in JSON Format")) {
    return Fenced(PromptModelJson(draft));
  }
  if (Contains(ask, "Does this problem consistent")) {
    std::vector<ModelingStructure> found;
    for (const auto& doc : ExtractJsonBlocks(ask)) {
      if (auto s = TryStructure(doc)) found.push_back(*s);
    }
    if (found.size() < 2) return "Yes";
    StructureDiff diff = DiffStructures(found.back(), found.front());
    if (diff.missing_low_level.empty() && diff.level_mismatch.empty()) return "Yes";
    std::ostringstream os;
    os << "No. The formulation is missing requirements of the structure description:";
    for (const auto& name : diff.missing_low_level) os << "\n- " << name;
    for (const auto& lm : diff.level_mismatch) {
      os << "\n- the " << lm.level << " level should be " << lm.reference;
    }
    os << "\nPlease add the missing constraints.";
    return os.str();
  }
  if (Contains(ask, "Please interpret the meaning of the solution")) {
    std::string solution_text;
    size_t at = ask.find("Status:");
    size_t end = ask.find("The formulation is as follows");
    if (at != std::string::npos) solution_text = Trim(ask.substr(at, end - at));
    return "The solution of this " + entry->specific_type +
           " instance reads as follows.\n" + solution_text;
  }
  if (Contains(ask, "Is this solution the optimal solution?")) {
    if (Contains(ask, "NOT feasible")) {
      return "No. The solution violates constraints of the problem description; the "
             "deterministic check lists the violated rows above.";
    }
    return "Yes";
  }
  return "I am not sure.";
}

}  // namespace optverifier
