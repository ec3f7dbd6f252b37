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

// Prompt template sets and the text renderings that fill their placeholders.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optverifier/solve.hpp"
#include "optverifier/structure.hpp"

namespace optverifier {

enum class PromptSetId { kDsl, kLatex };

std::string_view PromptSetName(PromptSetId id);
std::optional<PromptSetId> ParsePromptSet(std::string_view name);

// One file per template; turns are separated by a line "<<<TURN>>>". The
// first turn of interpretation/formulation/modification/solution is the
// system message.
struct PromptTemplate {
  std::string name;
  std::vector<std::string> turns;
};

inline constexpr std::string_view kTurnSeparator = "<<<TURN>>>";

class PromptSet {
 public:
  // Templates compiled into the library.
  static PromptSet Builtin(PromptSetId id);
  // Reads <dir>/<name>.txt for every required template.
  static PromptSet FromDirectory(const std::filesystem::path& dir);

  // "interpretation", "formulation", "modification", "solution",
  // "model_json" or "reask".
  const PromptTemplate& Get(std::string_view name) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

PromptTemplate ParseTemplate(std::string name, std::string_view text);

using PromptVars = std::map<std::string, std::string, std::less<>>;

// Python-format-like rendering: "{{" and "}}" become braces, "{name}" is
// replaced for recognized placeholder names, other braces pass through.
// A recognized placeholder absent from `vars` is a PRECONDITION error.
std::string RenderTemplate(std::string_view text, const PromptVars& vars);
std::vector<std::string> TemplatePlaceholders(std::string_view text);
const std::vector<std::string>& KnownPlaceholders();

// Summary of the formulation language for prompts.
std::string DslGrammarText();

struct BaseFormulation {
  std::string name;
  std::vector<std::string> keywords;
  std::string sketch;
};

const std::vector<BaseFormulation>& BaseFormulationLibrary();

// Sketch of the first library entry whose keyword occurs in `text`
// (case-insensitive), else "none available".
std::string LookupBaseFormulation(std::string_view text);

std::string RenderParameters(const OptimizationModel& model);
// Variables, constraints and objective as readable text.
std::string RenderFormulation(const OptimizationModel& model);
std::string RenderSolution(const Solution& solution, size_t max_entries = 60);

}  // namespace optverifier
