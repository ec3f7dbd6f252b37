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

#include "optverifier/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "optverifier/embedded_files.inc"

namespace optverifier {
namespace {

constexpr const char* kTemplateNames[] = {"interpretation", "formulation", "modification",
                                          "solution",       "model_json",  "reask"};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string ShapeText(const std::vector<Dim>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    if (const auto* n = std::get_if<std::int64_t>(&shape[i])) {
      s += std::to_string(*n);
    } else {
      s += std::get<std::string>(shape[i]);
    }
  }
  return s + "]";
}

}  // namespace

std::string_view PromptSetName(PromptSetId id) {
  return id == PromptSetId::kDsl ? "dsl" : "latex";
}

std::optional<PromptSetId> ParsePromptSet(std::string_view name) {
  if (name == "dsl") return PromptSetId::kDsl;
  if (name == "latex") return PromptSetId::kLatex;
  return std::nullopt;
}

PromptTemplate ParseTemplate(std::string name, std::string_view text) {
  PromptTemplate t;
  t.name = std::move(name);
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line == kTurnSeparator) {
      t.turns.push_back(current);
      current.clear();
      first = true;
      continue;
    }
    if (!first) current += "\n";
    current += line;
    first = false;
  }
  t.turns.push_back(current);
  return t;
}

PromptSet PromptSet::Builtin(PromptSetId id) {
  PromptSet set;
  const std::string prefix = "prompts/" + std::string(PromptSetName(id)) + "/";
  for (const auto& f : embedded::kEmbeddedFiles) {
    if (f.path.substr(0, prefix.size()) != prefix) continue;
    std::string name(f.path.substr(prefix.size()));
    if (name.size() > 4 && name.substr(name.size() - 4) == ".txt") {
      name.resize(name.size() - 4);
    }
    set.templates_.emplace(name, ParseTemplate(name, f.text));
  }
  for (const char* n : kTemplateNames) {
    if (!set.templates_.count(std::string_view(n))) {
      throw Error(ErrorCode::kConfigError,
                  "built-in prompt set lacks template '" + std::string(n) + "'");
    }
  }
  return set;
}

PromptSet PromptSet::FromDirectory(const std::filesystem::path& dir) {
  PromptSet set;
  for (const char* n : kTemplateNames) {
    std::filesystem::path p = dir / (std::string(n) + ".txt");
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::kConfigError, "missing prompt template " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    set.templates_.emplace(n, ParseTemplate(n, ss.str()));
  }
  return set;
}

const PromptTemplate& PromptSet::Get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw Error(ErrorCode::kConfigError, "unknown prompt template '" + std::string(name) + "'");
  }
  return it->second;
}

const std::vector<std::string>& KnownPlaceholders() {
  static const std::vector<std::string> names = {
      "problem",    "base_formulation",          "problem_type",
      "structure",  "parameters",                "formulation_interpretation",
      "solutions",  "original_problem_interpretation", "grammar",
      "errors"};
  return names;
}

namespace {

// Returns the placeholder name starting at text[i] == '{', if any.
std::optional<std::string> PlaceholderAt(std::string_view text, size_t i) {
  size_t close = text.find('}', i + 1);
  if (close == std::string_view::npos) return std::nullopt;
  std::string name(text.substr(i + 1, close - i - 1));
  const auto& known = KnownPlaceholders();
  if (std::find(known.begin(), known.end(), name) == known.end()) return std::nullopt;
  return name;
}

}  // namespace

std::string RenderTemplate(std::string_view text, const PromptVars& vars) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if ((c == '{' || c == '}') && i + 1 < text.size() && text[i + 1] == c) {
      out += c;
      ++i;
      continue;
    }
    if (c == '{') {
      if (auto name = PlaceholderAt(text, i)) {
        auto it = vars.find(*name);
        if (it == vars.end()) {
          throw Error(ErrorCode::kPrecondition,
                      "prompt placeholder {" + *name + "} was not supplied");
        }
        out += it->second;
        i += name->size() + 1;
        continue;
      }
    }
    out += c;
  }
  return out;
}

std::vector<std::string> TemplatePlaceholders(std::string_view text) {
  std::vector<std::string> names;
  for (size_t i = 0; i < text.size(); ++i) {
    if ((text[i] == '{' || text[i] == '}') && i + 1 < text.size() && text[i + 1] == text[i]) {
      ++i;
      continue;
    }
    if (text[i] != '{') continue;
    if (auto name = PlaceholderAt(text, i)) {
      if (std::find(names.begin(), names.end(), *name) == names.end()) names.push_back(*name);
    }
  }
  return names;
}

std::string DslGrammarText() {
  return R"GRAMMAR(  constraint := expr relop expr quant*  |  ref "in" ("Integers" | "Binaries") quant*
  relop      := "<=" | ">=" | "=="            (strict < and > are rejected)
  quant      := "forall" index "in" Set ["if" index op index]
  expr       := term (("+" | "-") term)*
  term       := factor ("*" factor)*          (at most one factor may contain variables)
  factor     := "-" factor | number | ref | "sum(" binders "," expr ")" | "(" expr ")"
  binders    := index "in" Set ("," index "in" Set)* ["if" index op index]
  ref        := Symbol ["[" index ("," index)* "]"]
  op         := "!=" | "<" | "<=" | ">" | ">="
  Example: sum(j in Customers, Flow[i,j]) <= Capacity[i] * Open[i] forall i in Warehouses
  A Set is a parameter holding a list of indices, or a count N meaning 0..N-1.)GRAMMAR";
}

const std::vector<BaseFormulation>& BaseFormulationLibrary() {
  static const std::vector<BaseFormulation> lib = {
      {"maximum flow",
       {"maximum flow", "max flow", "max-flow", "network flow", "reservoir"},
       "Maximum flow: variables x[i,j] >= 0 for each arc; maximize the flow leaving the "
       "source; x[i,j] <= c[i,j] on every arc; for every node k other than source and sink, "
       "sum over j of x[k,j] equals sum over i of x[i,k] (flow conservation)."},
      {"knapsack",
       {"knapsack"},
       "Knapsack: integer (or binary) quantities q[i] >= 0 per item kind; maximize sum of "
       "v[i] q[i] subject to sum of w[i] q[i] <= W; bounded variants add q[i] <= u[i]."},
      {"traveling salesman",
       {"traveling salesman", "travelling salesman", "tsp", "salesperson", "tour"},
       "Traveling salesman: binary x[i,j] for each ordered city pair; minimize sum of "
       "c[i,j] x[i,j]; each city has exactly one outgoing and one incoming arc; subtours "
       "are eliminated with position variables u[i] and u[i] - u[j] + n x[i,j] <= n - 1 "
       "for i != j among cities other than the start."},
      {"facility location",
       {"facility location", "warehouse location", "facility", "warehouse"},
       "Capacitated facility location: binary open[i] per site and flows x[i,j] >= 0; "
       "minimize fixed costs plus allocation costs; every customer demand is met exactly; "
       "sum over j of x[i,j] <= capacity[i] open[i] links flow to opening; optional "
       "minimum throughput and bounds on the number of open sites."},
      {"transportation",
       {"transportation problem", "transportation", "shipping", "supply and demand"},
       "Transportation: x[i,j] >= 0 shipped from supplier i to customer j; minimize sum of "
       "c[i,j] x[i,j]; sum over j of x[i,j] <= supply[i]; sum over i of x[i,j] >= "
       "demand[j]."},
      {"diet",
       {"diet", "nutrient", "nutrition", "food"},
       "Diet: amounts x[f] >= 0 of each food; minimize sum of cost[f] x[f]; for every "
       "nutrient n, sum over f of a[n,f] x[f] lies between its minimum and maximum."},
  };
  return lib;
}

std::string LookupBaseFormulation(std::string_view text) {
  std::string l = Lower(text);
  for (const auto& b : BaseFormulationLibrary()) {
    for (const auto& k : b.keywords) {
      if (l.find(k) != std::string::npos) return b.sketch;
    }
  }
  return "none available";
}

std::string RenderParameters(const OptimizationModel& model) {
  std::ostringstream os;
  for (const auto& p : model.parameters) {
    os << "- " << p.symbol;
    if (!p.shape.empty()) os << " (shape " << ShapeText(p.shape) << ")";
    os << ": " << p.definition;
    if (p.IsExternal()) {
      const auto& ref = std::get<ExternalRef>(p.value);
      os << " [loaded from " << ref.source << "]";
    } else {
      os << " = " << std::get<Json>(p.value).dump();
    }
    os << "\n";
  }
  return os.str();
}

std::string RenderFormulation(const OptimizationModel& model) {
  std::ostringstream os;
  os << "Variables:\n";
  for (const auto& v : model.variables) {
    os << "- " << v.symbol;
    if (!v.shape.empty()) os << " " << ShapeText(v.shape);
    os << " (" << VarTypeName(v.type) << "): " << v.definition << "\n";
  }
  os << "Constraints:\n";
  for (const auto& c : model.constraints) {
    os << "- " << c.name << ": " << c.formulation;
    if (!c.description.empty()) os << "  (" << c.description << ")";
    os << "\n";
  }
  if (model.objective) {
    os << "Objective (" << SenseName(model.objective->sense)
       << "): " << model.objective->formulation << "\n";
  }
  return os.str();
}

std::string RenderSolution(const Solution& s, size_t max_entries) {
  std::ostringstream os;
  os << "Status: " << SolveStatusName(s.status) << "\n";
  if (s.objective_value) os << "Objective value: " << FormatNumber12(*s.objective_value) << "\n";
  size_t nonzero = 0;
  for (const auto& [name, v] : s.assignment) {
    if (std::fabs(v) > 1e-9) ++nonzero;
  }
  if (!s.assignment.empty()) {
    os << "Nonzero variable values (" << nonzero << " of " << s.assignment.size() << "):\n";
    size_t shown = 0;
    for (const auto& [name, v] : s.assignment) {
      if (std::fabs(v) <= 1e-9) continue;
      if (shown++ == max_entries) {
        os << "... " << (nonzero - max_entries) << " more\n";
        break;
      }
      os << name << " = " << FormatNumber12(v) << "\n";
    }
  }
  return os.str();
}

}  // namespace optverifier
