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

#include "optverifier/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace optverifier {

std::string_view VarTypeName(VarType type) {
  switch (type) {
    case VarType::kContinuous: return "continuous";
    case VarType::kInteger: return "integer";
    case VarType::kBinary: return "binary";
  }
  return "continuous";
}

std::string_view SenseName(ObjectiveSense sense) {
  return sense == ObjectiveSense::kMaximize ? "Maximize" : "Minimize";
}

std::string_view ViolationCodeName(ViolationCode code) {
  switch (code) {
    case ViolationCode::kUndeclaredSymbol: return "UNDECLARED_SYMBOL";
    case ViolationCode::kDuplicateSymbol: return "DUPLICATE_SYMBOL";
    case ViolationCode::kShapeMismatch: return "SHAPE_MISMATCH";
    case ViolationCode::kBadBounds: return "BAD_BOUNDS";
    case ViolationCode::kParseError: return "PARSE_ERROR";
    case ViolationCode::kNoObjective: return "NO_OBJECTIVE";
  }
  return "UNKNOWN";
}

double DecisionVariable::EffectiveLower() const {
  if (type == VarType::kBinary) return 0.0;
  return lower_bound.value_or(0.0);
}

double DecisionVariable::EffectiveUpper() const {
  if (type == VarType::kBinary) return 1.0;
  return upper_bound.value_or(kInfinity);
}

SymbolKinds OptimizationModel::Kinds() const {
  SymbolKinds kinds;
  for (const auto& p : parameters) kinds.emplace(p.symbol, SymbolKind::kParameter);
  for (const auto& v : variables) kinds[v.symbol] = SymbolKind::kVariable;
  return kinds;
}

const Parameter* OptimizationModel::FindParameter(std::string_view symbol) const {
  for (const auto& p : parameters) {
    if (p.symbol == symbol) return &p;
  }
  return nullptr;
}

const DecisionVariable* OptimizationModel::FindVariable(
    std::string_view symbol) const {
  for (const auto& v : variables) {
    if (v.symbol == symbol) return &v;
  }
  return nullptr;
}

bool OptimizationModel::HasExternalParameters() const {
  return std::any_of(parameters.begin(), parameters.end(),
                     [](const Parameter& p) { return p.IsExternal(); });
}

bool ValidationReport::Has(ViolationCode code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [code](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::Render() const {
  std::ostringstream out;
  for (const auto& v : violations) {
    out << ViolationCodeName(v.code) << " [" << v.where << "]: " << v.message
        << "\n";
  }
  return out.str();
}

namespace {

bool IsCamelCaseSymbol(const std::string& s) {
  if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c));
  });
}

// Checks nested-array extents against the declared shape.
bool ValueMatchesShape(const Json& value, const std::vector<Dim>& shape,
                       size_t depth = 0) {
  if (depth == shape.size()) return value.is_number();
  if (!value.is_array()) return false;
  if (const auto* n = std::get_if<std::int64_t>(&shape[depth])) {
    if (static_cast<std::int64_t>(value.size()) != *n) return false;
  }
  return std::all_of(value.begin(), value.end(), [&](const Json& item) {
    return ValueMatchesShape(item, shape, depth + 1);
  });
}

void CheckRanks(const Expr& e, const OptimizationModel& model,
                const std::string& where, ValidationReport& report) {
  if (e.kind == ExprKind::kRef) {
    size_t rank = 0;
    bool known = false;
    if (const auto* p = model.FindParameter(e.symbol)) {
      rank = p->shape.size();
      known = true;
      // Scalar parameters double as integer ranges; a list parameter used
      // bare is an index set only inside binders, which never reach here.
    } else if (const auto* v = model.FindVariable(e.symbol)) {
      rank = v->shape.size();
      known = true;
    }
    if (known && rank != e.subscripts.size()) {
      report.violations.push_back(
          {ViolationCode::kShapeMismatch, where,
           e.symbol + " has rank " + std::to_string(rank) + " but is used with " +
               std::to_string(e.subscripts.size()) + " subscript(s)"});
    }
    return;
  }
  for (const auto& op : e.operands) CheckRanks(op, model, where, report);
}

void CheckSymbols(const std::set<std::string>& used,
                  const std::set<std::string>& declared,
                  const std::string& where, ValidationReport& report) {
  for (const auto& s : used) {
    if (!declared.count(s)) {
      report.violations.push_back({ViolationCode::kUndeclaredSymbol, where,
                                   "symbol '" + s + "' is not declared"});
    }
  }
}

std::string ParseErrorMessage(const Error& e) { return e.what(); }

}  // namespace

ValidationReport ValidateModel(const OptimizationModel& model) {
  ValidationReport report;
  std::set<std::string> declared;
  auto declare = [&](const std::string& symbol, const std::string& where) {
    if (!declared.insert(symbol).second) {
      report.violations.push_back({ViolationCode::kDuplicateSymbol, where,
                                   "symbol '" + symbol + "' declared twice"});
    }
  };
  for (const auto& p : model.parameters) {
    std::string where = "parameter " + p.symbol;
    declare(p.symbol, where);
    if (const auto* value = std::get_if<Json>(&p.value)) {
      if (!ValueMatchesShape(*value, p.shape)) {
        report.violations.push_back(
            {ViolationCode::kShapeMismatch, where,
             "value nesting does not match the declared shape"});
      }
    }
  }
  for (const auto& v : model.variables) {
    std::string where = "variable " + v.symbol;
    declare(v.symbol, where);
    if (!IsCamelCaseSymbol(v.symbol)) {
      report.warnings.push_back(where + ": symbol is not CamelCase without indices");
    }
    if (v.type == VarType::kBinary &&
        ((v.lower_bound && *v.lower_bound != 0.0) ||
         (v.upper_bound && *v.upper_bound != 1.0))) {
      report.violations.push_back(
          {ViolationCode::kBadBounds, where, "binary variables have bounds [0, 1]"});
    }
    if (v.EffectiveLower() > v.EffectiveUpper()) {
      report.violations.push_back(
          {ViolationCode::kBadBounds, where, "lower bound exceeds upper bound"});
    }
  }
  SymbolKinds kinds = model.Kinds();
  for (const auto& c : model.constraints) {
    std::string where = "constraint '" + c.name + "'";
    try {
      ConstraintAst ast = ParseConstraint(c.formulation, kinds);
      CheckSymbols(FreeSymbols(ast), declared, where, report);
      CheckRanks(ast.lhs, model, where, report);
      if (!ast.domain) CheckRanks(ast.rhs, model, where, report);
      if (ast.domain && !model.FindVariable(ast.lhs.symbol)) {
        report.violations.push_back({ViolationCode::kUndeclaredSymbol, where,
                                     "integrality declared for non-variable '" +
                                         ast.lhs.symbol + "'"});
      }
    } catch (const Error& e) {
      report.violations.push_back(
          {ViolationCode::kParseError, where, ParseErrorMessage(e)});
    }
  }
  if (!model.objective) {
    report.violations.push_back(
        {ViolationCode::kNoObjective, "objective", "model has no objective"});
  } else {
    try {
      Expr ast = ParseExpression(model.objective->formulation, kinds);
      CheckSymbols(FreeSymbols(ast), declared, "objective", report);
      CheckRanks(ast, model, "objective", report);
    } catch (const Error& e) {
      report.violations.push_back(
          {ViolationCode::kParseError, "objective", ParseErrorMessage(e)});
    }
  }
  return report;
}

std::set<std::string> ModelFreeSymbols(const OptimizationModel& model) {
  SymbolKinds kinds = model.Kinds();
  std::set<std::string> out;
  for (const auto& c : model.constraints) {
    auto s = FreeSymbols(ParseConstraint(c.formulation, kinds));
    out.insert(s.begin(), s.end());
  }
  if (model.objective) {
    auto s = FreeSymbols(ParseExpression(model.objective->formulation, kinds));
    out.insert(s.begin(), s.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

class SchemaReader {
 public:
  explicit SchemaReader(std::vector<std::string>* warnings) : warnings_(warnings) {}

  const Json& Require(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
      throw Error(ErrorCode::kSchemaError,
                  "missing required key \"" + std::string(key) + "\" at " + path);
    }
    return obj.at(key);
  }

  std::string String(const Json& obj, const char* key, const std::string& path,
                     bool required = true) {
    if (!obj.contains(key)) {
      if (required) Require(obj, key, path);
      return {};
    }
    const Json& v = obj.at(key);
    if (!v.is_string()) {
      throw Error(ErrorCode::kSchemaError,
                  "\"" + std::string(key) + "\" at " + path + " must be a string");
    }
    return v.get<std::string>();
  }

  const Json& Array(const Json& obj, const char* key, const std::string& path) {
    const Json& v = Require(obj, key, path);
    if (!v.is_array()) {
      throw Error(ErrorCode::kSchemaError,
                  "\"" + std::string(key) + "\" at " + path + " must be an array");
    }
    return v;
  }

  void WarnUnknown(const Json& obj, std::initializer_list<std::string_view> known,
                   const std::string& path) {
    if (!warnings_ || !obj.is_object()) return;
    for (const auto& [key, _] : obj.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        warnings_->push_back("ignored unknown key \"" + key + "\" at " + path);
      }
    }
  }

 private:
  std::vector<std::string>* warnings_;
};

std::vector<Dim> ParseShape(const Json& shape, const std::string& path) {
  if (!shape.is_array()) {
    throw Error(ErrorCode::kSchemaError, "\"shape\" at " + path + " must be an array");
  }
  std::vector<Dim> dims;
  for (const auto& d : shape) {
    if (d.is_number_integer() && d.get<std::int64_t>() >= 0) {
      dims.emplace_back(d.get<std::int64_t>());
    } else if (d.is_number_float() && d.get<double>() >= 0 &&
               d.get<double>() == static_cast<double>(static_cast<std::int64_t>(d.get<double>()))) {
      dims.emplace_back(static_cast<std::int64_t>(d.get<double>()));
    } else if (d.is_string()) {
      dims.emplace_back(d.get<std::string>());
    } else {
      throw Error(ErrorCode::kSchemaError,
                  "shape entries at " + path +
                      " must be nonnegative integers or dimension names");
    }
  }
  return dims;
}

Json ShapeToJson(const std::vector<Dim>& shape) {
  Json out = Json::array();
  for (const auto& d : shape) {
    if (const auto* n = std::get_if<std::int64_t>(&d)) {
      out.push_back(*n);
    } else {
      out.push_back(std::get<std::string>(d));
    }
  }
  return out;
}

std::optional<double> OptionalBound(const Json& obj, const char* key,
                                    const std::string& path) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  const Json& v = obj.at(key);
  if (!v.is_number()) {
    throw Error(ErrorCode::kSchemaError,
                "\"" + std::string(key) + "\" at " + path + " must be a number");
  }
  return v.get<double>();
}

VarType ParseVarType(std::string text, const std::string& path) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (text == "continuous") return VarType::kContinuous;
  if (text == "integer") return VarType::kInteger;
  if (text == "binary") return VarType::kBinary;
  throw Error(ErrorCode::kSchemaError,
              "unknown variable type \"" + text + "\" at " + path);
}

ObjectiveSense ParseSense(std::string text, const std::string& path) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (text == "maximize" || text == "max") return ObjectiveSense::kMaximize;
  if (text == "minimize" || text == "min") return ObjectiveSense::kMinimize;
  throw Error(ErrorCode::kSchemaError,
              "objective_sense at " + path + " must be Maximize or Minimize");
}

Provenance ParseProvenance(const Json& j, const std::string& path) {
  Provenance p;
  std::string kind = j.value("kind", "llm_formulated");
  if (kind == "llm_formulated") {
    p.kind = Provenance::Kind::kLlmFormulated;
  } else if (kind == "externally_supplied") {
    p.kind = Provenance::Kind::kExternallySupplied;
  } else if (kind == "refined") {
    p.kind = Provenance::Kind::kRefined;
    p.step = j.value("step", 0);
  } else if (kind == "perturbed") {
    p.kind = Provenance::Kind::kPerturbed;
    p.seed = j.value("seed", std::uint64_t{0});
    p.op = j.value("op", "");
  } else {
    throw Error(ErrorCode::kSchemaError, "unknown provenance kind at " + path);
  }
  return p;
}

}  // namespace

Json ProvenanceToJson(const Provenance& p) {
  Json j;
  switch (p.kind) {
    case Provenance::Kind::kLlmFormulated:
      j["kind"] = "llm_formulated";
      break;
    case Provenance::Kind::kExternallySupplied:
      j["kind"] = "externally_supplied";
      break;
    case Provenance::Kind::kRefined:
      j["kind"] = "refined";
      j["step"] = p.step;
      break;
    case Provenance::Kind::kPerturbed:
      j["kind"] = "perturbed";
      j["seed"] = p.seed;
      j["op"] = p.op;
      break;
  }
  return j;
}

OptimizationModel ModelFromJson(const Json& doc, std::vector<std::string>* warnings) {
  SchemaReader r(warnings);
  if (!doc.is_object()) {
    throw Error(ErrorCode::kSchemaError, "model document must be a JSON object");
  }
  r.WarnUnknown(doc, {"parameters", "variables", "constraints", "objective", "provenance"},
                "$");
  OptimizationModel m;

  const Json& params = r.Array(doc, "parameters", "$");
  for (size_t i = 0; i < params.size(); ++i) {
    std::string path = "$.parameters[" + std::to_string(i) + "]";
    const Json& pj = params[i];
    r.WarnUnknown(pj, {"symbol", "definition", "value", "shape"}, path);
    Parameter p;
    p.symbol = r.String(pj, "symbol", path);
    p.definition = r.String(pj, "definition", path, false);
    const Json& value = r.Require(pj, "value", path);
    if (value.is_object() && value.contains("external")) {
      ExternalRef ext;
      ext.source = value.at("external").get<std::string>();
      ext.column = value.value("column", "");
      if (value.contains("nominal") && value.at("nominal").is_number()) {
        ext.nominal = value.at("nominal").get<double>();
      }
      p.value = ext;
    } else {
      p.value = value;
    }
    p.shape = pj.contains("shape") ? ParseShape(pj.at("shape"), path) : std::vector<Dim>{};
    m.parameters.push_back(std::move(p));
  }

  const Json& vars = r.Array(doc, "variables", "$");
  for (size_t i = 0; i < vars.size(); ++i) {
    std::string path = "$.variables[" + std::to_string(i) + "]";
    const Json& vj = vars[i];
    r.WarnUnknown(vj, {"symbol", "definition", "type", "shape", "lower_bound", "upper_bound"},
                  path);
    DecisionVariable v;
    v.symbol = r.String(vj, "symbol", path);
    v.definition = r.String(vj, "definition", path, false);
    v.type = ParseVarType(r.String(vj, "type", path), path);
    v.shape = vj.contains("shape") ? ParseShape(vj.at("shape"), path) : std::vector<Dim>{};
    v.lower_bound = OptionalBound(vj, "lower_bound", path);
    v.upper_bound = OptionalBound(vj, "upper_bound", path);
    m.variables.push_back(std::move(v));
  }

  const Json& cons = r.Array(doc, "constraints", "$");
  for (size_t i = 0; i < cons.size(); ++i) {
    std::string path = "$.constraints[" + std::to_string(i) + "]";
    const Json& cj = cons[i];
    r.WarnUnknown(cj, {"name", "description", "formulation"}, path);
    Constraint c;
    c.name = r.String(cj, "name", path);
    c.description = r.String(cj, "description", path, false);
    c.formulation = r.String(cj, "formulation", path);
    m.constraints.push_back(std::move(c));
  }

  const Json& objs = r.Array(doc, "objective", "$");
  if (objs.size() > 1) {
    throw Error(ErrorCode::kSchemaError,
                "\"objective\" at $ holds more than one objective");
  }
  if (objs.size() == 1) {
    const Json& oj = objs[0];
    std::string path = "$.objective[0]";
    r.WarnUnknown(oj, {"description", "formulation", "objective_sense"}, path);
    Objective o;
    o.description = r.String(oj, "description", path, false);
    o.formulation = r.String(oj, "formulation", path);
    o.sense = ParseSense(r.String(oj, "objective_sense", path), path);
    m.objective = std::move(o);
  }
  if (doc.contains("provenance")) {
    m.provenance = ParseProvenance(doc.at("provenance"), "$.provenance");
  }
  return m;
}

OptimizationModel ParseModelJson(std::string_view text,
                                 std::vector<std::string>* warnings) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, e.what());
  }
  return ModelFromJson(doc, warnings);
}

Json ModelToJson(const OptimizationModel& m) {
  Json doc;
  doc["parameters"] = Json::array();
  for (const auto& p : m.parameters) {
    Json pj;
    pj["symbol"] = p.symbol;
    pj["definition"] = p.definition;
    if (const auto* ext = std::get_if<ExternalRef>(&p.value)) {
      Json v;
      v["external"] = ext->source;
      if (!ext->column.empty()) v["column"] = ext->column;
      if (ext->nominal) v["nominal"] = *ext->nominal;
      pj["value"] = v;
    } else {
      pj["value"] = std::get<Json>(p.value);
    }
    pj["shape"] = ShapeToJson(p.shape);
    doc["parameters"].push_back(pj);
  }
  doc["constraints"] = Json::array();
  for (const auto& c : m.constraints) {
    doc["constraints"].push_back(
        {{"name", c.name}, {"description", c.description}, {"formulation", c.formulation}});
  }
  doc["variables"] = Json::array();
  for (const auto& v : m.variables) {
    Json vj;
    vj["symbol"] = v.symbol;
    vj["definition"] = v.definition;
    vj["type"] = VarTypeName(v.type);
    vj["shape"] = ShapeToJson(v.shape);
    if (v.lower_bound) vj["lower_bound"] = *v.lower_bound;
    if (v.upper_bound) vj["upper_bound"] = *v.upper_bound;
    doc["variables"].push_back(vj);
  }
  doc["objective"] = Json::array();
  if (m.objective) {
    doc["objective"].push_back({{"description", m.objective->description},
                                {"formulation", m.objective->formulation},
                                {"objective_sense", SenseName(m.objective->sense)}});
  }
  doc["provenance"] = ProvenanceToJson(m.provenance);
  return doc;
}

std::string SerializeModel(const OptimizationModel& model) {
  return ModelToJson(model).dump(2);
}

}  // namespace optverifier
