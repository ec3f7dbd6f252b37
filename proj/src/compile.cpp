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

#include "optverifier/compile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace optverifier {
namespace {

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> data;
};

std::string ShapeText(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

void FlattenJson(const Json& j, size_t depth, Tensor& t, const std::string& name) {
  if (j.is_number()) {
    if (depth != t.shape.size()) {
      throw Error(ErrorCode::kShapeMismatch, "ragged value for '" + name + "'");
    }
    t.data.push_back(j.get<double>());
    return;
  }
  if (!j.is_array()) {
    throw Error(ErrorCode::kShapeMismatch, "non-numeric value for '" + name + "'");
  }
  if (depth == t.shape.size()) {
    t.shape.push_back(static_cast<std::int64_t>(j.size()));
  } else if (depth > t.shape.size() ||
             t.shape[depth] != static_cast<std::int64_t>(j.size())) {
    throw Error(ErrorCode::kShapeMismatch, "ragged value for '" + name + "'");
  }
  for (const auto& e : j) FlattenJson(e, depth + 1, t, name);
}

Tensor JsonToTensor(const Json& j, const std::string& name) {
  Tensor t;
  FlattenJson(j, 0, t, name);
  size_t expect = 1;
  for (auto d : t.shape) expect *= static_cast<size_t>(d);
  if (expect != t.data.size()) {
    throw Error(ErrorCode::kShapeMismatch, "ragged value for '" + name + "'");
  }
  return t;
}

bool IsIntegral(double v) { return std::isfinite(v) && v == std::floor(v); }

struct Affine {
  LinearTerms coefs;
  double constant = 0.0;
};

struct VarLayout {
  size_t offset = 0;
  std::vector<std::int64_t> dims;
};

using Env = std::vector<std::pair<std::string, std::int64_t>>;

const std::int64_t* LookupEnv(const Env& env, std::string_view name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->first == name) return &it->second;
  }
  return nullptr;
}

bool GuardHolds(const Guard& g, const Env& env) {
  const std::int64_t* a = LookupEnv(env, g.lhs);
  const std::int64_t* b = LookupEnv(env, g.rhs);
  if (!a || !b) {
    throw Error(ErrorCode::kUnboundIndex, "guard on unbound index");
  }
  switch (g.op) {
    case GuardOp::kNe: return *a != *b;
    case GuardOp::kLt: return *a < *b;
    case GuardOp::kLe: return *a <= *b;
    case GuardOp::kGt: return *a > *b;
    case GuardOp::kGe: return *a >= *b;
  }
  return false;
}

class Grounder {
 public:
  Grounder(const OptimizationModel& model, const Bindings& bindings)
      : model_(model), bindings_(bindings), kinds_(model.Kinds()) {}

  GroundedModel Run();

 private:
  const Tensor& Param(const std::string& symbol);
  std::int64_t ResolveDim(const Dim& d);
  std::vector<std::int64_t> ResolveShape(const std::vector<Dim>& shape);
  const std::vector<std::int64_t>& IndexSet(const std::string& symbol);
  size_t FlatIndex(const VarLayout& layout, const Expr& ref, const Env& env,
                   const std::string& symbol);
  void Accumulate(const Expr& e, double scale, Env& env, Affine& out);
  double EvalConst(const Expr& e, Env& env);
  void ExpandQuantifiers(const std::vector<Quantifier>& qs, size_t k, Env& env,
                         const std::function<void(Env&)>& leaf);
  void GroundConstraint(const Constraint& c);
  std::string UniqueRowName(std::string base);

  const OptimizationModel& model_;
  const Bindings& bindings_;
  SymbolKinds kinds_;
  std::map<std::string, Tensor> params_;
  std::map<std::string, std::vector<std::int64_t>> sets_;
  std::map<std::string, VarLayout> layouts_;
  std::set<std::string> row_names_;
  GroundedModel out_;
};

const Tensor& Grounder::Param(const std::string& symbol) {
  auto it = params_.find(symbol);
  if (it != params_.end()) return it->second;
  const Parameter* p = model_.FindParameter(symbol);
  auto b = bindings_.find(symbol);
  Tensor t;
  if (b != bindings_.end()) {
    t = JsonToTensor(b->second, symbol);
  } else if (p && !p->IsExternal()) {
    t = JsonToTensor(std::get<Json>(p->value), symbol);
  } else if (p) {
    throw Error(ErrorCode::kUnboundParameter,
                "parameter '" + symbol + "' is external and has no binding");
  } else {
    throw Error(ErrorCode::kUnboundParameter, "symbol '" + symbol + "' is not declared");
  }
  if (p && !p->shape.empty()) {
    auto declared = ResolveShape(p->shape);
    if (declared != t.shape) {
      throw Error(ErrorCode::kShapeMismatch, "parameter '" + symbol + "' has shape " +
                                                 ShapeText(t.shape) + ", declared " +
                                                 ShapeText(declared));
    }
  }
  return params_.emplace(symbol, std::move(t)).first->second;
}

std::int64_t Grounder::ResolveDim(const Dim& d) {
  if (const auto* n = std::get_if<std::int64_t>(&d)) return *n;
  const std::string& name = std::get<std::string>(d);
  const Tensor& t = Param(name);
  if (!t.shape.empty() || !IsIntegral(t.data[0]) || t.data[0] < 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "dimension '" + name + "' is not a non-negative integer scalar");
  }
  return static_cast<std::int64_t>(t.data[0]);
}

std::vector<std::int64_t> Grounder::ResolveShape(const std::vector<Dim>& shape) {
  std::vector<std::int64_t> dims;
  for (const auto& d : shape) dims.push_back(ResolveDim(d));
  return dims;
}

const std::vector<std::int64_t>& Grounder::IndexSet(const std::string& symbol) {
  auto it = sets_.find(symbol);
  if (it != sets_.end()) return it->second;
  const Tensor& t = Param(symbol);
  std::vector<std::int64_t> values;
  if (t.shape.empty()) {
    if (!IsIntegral(t.data[0]) || t.data[0] < 0) {
      throw Error(ErrorCode::kShapeMismatch,
                  "index set '" + symbol + "' is not a non-negative integer");
    }
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(t.data[0]); ++i) {
      values.push_back(i);
    }
  } else if (t.shape.size() == 1) {
    for (double v : t.data) {
      if (!IsIntegral(v)) {
        throw Error(ErrorCode::kShapeMismatch,
                    "index set '" + symbol + "' holds a non-integer");
      }
      values.push_back(static_cast<std::int64_t>(v));
    }
  } else {
    throw Error(ErrorCode::kShapeMismatch, "index set '" + symbol + "' is not 1-D");
  }
  if (values.empty()) {
    out_.warnings.push_back("EMPTY_INDEX_SET: '" + symbol + "' is empty");
  }
  return sets_.emplace(symbol, std::move(values)).first->second;
}

size_t Grounder::FlatIndex(const VarLayout& layout, const Expr& ref, const Env& env,
                           const std::string& symbol) {
  if (ref.subscripts.size() != layout.dims.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "'" + symbol + "' takes " + std::to_string(layout.dims.size()) +
                    " subscripts, got " + std::to_string(ref.subscripts.size()));
  }
  size_t flat = 0;
  for (size_t k = 0; k < layout.dims.size(); ++k) {
    const std::int64_t* v = LookupEnv(env, ref.subscripts[k]);
    if (!v) {
      throw Error(ErrorCode::kUnboundIndex, "index '" + ref.subscripts[k] + "' is not bound");
    }
    if (*v < 0 || *v >= layout.dims[k]) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  symbol + "[" + std::to_string(*v) + "] outside extent " +
                      std::to_string(layout.dims[k]));
    }
    flat = flat * static_cast<size_t>(layout.dims[k]) + static_cast<size_t>(*v);
  }
  return flat;
}

void Grounder::Accumulate(const Expr& e, double scale, Env& env, Affine& out) {
  switch (e.kind) {
    case ExprKind::kNumber:
      out.constant += scale * e.number;
      return;
    case ExprKind::kRef: {
      if (e.subscripts.empty()) {
        if (const std::int64_t* v = LookupEnv(env, e.symbol)) {
          out.constant += scale * static_cast<double>(*v);
          return;
        }
      }
      auto lay = layouts_.find(e.symbol);
      if (lay != layouts_.end()) {
        size_t idx = lay->second.offset + FlatIndex(lay->second, e, env, e.symbol);
        out.coefs[idx] += scale;
        return;
      }
      const Tensor& t = Param(e.symbol);
      VarLayout shape{0, t.shape};
      size_t flat = FlatIndex(shape, e, env, e.symbol);
      out.constant += scale * t.data[flat];
      return;
    }
    case ExprKind::kNegate:
      Accumulate(e.operands[0], -scale, env, out);
      return;
    case ExprKind::kAdd:
      Accumulate(e.operands[0], scale, env, out);
      Accumulate(e.operands[1], scale, env, out);
      return;
    case ExprKind::kSub:
      Accumulate(e.operands[0], scale, env, out);
      Accumulate(e.operands[1], -scale, env, out);
      return;
    case ExprKind::kMul: {
      const Expr& a = e.operands[0];
      const Expr& b = e.operands[1];
      if (!MentionsVariable(a, kinds_)) {
        double c = EvalConst(a, env);
        if (c != 0.0) Accumulate(b, scale * c, env, out);
      } else if (!MentionsVariable(b, kinds_)) {
        double c = EvalConst(b, env);
        if (c != 0.0) Accumulate(a, scale * c, env, out);
      } else {
        throw Error(ErrorCode::kNonlinear, "product of two variable terms", e.pos);
      }
      return;
    }
    case ExprKind::kSum: {
      std::function<void(size_t)> loop = [&](size_t k) {
        if (k == e.binders.size()) {
          if (!e.guard || GuardHolds(*e.guard, env)) {
            Accumulate(e.operands[0], scale, env, out);
          }
          return;
        }
        const auto& values = IndexSet(e.binders[k].set);
        for (std::int64_t v : values) {
          env.emplace_back(e.binders[k].index, v);
          loop(k + 1);
          env.pop_back();
        }
      };
      loop(0);
      return;
    }
  }
}

double Grounder::EvalConst(const Expr& e, Env& env) {
  Affine a;
  Accumulate(e, 1.0, env, a);
  for (const auto& [idx, c] : a.coefs) {
    if (c != 0.0) throw Error(ErrorCode::kNonlinear, "product of two variable terms", e.pos);
  }
  return a.constant;
}

void Grounder::ExpandQuantifiers(const std::vector<Quantifier>& qs, size_t k, Env& env,
                                 const std::function<void(Env&)>& leaf) {
  if (k == qs.size()) {
    for (const auto& q : qs) {
      if (q.guard && !GuardHolds(*q.guard, env)) return;
    }
    leaf(env);
    return;
  }
  for (std::int64_t v : IndexSet(qs[k].set)) {
    env.emplace_back(qs[k].index, v);
    ExpandQuantifiers(qs, k + 1, env, leaf);
    env.pop_back();
  }
}

std::string Grounder::UniqueRowName(std::string base) {
  if (base.empty() || std::isdigit(static_cast<unsigned char>(base[0]))) base = "R_" + base;
  std::string name = base;
  for (int n = 2; row_names_.count(name); ++n) name = base + "_" + std::to_string(n);
  row_names_.insert(name);
  return name;
}

bool IsZeroLiteral(const Expr& e) { return e.kind == ExprKind::kNumber && e.number == 0.0; }

void Grounder::GroundConstraint(const Constraint& c) {
  ConstraintAst ast;
  try {
    ast = ParseConstraint(c.formulation, kinds_);
  } catch (const Error& err) {
    throw Error(err.code(), "constraint '" + c.name + "': " + err.what());
  }
  const std::string base = SanitizeName(c.name);

  if (ast.domain) {
    const Expr& ref = ast.lhs;
    auto lay = layouts_.find(ref.symbol);
    if (ref.kind != ExprKind::kRef || lay == layouts_.end()) {
      throw Error(ErrorCode::kSchemaError,
                  "constraint '" + c.name + "' declares a domain for a non-variable");
    }
    auto apply = [&](size_t idx) {
      FlatVariable& v = out_.variables[idx];
      if (*ast.domain == VarDomain::kBinaries) {
        v.type = VarType::kBinary;
        v.lower = std::max(v.lower, 0.0);
        v.upper = std::min(v.upper, 1.0);
      } else if (v.type == VarType::kContinuous) {
        v.type = VarType::kInteger;
      }
    };
    Env env;
    ExpandQuantifiers(ast.quantifiers, 0, env, [&](Env& e) {
      if (ref.subscripts.empty()) {
        size_t count = 1;
        for (auto d : lay->second.dims) count *= static_cast<size_t>(d);
        for (size_t i = 0; i < count; ++i) apply(lay->second.offset + i);
      } else {
        apply(lay->second.offset + FlatIndex(lay->second, ref, e, ref.symbol));
      }
    });
    return;
  }

  // `Var >= 0` (or `0 <= Var`) on a single reference becomes a bound.
  const Expr* bound_ref = nullptr;
  if (ast.relop == Relop::kGe && ast.lhs.kind == ExprKind::kRef && IsZeroLiteral(ast.rhs)) {
    bound_ref = &ast.lhs;
  } else if (ast.relop == Relop::kLe && ast.rhs.kind == ExprKind::kRef &&
             IsZeroLiteral(ast.lhs)) {
    bound_ref = &ast.rhs;
  }
  if (bound_ref && layouts_.count(bound_ref->symbol)) {
    const VarLayout& lay = layouts_.at(bound_ref->symbol);
    Env env;
    ExpandQuantifiers(ast.quantifiers, 0, env, [&](Env& e) {
      if (bound_ref->subscripts.empty() && !lay.dims.empty()) {
        throw Error(ErrorCode::kShapeMismatch,
                    "'" + bound_ref->symbol + "' needs subscripts in '" + c.name + "'");
      }
      FlatVariable& v =
          out_.variables[lay.offset + FlatIndex(lay, *bound_ref, e, bound_ref->symbol)];
      v.lower = std::max(v.lower, 0.0);
    });
    return;
  }

  Env env;
  size_t emitted = 0;
  ExpandQuantifiers(ast.quantifiers, 0, env, [&](Env& e) {
    Affine a;
    Accumulate(ast.lhs, 1.0, e, a);
    Accumulate(ast.rhs, -1.0, e, a);
    LinearRow row;
    for (const auto& [idx, coef] : a.coefs) {
      if (coef != 0.0) row.coefs.emplace(idx, coef);
    }
    row.relop = ast.relop;
    row.rhs = -a.constant;
    if (row.rhs == 0.0) row.rhs = 0.0;  // drop negative zero
    std::string name = base;
    for (const auto& q : ast.quantifiers) {
      name += "_" + std::to_string(*LookupEnv(e, q.index));
    }
    if (row.coefs.empty()) {
      bool ok = row.relop == Relop::kLe   ? 0.0 <= row.rhs + 1e-9
                : row.relop == Relop::kGe ? 0.0 >= row.rhs - 1e-9
                                          : std::fabs(row.rhs) <= 1e-9;
      if (ok) return;
      out_.warnings.push_back("row '" + name + "' has no variables and cannot hold");
    }
    row.name = UniqueRowName(std::move(name));
    out_.rows.push_back(std::move(row));
    ++emitted;
  });
  (void)emitted;
}

GroundedModel Grounder::Run() {
  for (const auto& v : model_.variables) {
    VarLayout lay{out_.variables.size(), ResolveShape(v.shape)};
    size_t count = 1;
    for (auto d : lay.dims) count *= static_cast<size_t>(d);
    if (count > 5'000'000) {
      throw Error(ErrorCode::kTooLarge, "variable '" + v.symbol + "' has too many entries");
    }
    std::vector<std::int64_t> idx(lay.dims.size(), 0);
    for (size_t n = 0; n < count; ++n) {
      FlatVariable fv;
      fv.symbol = v.symbol;
      fv.name = v.symbol;
      for (auto i : idx) fv.name += "_" + std::to_string(i);
      fv.type = v.type;
      fv.lower = v.EffectiveLower();
      fv.upper = v.EffectiveUpper();
      out_.variables.push_back(std::move(fv));
      for (size_t k = idx.size(); k-- > 0;) {
        if (++idx[k] < lay.dims[k]) break;
        idx[k] = 0;
      }
    }
    layouts_.emplace(v.symbol, std::move(lay));
  }
  for (const auto& c : model_.constraints) GroundConstraint(c);
  if (model_.objective) {
    Expr e;
    try {
      e = ParseExpression(model_.objective->formulation, kinds_);
    } catch (const Error& err) {
      throw Error(err.code(), std::string("objective: ") + err.what());
    }
    Env env;
    Affine a;
    Accumulate(e, 1.0, env, a);
    out_.objective.sense = model_.objective->sense;
    for (const auto& [idx, coef] : a.coefs) {
      if (coef != 0.0) out_.objective.coefs.emplace(idx, coef);
    }
    out_.objective.constant = a.constant;
  }
  return std::move(out_);
}

}  // namespace

std::optional<size_t> GroundedModel::FindVariable(std::string_view name) const {
  for (size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  return std::nullopt;
}

const LinearRow* GroundedModel::FindRow(std::string_view name) const {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

double GroundedModel::Evaluate(const LinearTerms& terms,
                               const std::vector<double>& values) const {
  double s = 0.0;
  for (const auto& [idx, coef] : terms) s += coef * values.at(idx);
  return s;
}

GroundedModel Ground(const OptimizationModel& model, const Bindings& bindings) {
  return Grounder(model, bindings).Run();
}

std::string SanitizeName(std::string_view name) {
  std::string out(name);
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') c = '_';
  }
  return out;
}

std::string FormatNumber12(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

namespace {

void AppendTerms(std::string& out, const LinearTerms& terms,
                 const std::vector<std::string>& names) {
  size_t n = 0;
  for (const auto& [idx, coef] : terms) {
    if (n > 0 && n % 8 == 0) out += "\n  ";
    if (n == 0) {
      out += " " + FormatNumber12(coef) + " " + names[idx];
    } else if (coef < 0) {
      out += " - " + FormatNumber12(-coef) + " " + names[idx];
    } else {
      out += " + " + FormatNumber12(coef) + " " + names[idx];
    }
    ++n;
  }
}

}  // namespace

std::string EmitLp(const GroundedModel& g) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& v : g.variables) {
    std::string n = SanitizeName(v.name);
    if (!seen.insert(n).second) {
      throw Error(ErrorCode::kNameCollision, "variable name '" + n + "' is not unique");
    }
    names.push_back(std::move(n));
  }
  std::set<std::string> row_seen;
  for (const auto& r : g.rows) {
    if (!row_seen.insert(SanitizeName(r.name)).second) {
      throw Error(ErrorCode::kNameCollision, "row name '" + r.name + "' is not unique");
    }
  }

  std::string out;
  out += g.objective.sense == ObjectiveSense::kMaximize ? "Maximize\n" : "Minimize\n";
  out += " obj:";
  if (g.objective.coefs.empty() && !names.empty()) {
    out += " 0 " + names[0];
  } else {
    AppendTerms(out, g.objective.coefs, names);
  }
  if (g.objective.constant != 0.0) {
    out += (g.objective.constant < 0 ? " - " : " + ") +
           FormatNumber12(std::fabs(g.objective.constant));
  }
  out += "\nSubject To\n";
  for (const auto& r : g.rows) {
    out += " " + SanitizeName(r.name) + ":";
    if (r.coefs.empty()) {
      if (names.empty()) continue;
      out += " 0 " + names[0];
    } else {
      AppendTerms(out, r.coefs, names);
    }
    out += " ";
    out += r.relop == Relop::kLe ? "<=" : r.relop == Relop::kGe ? ">=" : "=";
    out += " " + FormatNumber12(r.rhs) + "\n";
  }
  out += "Bounds\n";
  std::vector<std::string> generals, binaries;
  for (size_t i = 0; i < g.variables.size(); ++i) {
    const auto& v = g.variables[i];
    const std::string& n = names[i];
    if (v.type == VarType::kBinary) {
      binaries.push_back(n);
      if (v.lower == 0.0 && v.upper == 1.0) continue;
    } else if (v.type == VarType::kInteger) {
      generals.push_back(n);
    }
    bool lo_inf = std::isinf(v.lower);
    bool up_inf = std::isinf(v.upper);
    if (lo_inf && up_inf) {
      out += " " + n + " free\n";
    } else if (up_inf) {
      if (v.lower != 0.0) out += " " + n + " >= " + FormatNumber12(v.lower) + "\n";
    } else {
      out += " " + FormatNumber12(v.lower) + " <= " + n + " <= " + FormatNumber12(v.upper) +
             "\n";
    }
  }
  if (!generals.empty()) {
    out += "Generals\n";
    for (const auto& n : generals) out += " " + n + "\n";
  }
  if (!binaries.empty()) {
    out += "Binaries\n";
    for (const auto& n : binaries) out += " " + n + "\n";
  }
  out += "End\n";
  return out;
}

std::vector<double> AssignmentValues(const GroundedModel& g, const Assignment& assignment) {
  std::vector<double> values;
  values.reserve(g.variables.size());
  for (const auto& v : g.variables) {
    auto it = assignment.find(v.name);
    if (it == assignment.end()) {
      throw Error(ErrorCode::kMissingVariable, "assignment lacks '" + v.name + "'");
    }
    values.push_back(it->second);
  }
  return values;
}

FeasibilityReport CheckFeasibility(const GroundedModel& g, const Assignment& assignment,
                                   const FeasibilityTolerances& tol) {
  std::vector<double> x = AssignmentValues(g, assignment);
  FeasibilityReport rep;
  for (const auto& r : g.rows) {
    double lhs = g.Evaluate(r.coefs, x);
    double excess = r.relop == Relop::kLe   ? lhs - r.rhs
                    : r.relop == Relop::kGe ? r.rhs - lhs
                                            : std::fabs(lhs - r.rhs);
    if (excess > std::max(tol.absolute, tol.relative * std::fabs(r.rhs))) {
      rep.violated_rows.push_back({r.name, lhs, r.relop, r.rhs, excess});
    }
  }
  for (size_t i = 0; i < g.variables.size(); ++i) {
    const auto& v = g.variables[i];
    double val = x[i];
    if (v.type != VarType::kContinuous) {
      double frac = std::fabs(val - std::round(val));
      if (frac > tol.integrality) {
        rep.integrality_violations.push_back({v.name, val, frac, "not integral"});
      }
    }
    if (std::isfinite(v.lower) && val < v.lower &&
        v.lower - val > std::max(tol.absolute, tol.relative * std::fabs(v.lower))) {
      rep.bound_violations.push_back(
          {v.name, val, v.lower - val, "below lower bound " + FormatNumber12(v.lower)});
    }
    if (std::isfinite(v.upper) && val > v.upper &&
        val - v.upper > std::max(tol.absolute, tol.relative * std::fabs(v.upper))) {
      rep.bound_violations.push_back(
          {v.name, val, val - v.upper, "above upper bound " + FormatNumber12(v.upper)});
    }
  }
  rep.feasible = rep.violated_rows.empty() && rep.integrality_violations.empty() &&
                 rep.bound_violations.empty();
  rep.objective_recomputed = g.Evaluate(g.objective.coefs, x) + g.objective.constant;
  return rep;
}

std::string FeasibilityReport::Render(size_t max_items) const {
  std::ostringstream os;
  if (feasible) {
    os << "Deterministic check: the solution satisfies every constraint, bound and "
          "integrality requirement. Recomputed objective "
       << FormatNumber12(objective_recomputed) << ".\n";
    return os.str();
  }
  os << "Deterministic check: the solution is NOT feasible for the compiled model.\n";
  size_t shown = 0;
  for (const auto& r : violated_rows) {
    if (shown++ == max_items) break;
    os << "- constraint " << r.row << ": lhs " << FormatNumber12(r.lhs) << " "
       << RelopText(r.relop) << " " << FormatNumber12(r.rhs) << " violated by "
       << FormatNumber12(r.magnitude) << "\n";
  }
  for (const auto& v : integrality_violations) {
    if (shown++ == max_items) break;
    os << "- variable " << v.variable << " = " << FormatNumber12(v.value)
       << " is not integral\n";
  }
  for (const auto& v : bound_violations) {
    if (shown++ == max_items) break;
    os << "- variable " << v.variable << " = " << FormatNumber12(v.value) << " is "
       << v.detail << "\n";
  }
  size_t total = violated_rows.size() + integrality_violations.size() + bound_violations.size();
  if (total > max_items) os << "- ... " << (total - max_items) << " more\n";
  os << "Recomputed objective " << FormatNumber12(objective_recomputed) << ".\n";
  return os.str();
}

OptimizationModel BindModel(const OptimizationModel& model, const Bindings& bindings) {
  OptimizationModel out = model;
  auto bind_dims = [&](std::vector<Dim>& shape) {
    for (auto& d : shape) {
      const auto* name = std::get_if<std::string>(&d);
      if (!name || model.FindParameter(*name)) continue;
      auto it = bindings.find(*name);
      if (it != bindings.end() && it->second.is_number_integer()) {
        d = it->second.get<std::int64_t>();
      }
    }
  };
  for (auto& p : out.parameters) {
    auto it = bindings.find(p.symbol);
    if (it != bindings.end()) p.value = it->second;
    bind_dims(p.shape);
  }
  for (auto& v : out.variables) bind_dims(v.shape);
  return out;
}

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool IsCapacityLike(std::string_view symbol) {
  return Lower(symbol).find("capacity") != std::string::npos;
}

bool IsDemandLike(std::string_view symbol) {
  std::string l = Lower(symbol);
  if (l.find("demand") == std::string::npos) return false;
  return l.rfind("min", 0) != 0 && l.rfind("max", 0) != 0;
}

double JsonSum(const Json& j) {
  if (j.is_number()) return j.get<double>();
  double s = 0.0;
  if (j.is_array()) {
    for (const auto& e : j) s += JsonSum(e);
  }
  return s;
}

size_t JsonCount(const Json& j) {
  if (j.is_number()) return 1;
  size_t n = 0;
  if (j.is_array()) {
    for (const auto& e : j) n += JsonCount(e);
  }
  return n;
}

Json FillJson(const std::vector<std::int64_t>& dims, size_t k,
              const std::function<Json()>& draw) {
  if (k == dims.size()) return draw();
  Json arr = Json::array();
  for (std::int64_t i = 0; i < dims[k]; ++i) arr.push_back(FillJson(dims, k + 1, draw));
  return arr;
}

Json MapJson(const Json& j, const std::function<Json(const Json&)>& f) {
  if (!j.is_array()) return f(j);
  Json arr = Json::array();
  for (const auto& e : j) arr.push_back(MapJson(e, f));
  return arr;
}

}  // namespace

ToyInstance InstantiateToy(const OptimizationModel& model, std::uint64_t seed,
                           const std::map<std::string, std::int64_t>& dim_overrides) {
  std::vector<std::string> dim_names;
  auto collect = [&](const std::vector<Dim>& shape) {
    for (const auto& d : shape) {
      if (const auto* n = std::get_if<std::string>(&d)) {
        if (std::find(dim_names.begin(), dim_names.end(), *n) == dim_names.end()) {
          dim_names.push_back(*n);
        }
      }
    }
  };
  for (const auto& p : model.parameters) collect(p.shape);
  for (const auto& v : model.variables) collect(v.shape);

  bool symbolic = model.HasExternalParameters();
  for (const auto& n : dim_names) {
    if (!model.FindParameter(n)) symbolic = true;
  }
  if (!symbolic) {
    throw Error(ErrorCode::kNoExternalParameters,
                "model has no external parameters or symbolic dimensions");
  }

  Bindings bindings;
  for (const auto& name : dim_names) {
    const Parameter* p = model.FindParameter(name);
    auto ov = dim_overrides.find(name);
    if (ov != dim_overrides.end()) {
      bindings[name] = ov->second;
    } else if (p && !p->IsExternal()) {
      continue;
    } else {
      std::int64_t v = 10;
      if (p) {
        const auto& ref = std::get<ExternalRef>(p->value);
        if (ref.nominal) v = std::min<std::int64_t>(static_cast<std::int64_t>(*ref.nominal), 10);
      }
      bindings[name] = v;
    }
  }

  auto resolve = [&](const Dim& d) -> std::int64_t {
    if (const auto* n = std::get_if<std::int64_t>(&d)) return *n;
    const std::string& name = std::get<std::string>(d);
    auto it = bindings.find(name);
    if (it != bindings.end()) return it->second.get<std::int64_t>();
    const Parameter* p = model.FindParameter(name);
    if (p && !p->IsExternal() && std::get<Json>(p->value).is_number_integer()) {
      return std::get<Json>(p->value).get<std::int64_t>();
    }
    throw Error(ErrorCode::kUnboundParameter, "dimension '" + name + "' cannot be resolved");
  };

  std::mt19937_64 rng(seed);
  auto draw = [&]() -> Json { return static_cast<std::int64_t>(1 + rng() % 100); };
  std::vector<std::string> capacities;
  for (const auto& p : model.parameters) {
    if (!p.IsExternal() || bindings.count(p.symbol)) continue;
    std::vector<std::int64_t> dims;
    for (const auto& d : p.shape) dims.push_back(resolve(d));
    bindings[p.symbol] = FillJson(dims, 0, draw);
    if (IsCapacityLike(p.symbol)) capacities.push_back(p.symbol);
  }

  double demand = 0.0;
  for (const auto& p : model.parameters) {
    if (!IsDemandLike(p.symbol)) continue;
    auto it = bindings.find(p.symbol);
    if (it != bindings.end()) {
      demand += JsonSum(it->second);
    } else if (!p.IsExternal()) {
      demand += JsonSum(std::get<Json>(p.value));
    }
  }
  if (demand > 0.0) {
    for (const auto& sym : capacities) {
      size_t n = std::max<size_t>(1, JsonCount(bindings[sym]));
      auto cap = static_cast<std::int64_t>(std::ceil(2.0 * demand / static_cast<double>(n)));
      bindings[sym] = MapJson(bindings[sym], [cap](const Json&) { return Json(cap); });
    }
  }

  ToyInstance toy;
  toy.model = BindModel(model, bindings);
  toy.bindings = std::move(bindings);
  return toy;
}

namespace {

std::string Trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && issp(s.back())) s.pop_back();
  size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  s.erase(0, i);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Json NumberJson(double v) {
  if (IsIntegral(v) && std::fabs(v) < 9e15) return static_cast<std::int64_t>(v);
  return v;
}

}  // namespace

Bindings LoadExternalParameters(const OptimizationModel& model,
                                const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::string file = path.filename().string();

  std::vector<const Parameter*> wanted, others;
  for (const auto& p : model.parameters) {
    if (!p.IsExternal()) continue;
    const auto& ref = std::get<ExternalRef>(p.value);
    if (!ref.source.empty() && std::filesystem::path(ref.source).filename() == file) {
      wanted.push_back(&p);
    } else {
      others.push_back(&p);
    }
  }
  auto column_of = [](const Parameter& p) {
    const auto& ref = std::get<ExternalRef>(p.value);
    return ref.column.empty() ? p.symbol : ref.column;
  };

  std::map<std::string, Json> columns;
  std::string ext = Lower(path.extension().string());
  if (ext == ".json") {
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kMalformedJson, e.what());
    }
    if (!doc.is_object()) {
      throw Error(ErrorCode::kSchemaError, "parameter file must hold a JSON object");
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) columns[it.key()] = it.value();
  } else {
    std::istringstream ls(text);
    std::string line;
    std::vector<std::string> header;
    std::vector<Json> cols;
    int lineno = 0;
    while (std::getline(ls, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (Trim(line).empty()) continue;
      auto cells = SplitCsv(line);
      if (header.empty()) {
        header = cells;
        cols.assign(header.size(), Json::array());
        continue;
      }
      if (cells.size() != header.size()) {
        throw Error(ErrorCode::kShapeMismatch,
                    file + " line " + std::to_string(lineno) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));
      }
      for (size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].empty()) continue;
        double v = 0.0;
        try {
          size_t used = 0;
          v = std::stod(cells[k], &used);
          if (used != cells[k].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw Error(ErrorCode::kSchemaError, file + " line " + std::to_string(lineno) +
                                                   ": '" + cells[k] + "' is not a number");
        }
        cols[k].push_back(NumberJson(v));
      }
    }
    for (size_t k = 0; k < header.size(); ++k) columns[header[k]] = cols[k];
  }

  Bindings out;
  auto bind = [&](const Parameter& p, Json value) {
    Tensor t = JsonToTensor(value, p.symbol);
    if (ext != ".json" && p.shape.empty()) {
      if (t.data.size() != 1) {
        throw Error(ErrorCode::kShapeMismatch,
                    "scalar '" + p.symbol + "' has " + std::to_string(t.data.size()) + " rows");
      }
      value = value[0];
      t = JsonToTensor(value, p.symbol);
    }
    if (!p.shape.empty() && t.shape.size() != p.shape.size()) {
      throw Error(ErrorCode::kShapeMismatch, "'" + p.symbol + "' has rank " +
                                                 std::to_string(t.shape.size()) + ", declared " +
                                                 std::to_string(p.shape.size()));
    }
    for (size_t k = 0; k < p.shape.size(); ++k) {
      std::optional<std::int64_t> want;
      if (const auto* n = std::get_if<std::int64_t>(&p.shape[k])) {
        want = *n;
      } else {
        const std::string& name = std::get<std::string>(p.shape[k]);
        const Parameter* dp = model.FindParameter(name);
        if (out.count(name) && out[name].is_number_integer()) {
          want = out[name].get<std::int64_t>();
        } else if (dp && !dp->IsExternal() && std::get<Json>(dp->value).is_number_integer()) {
          want = std::get<Json>(dp->value).get<std::int64_t>();
        } else if (dp && dp->IsExternal() && std::get<ExternalRef>(dp->value).nominal) {
          // An external dimension with a declared size must agree with the file.
          want = static_cast<std::int64_t>(*std::get<ExternalRef>(dp->value).nominal);
          out[name] = *want;
        } else {
          out[name] = t.shape[k];
        }
      }
      if (want && *want != t.shape[k]) {
        throw Error(ErrorCode::kShapeMismatch,
                    "'" + p.symbol + "' has " + std::to_string(t.shape[k]) +
                        " entries along axis " + std::to_string(k) + ", expected " +
                        std::to_string(*want));
      }
    }
    out[p.symbol] = std::move(value);
  };

  for (const Parameter* p : wanted) {
    auto it = columns.find(column_of(*p));
    if (it == columns.end()) it = columns.find(p->symbol);
    if (it == columns.end()) {
      throw Error(ErrorCode::kMissingColumn,
                  "'" + file + "' has no column '" + column_of(*p) + "' for " + p->symbol);
    }
    bind(*p, it->second);
  }
  for (const Parameter* p : others) {
    auto it = columns.find(column_of(*p));
    if (it == columns.end()) it = columns.find(p->symbol);
    if (it != columns.end()) bind(*p, it->second);
  }
  return out;
}

}  // namespace optverifier
