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

// Formulation language for constraint and objective strings.
//
//   constraint := expr relop expr quant*
//               | ref "in" ("Integers" | "Binaries") quant*
//   quant      := "forall" ident "in" ident guard?
//   guard      := "if" ident ("!=" | "<" | "<=" | ">" | ">=") ident
//   expr       := term (("+" | "-") term)*
//   term       := factor ("*" factor)*
//   factor     := "-" factor | atom
//   atom       := number | ref | "sum(" binders "," expr ")" | "(" expr ")"
//   binders    := ident "in" ident ("," ident "in" ident)* guard?
//   ref        := ident ("[" ident ("," ident)* "]")?
//   relop      := "<=" | ">=" | "==" | "="
//
// Index sets are parameters holding an integer list, or a scalar integer
// parameter N standing for {0, ..., N-1}.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "optverifier/error.hpp"

namespace optverifier {

enum class SymbolKind { kParameter, kVariable };

// Declared symbols of the owning model. Linearity can only be checked for
// symbols listed here; unlisted symbols are treated as parameters.
using SymbolKinds = std::map<std::string, SymbolKind, std::less<>>;

enum class GuardOp { kNe, kLt, kLe, kGt, kGe };

struct Guard {
  std::string lhs;
  GuardOp op = GuardOp::kNe;
  std::string rhs;

  bool operator==(const Guard&) const = default;
};

struct Binder {
  std::string index;
  std::string set;

  bool operator==(const Binder&) const = default;
};

enum class ExprKind { kNumber, kRef, kNegate, kAdd, kSub, kMul, kSum };

// Value-semantic expression tree. Positions are informational and do not
// take part in equality.
struct Expr {
  ExprKind kind = ExprKind::kNumber;
  double number = 0.0;
  std::string symbol;                  // kRef
  std::vector<std::string> subscripts; // kRef
  std::vector<Expr> operands;          // unary/binary operands, sum body
  std::vector<Binder> binders;         // kSum
  std::optional<Guard> guard;          // kSum
  SourcePos pos;

  static Expr Number(double value);
  static Expr Ref(std::string symbol, std::vector<std::string> subscripts = {});
  static Expr Unary(ExprKind kind, Expr operand);
  static Expr Binary(ExprKind kind, Expr lhs, Expr rhs);
  static Expr Sum(std::vector<Binder> binders, std::optional<Guard> guard,
                  Expr body);

  bool operator==(const Expr& other) const;
};

enum class Relop { kLe, kGe, kEq };

enum class VarDomain { kIntegers, kBinaries };

struct Quantifier {
  std::string index;
  std::string set;
  std::optional<Guard> guard;

  bool operator==(const Quantifier&) const = default;
};

struct ConstraintAst {
  Expr lhs;
  Relop relop = Relop::kLe;
  Expr rhs;
  // Set for integrality declarations ("X[i] in Integers"); lhs is then the
  // declared reference and relop/rhs are unused.
  std::optional<VarDomain> domain;
  std::vector<Quantifier> quantifiers;

  bool operator==(const ConstraintAst& other) const;
};

ConstraintAst ParseConstraint(std::string_view text,
                              const SymbolKinds& kinds = {});
Expr ParseExpression(std::string_view text, const SymbolKinds& kinds = {});

std::string PrintCanonical(const Expr& expr);
std::string PrintCanonical(const ConstraintAst& constraint);

// Symbols referenced by the tree (refs and index sets), excluding indices
// bound inside it.
std::set<std::string> FreeSymbols(const Expr& expr);
std::set<std::string> FreeSymbols(const ConstraintAst& constraint);

// True when some reference to a listed variable occurs in the tree.
bool MentionsVariable(const Expr& expr, const SymbolKinds& kinds);

// Re-runs the linearity and binding checks against `kinds`; throws the same
// errors as the parser.
void CheckConstraint(const ConstraintAst& constraint, const SymbolKinds& kinds);
void CheckExpression(const Expr& expr, const SymbolKinds& kinds);

std::string_view RelopText(Relop relop);
std::string_view GuardOpText(GuardOp op);

}  // namespace optverifier
