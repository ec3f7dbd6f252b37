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

#include "optverifier/formula.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace optverifier {

Expr Expr::Number(double value) {
  Expr e;
  e.kind = ExprKind::kNumber;
  e.number = value;
  return e;
}

Expr Expr::Ref(std::string symbol, std::vector<std::string> subscripts) {
  Expr e;
  e.kind = ExprKind::kRef;
  e.symbol = std::move(symbol);
  e.subscripts = std::move(subscripts);
  return e;
}

Expr Expr::Unary(ExprKind kind, Expr operand) {
  Expr e;
  e.kind = kind;
  e.operands.push_back(std::move(operand));
  return e;
}

Expr Expr::Binary(ExprKind kind, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = kind;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

Expr Expr::Sum(std::vector<Binder> binders, std::optional<Guard> guard,
               Expr body) {
  Expr e;
  e.kind = ExprKind::kSum;
  e.binders = std::move(binders);
  e.guard = std::move(guard);
  e.operands.push_back(std::move(body));
  return e;
}

bool Expr::operator==(const Expr& other) const {
  return kind == other.kind && number == other.number &&
         symbol == other.symbol && subscripts == other.subscripts &&
         operands == other.operands && binders == other.binders &&
         guard == other.guard;
}

bool ConstraintAst::operator==(const ConstraintAst& other) const {
  if (domain != other.domain || quantifiers != other.quantifiers ||
      !(lhs == other.lhs)) {
    return false;
  }
  if (domain) return true;
  return relop == other.relop && rhs == other.rhs;
}

std::string_view RelopText(Relop relop) {
  switch (relop) {
    case Relop::kLe: return "<=";
    case Relop::kGe: return ">=";
    case Relop::kEq: return "==";
  }
  return "?";
}

std::string_view GuardOpText(GuardOp op) {
  switch (op) {
    case GuardOp::kNe: return "!=";
    case GuardOp::kLt: return "<";
    case GuardOp::kLe: return "<=";
    case GuardOp::kGt: return ">";
    case GuardOp::kGe: return ">=";
  }
  return "?";
}

namespace {

enum class Tok {
  kIdent, kNumber, kPlus, kMinus, kStar, kLParen, kRParen, kLBracket,
  kRBracket, kComma, kLe, kGe, kLt, kGt, kEqEq, kEq, kNe, kEnd
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> Run() {
    std::vector<Token> out;
    while (true) {
      SkipSpace();
      Token t;
      t.pos = Pos();
      if (at_ >= text_.size()) {
        t.kind = Tok::kEnd;
        out.push_back(t);
        return out;
      }
      char c = text_[at_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t start = at_;
        while (at_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[at_])) ||
                text_[at_] == '_')) {
          Advance();
        }
        t.kind = Tok::kIdent;
        t.text = std::string(text_.substr(start, at_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        size_t start = at_;
        while (at_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[at_])) ||
                text_[at_] == '.')) {
          Advance();
        }
        if (at_ < text_.size() && (text_[at_] == 'e' || text_[at_] == 'E')) {
          size_t save = at_;
          Advance();
          if (at_ < text_.size() && (text_[at_] == '+' || text_[at_] == '-')) {
            Advance();
          }
          if (at_ < text_.size() &&
              std::isdigit(static_cast<unsigned char>(text_[at_]))) {
            while (at_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[at_]))) {
              Advance();
            }
          } else {
            at_ = save;
          }
        }
        t.kind = Tok::kNumber;
        t.text = std::string(text_.substr(start, at_ - start));
        const char* first = text_.data() + start;
        const char* last = text_.data() + at_;
        auto [ptr, ec] = std::from_chars(first, last, t.number);
        if (ec != std::errc() || ptr != last) {
          throw Error(ErrorCode::kSyntaxError,
                      "malformed number '" + t.text + "'", t.pos);
        }
      } else {
        Advance();
        auto next_is = [&](char n) {
          if (at_ < text_.size() && text_[at_] == n) {
            Advance();
            return true;
          }
          return false;
        };
        switch (c) {
          case '+': t.kind = Tok::kPlus; break;
          case '-': t.kind = Tok::kMinus; break;
          case '*': t.kind = Tok::kStar; break;
          case '(': t.kind = Tok::kLParen; break;
          case ')': t.kind = Tok::kRParen; break;
          case '[': t.kind = Tok::kLBracket; break;
          case ']': t.kind = Tok::kRBracket; break;
          case ',': t.kind = Tok::kComma; break;
          case '<': t.kind = next_is('=') ? Tok::kLe : Tok::kLt; break;
          case '>': t.kind = next_is('=') ? Tok::kGe : Tok::kGt; break;
          case '=': t.kind = next_is('=') ? Tok::kEqEq : Tok::kEq; break;
          case '!':
            if (!next_is('=')) {
              throw Error(ErrorCode::kSyntaxError, "expected '!='", t.pos);
            }
            t.kind = Tok::kNe;
            break;
          default:
            throw Error(ErrorCode::kSyntaxError,
                        std::string("unexpected character '") + c + "'",
                        t.pos);
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void SkipSpace() {
    while (at_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[at_]))) {
      Advance();
    }
  }
  void Advance() {
    if (text_[at_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++at_;
  }
  SourcePos Pos() const { return SourcePos{line_, column_}; }

  std::string_view text_;
  size_t at_ = 0;
  int line_ = 1;
  int column_ = 1;
};

bool IsKeyword(std::string_view s) {
  return s == "sum" || s == "in" || s == "forall" || s == "if" ||
         s == "Integers" || s == "Binaries";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).Run()) {}

  Expr ParseWholeExpression() {
    Expr e = ParseExpr();
    Expect(Tok::kEnd, "end of expression");
    return e;
  }

  ConstraintAst ParseWholeConstraint() {
    ConstraintAst c;
    c.lhs = ParseExpr();
    if (Peek().kind == Tok::kIdent && Peek().text == "in") {
      if (c.lhs.kind != ExprKind::kRef) {
        Fail("integrality declarations apply to a single variable reference");
      }
      Next();
      const Token& dom = Peek();
      if (dom.kind == Tok::kIdent && dom.text == "Integers") {
        c.domain = VarDomain::kIntegers;
      } else if (dom.kind == Tok::kIdent && dom.text == "Binaries") {
        c.domain = VarDomain::kBinaries;
      } else {
        Fail("expected 'Integers' or 'Binaries'");
      }
      Next();
    } else {
      const Token& op = Peek();
      switch (op.kind) {
        case Tok::kLe: c.relop = Relop::kLe; break;
        case Tok::kGe: c.relop = Relop::kGe; break;
        case Tok::kEq:
        case Tok::kEqEq: c.relop = Relop::kEq; break;
        case Tok::kLt:
        case Tok::kGt:
          throw Error(ErrorCode::kNonstrictRequired,
                      "strict inequality; always use non-strict inequalities "
                      "(<= or >=)",
                      op.pos);
        default:
          Fail("expected a relational operator (<=, >=, ==)");
      }
      Next();
      c.rhs = ParseExpr();
    }
    while (Peek().kind == Tok::kIdent && Peek().text == "forall") {
      Next();
      Quantifier q;
      q.index = ExpectIdent("quantified index");
      ExpectKeyword("in");
      q.set = ExpectIdent("index set");
      if (Peek().kind == Tok::kIdent && Peek().text == "if") {
        q.guard = ParseGuard();
      }
      c.quantifiers.push_back(std::move(q));
    }
    if (Peek().kind == Tok::kLt || Peek().kind == Tok::kGt) {
      throw Error(ErrorCode::kNonstrictRequired,
                  "strict inequality; always use non-strict inequalities",
                  Peek().pos);
    }
    Expect(Tok::kEnd, "end of constraint");
    return c;
  }

 private:
  const Token& Peek(size_t ahead = 0) const {
    size_t i = std::min(at_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  Token Next() { return tokens_[std::min(at_++, tokens_.size() - 1)]; }

  [[noreturn]] void Fail(const std::string& what) const {
    const Token& t = Peek();
    std::string found = t.kind == Tok::kEnd ? "end of input" : "'" + t.text + "'";
    if (t.kind != Tok::kIdent && t.kind != Tok::kNumber && t.kind != Tok::kEnd) {
      found = "operator";
    }
    throw Error(ErrorCode::kSyntaxError, what + ", found " + found, t.pos);
  }

  void Expect(Tok kind, const std::string& what) {
    if (Peek().kind != kind) Fail("expected " + what);
    Next();
  }

  void ExpectKeyword(std::string_view kw) {
    if (Peek().kind != Tok::kIdent || Peek().text != kw) {
      Fail("expected '" + std::string(kw) + "'");
    }
    Next();
  }

  std::string ExpectIdent(const std::string& what) {
    if (Peek().kind != Tok::kIdent || IsKeyword(Peek().text)) {
      Fail("expected " + what);
    }
    return Next().text;
  }

  Guard ParseGuard() {
    ExpectKeyword("if");
    Guard g;
    g.lhs = ExpectIdent("index in guard");
    switch (Peek().kind) {
      case Tok::kNe: g.op = GuardOp::kNe; break;
      case Tok::kLt: g.op = GuardOp::kLt; break;
      case Tok::kLe: g.op = GuardOp::kLe; break;
      case Tok::kGt: g.op = GuardOp::kGt; break;
      case Tok::kGe: g.op = GuardOp::kGe; break;
      default: Fail("expected a guard comparison (!=, <, <=, >, >=)");
    }
    Next();
    g.rhs = ExpectIdent("index in guard");
    return g;
  }

  Expr ParseExpr() {
    Expr lhs = ParseTerm();
    while (Peek().kind == Tok::kPlus || Peek().kind == Tok::kMinus) {
      Token op = Next();
      Expr rhs = ParseTerm();
      lhs = Expr::Binary(op.kind == Tok::kPlus ? ExprKind::kAdd : ExprKind::kSub,
                         std::move(lhs), std::move(rhs));
      lhs.pos = op.pos;
    }
    return lhs;
  }

  Expr ParseTerm() {
    Expr lhs = ParseFactor();
    while (Peek().kind == Tok::kStar) {
      Token op = Next();
      Expr rhs = ParseFactor();
      lhs = Expr::Binary(ExprKind::kMul, std::move(lhs), std::move(rhs));
      lhs.pos = op.pos;
    }
    return lhs;
  }

  Expr ParseFactor() {
    if (Peek().kind == Tok::kMinus) {
      Token op = Next();
      Expr e = Expr::Unary(ExprKind::kNegate, ParseFactor());
      e.pos = op.pos;
      return e;
    }
    return ParseAtom();
  }

  Expr ParseAtom() {
    const Token& t = Peek();
    SourcePos pos = t.pos;
    if (t.kind == Tok::kNumber) {
      Expr e = Expr::Number(Next().number);
      e.pos = pos;
      return e;
    }
    if (t.kind == Tok::kLParen) {
      Next();
      Expr e = ParseExpr();
      Expect(Tok::kRParen, "')'");
      return e;
    }
    if (t.kind == Tok::kIdent && t.text == "sum" &&
        Peek(1).kind == Tok::kLParen) {
      Next();
      Next();
      std::vector<Binder> binders;
      std::optional<Guard> guard;
      while (true) {
        Binder b;
        b.index = ExpectIdent("summation index");
        ExpectKeyword("in");
        b.set = ExpectIdent("index set");
        binders.push_back(std::move(b));
        if (Peek().kind == Tok::kIdent && Peek().text == "if") {
          guard = ParseGuard();
          Expect(Tok::kComma, "',' before summation body");
          break;
        }
        Expect(Tok::kComma, "',' in summation");
        if (Peek().kind == Tok::kIdent && !IsKeyword(Peek().text) &&
            Peek(1).kind == Tok::kIdent && Peek(1).text == "in") {
          continue;
        }
        break;
      }
      Expr body = ParseExpr();
      Expect(Tok::kRParen, "')' closing sum");
      Expr e = Expr::Sum(std::move(binders), std::move(guard), std::move(body));
      e.pos = pos;
      return e;
    }
    if (t.kind == Tok::kIdent && !IsKeyword(t.text)) {
      std::string symbol = Next().text;
      std::vector<std::string> subs;
      if (Peek().kind == Tok::kLBracket) {
        Next();
        subs.push_back(ExpectIdent("subscript index"));
        while (Peek().kind == Tok::kComma) {
          Next();
          subs.push_back(ExpectIdent("subscript index"));
        }
        Expect(Tok::kRBracket, "']'");
      }
      Expr e = Expr::Ref(std::move(symbol), std::move(subs));
      e.pos = pos;
      return e;
    }
    Fail("expected a number, reference, sum(...) or '('");
  }

  std::vector<Token> tokens_;
  size_t at_ = 0;
};

bool IsVariable(const std::string& symbol, const SymbolKinds& kinds) {
  auto it = kinds.find(symbol);
  return it != kinds.end() && it->second == SymbolKind::kVariable;
}

// Returns whether `e` mentions a variable; throws on a product of two
// variable-bearing factors.
bool CheckLinear(const Expr& e, const SymbolKinds& kinds) {
  switch (e.kind) {
    case ExprKind::kNumber:
      return false;
    case ExprKind::kRef:
      return IsVariable(e.symbol, kinds);
    case ExprKind::kNegate:
    case ExprKind::kSum:
      return CheckLinear(e.operands[0], kinds);
    case ExprKind::kAdd:
    case ExprKind::kSub: {
      bool a = CheckLinear(e.operands[0], kinds);
      bool b = CheckLinear(e.operands[1], kinds);
      return a || b;
    }
    case ExprKind::kMul: {
      bool a = CheckLinear(e.operands[0], kinds);
      bool b = CheckLinear(e.operands[1], kinds);
      if (a && b) {
        throw Error(ErrorCode::kNonlinear,
                    "product of two variable terms: " + PrintCanonical(e),
                    e.pos);
      }
      return a || b;
    }
  }
  return false;
}

void CheckGuard(const Guard& g, const std::set<std::string>& scope) {
  for (const auto* name : {&g.lhs, &g.rhs}) {
    if (!scope.count(*name)) {
      throw Error(ErrorCode::kUnboundIndex,
                  "guard compares unbound index '" + *name + "'");
    }
  }
}

void CheckBound(const Expr& e, std::set<std::string> scope) {
  switch (e.kind) {
    case ExprKind::kNumber:
      return;
    case ExprKind::kRef:
      for (const auto& s : e.subscripts) {
        if (!scope.count(s)) {
          throw Error(ErrorCode::kUnboundIndex,
                      "index '" + s + "' in " + e.symbol + " is not bound",
                      e.pos);
        }
      }
      return;
    case ExprKind::kSum:
      for (const auto& b : e.binders) scope.insert(b.index);
      if (e.guard) CheckGuard(*e.guard, scope);
      CheckBound(e.operands[0], scope);
      return;
    default:
      for (const auto& op : e.operands) CheckBound(op, scope);
  }
}

std::set<std::string> QuantifierScope(const ConstraintAst& c) {
  std::set<std::string> scope;
  for (const auto& q : c.quantifiers) scope.insert(q.index);
  return scope;
}

void FormatNumber(double v, std::string& out) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void Print(const Expr& e, std::string& out);

void PrintWrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  Print(e, out);
  if (wrap) out += ')';
}

bool IsAdditive(const Expr& e) {
  return e.kind == ExprKind::kAdd || e.kind == ExprKind::kSub;
}

void PrintGuard(const Guard& g, std::string& out) {
  out += " if ";
  out += g.lhs;
  out += ' ';
  out += GuardOpText(g.op);
  out += ' ';
  out += g.rhs;
}

void Print(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::kNumber:
      FormatNumber(e.number, out);
      return;
    case ExprKind::kRef:
      out += e.symbol;
      if (!e.subscripts.empty()) {
        out += '[';
        for (size_t i = 0; i < e.subscripts.size(); ++i) {
          if (i) out += ',';
          out += e.subscripts[i];
        }
        out += ']';
      }
      return;
    case ExprKind::kNegate: {
      const Expr& op = e.operands[0];
      out += '-';
      PrintWrapped(op, IsAdditive(op) || op.kind == ExprKind::kMul, out);
      return;
    }
    case ExprKind::kAdd:
    case ExprKind::kSub:
      Print(e.operands[0], out);
      out += e.kind == ExprKind::kAdd ? " + " : " - ";
      PrintWrapped(e.operands[1], IsAdditive(e.operands[1]), out);
      return;
    case ExprKind::kMul:
      PrintWrapped(e.operands[0], IsAdditive(e.operands[0]), out);
      out += " * ";
      PrintWrapped(e.operands[1],
                   IsAdditive(e.operands[1]) ||
                       e.operands[1].kind == ExprKind::kMul,
                   out);
      return;
    case ExprKind::kSum:
      out += "sum(";
      for (size_t i = 0; i < e.binders.size(); ++i) {
        if (i) out += ", ";
        out += e.binders[i].index;
        out += " in ";
        out += e.binders[i].set;
      }
      if (e.guard) PrintGuard(*e.guard, out);
      out += ", ";
      Print(e.operands[0], out);
      out += ')';
      return;
  }
}

void CollectFree(const Expr& e, const std::set<std::string>& bound,
                 std::set<std::string>& out) {
  switch (e.kind) {
    case ExprKind::kNumber:
      return;
    case ExprKind::kRef:
      if (!(e.subscripts.empty() && bound.count(e.symbol))) {
        out.insert(e.symbol);
      }
      return;
    case ExprKind::kSum: {
      std::set<std::string> inner = bound;
      for (const auto& b : e.binders) {
        if (!bound.count(b.set)) out.insert(b.set);
        inner.insert(b.index);
      }
      CollectFree(e.operands[0], inner, out);
      return;
    }
    default:
      for (const auto& op : e.operands) CollectFree(op, bound, out);
  }
}

}  // namespace

void CheckExpression(const Expr& expr, const SymbolKinds& kinds) {
  CheckLinear(expr, kinds);
  CheckBound(expr, {});
}

void CheckConstraint(const ConstraintAst& c, const SymbolKinds& kinds) {
  if (!c.domain) {
    bool a = CheckLinear(c.lhs, kinds);
    bool b = CheckLinear(c.rhs, kinds);
    (void)a;
    (void)b;
  }
  std::set<std::string> scope = QuantifierScope(c);
  for (const auto& q : c.quantifiers) {
    if (q.guard) CheckGuard(*q.guard, scope);
  }
  CheckBound(c.lhs, scope);
  if (!c.domain) CheckBound(c.rhs, scope);
}

ConstraintAst ParseConstraint(std::string_view text, const SymbolKinds& kinds) {
  ConstraintAst c = Parser(text).ParseWholeConstraint();
  CheckConstraint(c, kinds);
  return c;
}

Expr ParseExpression(std::string_view text, const SymbolKinds& kinds) {
  Expr e = Parser(text).ParseWholeExpression();
  CheckExpression(e, kinds);
  return e;
}

std::string PrintCanonical(const Expr& expr) {
  std::string out;
  Print(expr, out);
  return out;
}

std::string PrintCanonical(const ConstraintAst& c) {
  std::string out;
  Print(c.lhs, out);
  if (c.domain) {
    out += *c.domain == VarDomain::kIntegers ? " in Integers" : " in Binaries";
  } else {
    out += ' ';
    out += RelopText(c.relop);
    out += ' ';
    Print(c.rhs, out);
  }
  for (const auto& q : c.quantifiers) {
    out += " forall ";
    out += q.index;
    out += " in ";
    out += q.set;
    if (q.guard) PrintGuard(*q.guard, out);
  }
  return out;
}

std::set<std::string> FreeSymbols(const Expr& expr) {
  std::set<std::string> out;
  CollectFree(expr, {}, out);
  return out;
}

std::set<std::string> FreeSymbols(const ConstraintAst& c) {
  std::set<std::string> out;
  std::set<std::string> bound = QuantifierScope(c);
  for (const auto& q : c.quantifiers) {
    if (!bound.count(q.set)) out.insert(q.set);
  }
  CollectFree(c.lhs, bound, out);
  if (!c.domain) CollectFree(c.rhs, bound, out);
  return out;
}

bool MentionsVariable(const Expr& expr, const SymbolKinds& kinds) {
  if (expr.kind == ExprKind::kRef) return IsVariable(expr.symbol, kinds);
  for (const auto& op : expr.operands) {
    if (MentionsVariable(op, kinds)) return true;
  }
  return false;
}

}  // namespace optverifier
