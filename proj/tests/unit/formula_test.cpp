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

#include <gtest/gtest.h>

#include "optverifier/formula.hpp"

namespace optverifier {
namespace {

const SymbolKinds kKinds = {
    {"x", SymbolKind::kVariable},       {"y", SymbolKind::kVariable},
    {"Cost", SymbolKind::kParameter},   {"Cap", SymbolKind::kParameter},
    {"Items", SymbolKind::kParameter},
};

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

TEST(Formula, ParsesIndexedSumConstraint) {
  auto c = ParseConstraint("sum(i in Items, Cost[i] * x[i]) <= Cap", kKinds);
  EXPECT_EQ(c.relop, Relop::kLe);
  EXPECT_EQ(c.lhs.kind, ExprKind::kSum);
  ASSERT_EQ(c.lhs.binders.size(), 1u);
  EXPECT_EQ(c.lhs.binders[0].index, "i");
  EXPECT_EQ(c.lhs.binders[0].set, "Items");
  EXPECT_EQ(c.rhs.kind, ExprKind::kRef);
  EXPECT_EQ(c.rhs.symbol, "Cap");
}

TEST(Formula, QuantifiersAndGuards) {
  auto c = ParseConstraint(
      "sum(j in Items if j != i, x[i,j]) == 1 forall i in Items", kKinds);
  ASSERT_EQ(c.quantifiers.size(), 1u);
  EXPECT_EQ(c.quantifiers[0].index, "i");
  ASSERT_TRUE(c.lhs.guard.has_value());
  EXPECT_EQ(c.lhs.guard->op, GuardOp::kNe);
  EXPECT_EQ(c.relop, Relop::kEq);
}

TEST(Formula, IntegralityDeclaration) {
  auto c = ParseConstraint("x in Integers", kKinds);
  ASSERT_TRUE(c.domain.has_value());
  EXPECT_EQ(*c.domain, VarDomain::kIntegers);
}

TEST(Formula, CanonicalRoundTripIsStable) {
  for (const char* text : {
           "sum(i in Items, Cost[i] * x[i]) <= Cap",
           "x[i] - y[i] + 3 * x[i] >= -2 forall i in Items",
           "sum(i in Items, j in Items if i < j, x[i,j]) == 1",
           "-(x + y) <= 2 * (Cap - 1)",
       }) {
    auto first = ParseConstraint(text, kKinds);
    std::string printed = PrintCanonical(first);
    auto second = ParseConstraint(printed, kKinds);
    EXPECT_TRUE(first == second) << text << " -> " << printed;
    EXPECT_EQ(PrintCanonical(second), printed);
  }
}

TEST(Formula, StrictInequalitiesRejected) {
  EXPECT_EQ(CodeOf([] { ParseConstraint("x < 3", kKinds); }), ErrorCode::kNonstrictRequired);
  EXPECT_EQ(CodeOf([] { ParseConstraint("x > 3", kKinds); }), ErrorCode::kNonstrictRequired);
}

TEST(Formula, VariableProductRejected) {
  EXPECT_EQ(CodeOf([] { ParseConstraint("x * y <= 3", kKinds); }), ErrorCode::kNonlinear);
  EXPECT_EQ(CodeOf([] { ParseExpression("x * x", kKinds); }), ErrorCode::kNonlinear);
}

TEST(Formula, ParameterProductAccepted) {
  EXPECT_NO_THROW(ParseConstraint("Cost * Cap * x <= 3", kKinds));
}

TEST(Formula, SyntaxErrorCarriesPosition) {
  try {
    ParseConstraint("x + <= 3", kKinds);
    FAIL() << "expected a syntax error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSyntaxError);
    ASSERT_TRUE(e.pos().has_value());
    EXPECT_GT(e.pos()->column, 1);
  }
}

TEST(Formula, FreeSymbolsExcludeBoundIndices) {
  auto c = ParseConstraint("sum(i in Items, Cost[i] * x[i]) <= Cap", kKinds);
  auto free = FreeSymbols(c);
  EXPECT_TRUE(free.count("Cost"));
  EXPECT_TRUE(free.count("Items"));
  EXPECT_TRUE(free.count("x"));
  EXPECT_TRUE(free.count("Cap"));
  EXPECT_FALSE(free.count("i"));
}

TEST(Formula, MentionsVariable) {
  EXPECT_TRUE(MentionsVariable(ParseExpression("Cost * x", kKinds), kKinds));
  EXPECT_FALSE(MentionsVariable(ParseExpression("Cost * Cap", kKinds), kKinds));
}

}  // namespace
}  // namespace optverifier
