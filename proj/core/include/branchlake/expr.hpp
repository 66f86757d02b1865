// Copyright 2026-present The Branchlake Authors.
//
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

#pragma once

#include <string>
#include <vector>

#include "branchlake/table.hpp"

namespace branchlake::rel {

enum class CompareOp { kLt, kLe, kGt, kGe, kEq, kNe };
enum class ArithOp { kAdd, kSub, kMul, kDiv };
enum class BoolOpKind { kAnd, kOr, kNot };

/// Scalar expression tree evaluated column-at-a-time.
struct Expr {
    struct ColumnRef {
        std::string name;
    };
    struct Literal {
        Value value;
    };
    struct Compare {
        CompareOp op;
    };
    struct Arith {
        ArithOp op;
    };
    struct BoolOp {
        BoolOpKind op;
    };
    using Node = std::variant<ColumnRef, Literal, Compare, Arith, BoolOp>;

    Node node;
    std::vector<Expr> children;
};

Expr col(std::string name);
Expr lit(Value value);
Expr compare(CompareOp op, Expr lhs, Expr rhs);
Expr arith(ArithOp op, Expr lhs, Expr rhs);
Expr and_(std::vector<Expr> operands);
Expr or_(std::vector<Expr> operands);
Expr not_(Expr operand);

inline Expr eq(Expr a, Expr b) { return compare(CompareOp::kEq, std::move(a), std::move(b)); }
inline Expr gt(Expr a, Expr b) { return compare(CompareOp::kGt, std::move(a), std::move(b)); }
inline Expr le(Expr a, Expr b) { return compare(CompareOp::kLe, std::move(a), std::move(b)); }

/// Type-checks against the input schema; raises TypeError.
DataType result_type(const Expr& expr, const Schema& input);

/// Evaluates over every row of the table. The result has row_count values.
/// Raises DivideByZero when any divisor is zero.
ColumnPtr evaluate(const Expr& expr, const ColumnarTable& table);

/// Canonical text form; structurally equal expressions print identically.
std::string to_string(const Expr& expr);

void collect_columns(const Expr& expr, std::vector<std::string>& out);

}  // namespace branchlake::rel
