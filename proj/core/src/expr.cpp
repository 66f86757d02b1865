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

#include "branchlake/expr.hpp"

#include <fmt/format.h>

#include "branchlake/error.hpp"

namespace branchlake::rel {

Expr col(std::string name) { return Expr{Expr::ColumnRef{std::move(name)}, {}}; }
Expr lit(Value value) { return Expr{Expr::Literal{std::move(value)}, {}}; }

Expr compare(CompareOp op, Expr lhs, Expr rhs) {
    return Expr{Expr::Compare{op}, {std::move(lhs), std::move(rhs)}};
}

Expr arith(ArithOp op, Expr lhs, Expr rhs) {
    return Expr{Expr::Arith{op}, {std::move(lhs), std::move(rhs)}};
}

Expr and_(std::vector<Expr> operands) { return Expr{Expr::BoolOp{BoolOpKind::kAnd}, std::move(operands)}; }
Expr or_(std::vector<Expr> operands) { return Expr{Expr::BoolOp{BoolOpKind::kOr}, std::move(operands)}; }
Expr not_(Expr operand) { return Expr{Expr::BoolOp{BoolOpKind::kNot}, {std::move(operand)}}; }

namespace {

bool is_numeric(DataType t) { return t == DataType::kInt64 || t == DataType::kFloat64; }

std::string_view op_text(CompareOp op) {
    switch (op) {
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    }
    return "?";
}

std::string_view op_text(ArithOp op) {
    switch (op) {
    case ArithOp::kAdd: return "+";
    case ArithOp::kSub: return "-";
    case ArithOp::kMul: return "*";
    case ArithOp::kDiv: return "/";
    }
    return "?";
}

// Either a full column or a scalar broadcast over `rows`.
struct Operand {
    ColumnPtr column;
    Value scalar;
    std::size_t rows = 0;

    DataType type() const { return column ? type_of(*column) : type_of(scalar); }
};

template <typename T>
struct View {
    const std::vector<T>* values = nullptr;
    T scalar{};

    const T& operator[](std::size_t i) const { return values ? (*values)[i] : scalar; }
};

template <typename T>
View<T> view_of(const Operand& o) {
    if (o.column) return View<T>{&std::get<std::vector<T>>(*o.column), T{}};
    if constexpr (std::is_same_v<T, std::uint8_t>) {
        return View<T>{nullptr, static_cast<std::uint8_t>(std::get<bool>(o.scalar) ? 1 : 0)};
    } else {
        return View<T>{nullptr, std::get<T>(o.scalar)};
    }
}

// Views borrow the operand's column, so a temporary operand would dangle.
template <typename T>
View<T> view_of(Operand&&) = delete;

// Numeric read with int64 -> double promotion.
struct NumView {
    const Int64Column* ints = nullptr;
    const Float64Column* floats = nullptr;
    double scalar = 0;

    double operator[](std::size_t i) const {
        if (ints) return static_cast<double>((*ints)[i]);
        if (floats) return (*floats)[i];
        return scalar;
    }
};

NumView num_view(Operand&&) = delete;

NumView num_view(const Operand& o) {
    if (o.column) {
        if (type_of(*o.column) == DataType::kInt64) return NumView{&std::get<Int64Column>(*o.column), nullptr, 0};
        return NumView{nullptr, &std::get<Float64Column>(*o.column), 0};
    }
    if (type_of(o.scalar) == DataType::kInt64) {
        return NumView{nullptr, nullptr, static_cast<double>(std::get<std::int64_t>(o.scalar))};
    }
    return NumView{nullptr, nullptr, std::get<double>(o.scalar)};
}

template <typename T>
BoolColumn compare_typed(CompareOp op, const Operand& a, const Operand& b, std::size_t n) {
    auto x = view_of<T>(a);
    auto y = view_of<T>(b);
    BoolColumn out(n);
    auto run = [&](auto pred) {
        for (std::size_t i = 0; i < n; ++i) out[i] = pred(x[i], y[i]) ? 1 : 0;
    };
    switch (op) {
    case CompareOp::kLt: run([](const T& l, const T& r) { return l < r; }); break;
    case CompareOp::kLe: run([](const T& l, const T& r) { return l <= r; }); break;
    case CompareOp::kGt: run([](const T& l, const T& r) { return l > r; }); break;
    case CompareOp::kGe: run([](const T& l, const T& r) { return l >= r; }); break;
    case CompareOp::kEq: run([](const T& l, const T& r) { return l == r; }); break;
    case CompareOp::kNe: run([](const T& l, const T& r) { return l != r; }); break;
    }
    return out;
}

Operand eval(const Expr& expr, const ColumnarTable& table);

Operand as_column(Column c, std::size_t rows) {
    return Operand{std::make_shared<const Column>(std::move(c)), Value{}, rows};
}

Operand eval_compare(CompareOp op, const Operand& a, const Operand& b, std::size_t n) {
    switch (a.type()) {
    case DataType::kInt64: return as_column(compare_typed<std::int64_t>(op, a, b, n), n);
    case DataType::kFloat64: return as_column(compare_typed<double>(op, a, b, n), n);
    case DataType::kBool: return as_column(compare_typed<std::uint8_t>(op, a, b, n), n);
    case DataType::kString: return as_column(compare_typed<std::string>(op, a, b, n), n);
    }
    return {};
}

template <typename T>
Column arith_typed(ArithOp op, const Operand& a, const Operand& b, std::size_t n) {
    std::vector<T> out(n);
    if constexpr (std::is_same_v<T, std::int64_t>) {
        auto x = view_of<std::int64_t>(a);
        auto y = view_of<std::int64_t>(b);
        for (std::size_t i = 0; i < n; ++i) {
            switch (op) {
            case ArithOp::kAdd: out[i] = x[i] + y[i]; break;
            case ArithOp::kSub: out[i] = x[i] - y[i]; break;
            case ArithOp::kMul: out[i] = x[i] * y[i]; break;
            case ArithOp::kDiv: break;
            }
        }
    } else {
        auto x = num_view(a);
        auto y = num_view(b);
        for (std::size_t i = 0; i < n; ++i) {
            switch (op) {
            case ArithOp::kAdd: out[i] = x[i] + y[i]; break;
            case ArithOp::kSub: out[i] = x[i] - y[i]; break;
            case ArithOp::kMul: out[i] = x[i] * y[i]; break;
            case ArithOp::kDiv:
                if (y[i] == 0.0) raise(ErrorCode::kDivideByZero, "division by zero");
                out[i] = x[i] / y[i];
                break;
            }
        }
    }
    return out;
}

Operand eval(const Expr& expr, const ColumnarTable& table) {
    const std::size_t n = table.row_count();
    return std::visit(
        [&](const auto& node) -> Operand {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
                return Operand{table.column_ptr(table.schema().require(node.name)), Value{}, n};
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                return Operand{nullptr, node.value, n};
            } else if constexpr (std::is_same_v<T, Expr::Compare>) {
                return eval_compare(node.op, eval(expr.children[0], table), eval(expr.children[1], table), n);
            } else if constexpr (std::is_same_v<T, Expr::Arith>) {
                auto a = eval(expr.children[0], table);
                auto b = eval(expr.children[1], table);
                bool ints = a.type() == DataType::kInt64 && b.type() == DataType::kInt64;
                if (ints && node.op != ArithOp::kDiv) return as_column(arith_typed<std::int64_t>(node.op, a, b, n), n);
                return as_column(arith_typed<double>(node.op, a, b, n), n);
            } else {
                if (node.op == BoolOpKind::kNot) {
                    auto a = eval(expr.children[0], table);
                    auto x = view_of<std::uint8_t>(a);
                    BoolColumn out(n);
                    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] ? 0 : 1;
                    return as_column(std::move(out), n);
                }
                const bool is_and = node.op == BoolOpKind::kAnd;
                BoolColumn out(n, is_and ? 1 : 0);
                for (const auto& child : expr.children) {
                    auto operand = eval(child, table);
                    auto x = view_of<std::uint8_t>(operand);
                    for (std::size_t i = 0; i < n; ++i) {
                        out[i] = is_and ? (out[i] && x[i]) : (out[i] || x[i]);
                    }
                }
                return as_column(std::move(out), n);
            }
        },
        expr.node);
}

}  // namespace

DataType result_type(const Expr& expr, const Schema& input) {
    return std::visit(
        [&](const auto& node) -> DataType {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
                return input[input.require(node.name)].type;
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                return type_of(node.value);
            } else if constexpr (std::is_same_v<T, Expr::Compare>) {
                if (expr.children.size() != 2) raise(ErrorCode::kTypeError, "comparison needs two operands");
                auto l = result_type(expr.children[0], input);
                auto r = result_type(expr.children[1], input);
                if (l != r) {
                    raise(ErrorCode::kTypeError, fmt::format("cannot compare {} with {} in {}", type_name(l),
                                                             type_name(r), to_string(expr)));
                }
                return DataType::kBool;
            } else if constexpr (std::is_same_v<T, Expr::Arith>) {
                if (expr.children.size() != 2) raise(ErrorCode::kTypeError, "arithmetic needs two operands");
                auto l = result_type(expr.children[0], input);
                auto r = result_type(expr.children[1], input);
                if (!is_numeric(l) || !is_numeric(r)) {
                    raise(ErrorCode::kTypeError, fmt::format("arithmetic over non-numeric operands in {}",
                                                             to_string(expr)));
                }
                if (node.op == ArithOp::kDiv) return DataType::kFloat64;
                return l == DataType::kInt64 && r == DataType::kInt64 ? DataType::kInt64 : DataType::kFloat64;
            } else {
                if (expr.children.empty() || (node.op == BoolOpKind::kNot && expr.children.size() != 1)) {
                    raise(ErrorCode::kTypeError, "malformed boolean operator");
                }
                for (const auto& c : expr.children) {
                    if (result_type(c, input) != DataType::kBool) {
                        raise(ErrorCode::kTypeError,
                              fmt::format("boolean operator over non-bool operand {}", to_string(c)));
                    }
                }
                return DataType::kBool;
            }
        },
        expr.node);
}

ColumnPtr evaluate(const Expr& expr, const ColumnarTable& table) {
    auto o = eval(expr, table);
    if (o.column) return o.column;
    Column c = make_column(type_of(o.scalar));
    std::visit(
        [&](auto& v) {
            using T = typename std::decay_t<decltype(v)>::value_type;
            if constexpr (std::is_same_v<T, std::uint8_t>) {
                v.assign(o.rows, std::get<bool>(o.scalar) ? 1 : 0);
            } else {
                v.assign(o.rows, std::get<T>(o.scalar));
            }
        },
        c);
    return std::make_shared<const Column>(std::move(c));
}

std::string to_string(const Expr& expr) {
    return std::visit(
        [&](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::ColumnRef>) {
                return node.name;
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                if (type_of(node.value) == DataType::kString) return fmt::format("'{}'", std::get<std::string>(node.value));
                if (type_of(node.value) == DataType::kFloat64) return format_double(std::get<double>(node.value)) + "f";
                return value_to_string(node.value);
            } else if constexpr (std::is_same_v<T, Expr::Compare>) {
                return fmt::format("({} {} {})", to_string(expr.children[0]), op_text(node.op), to_string(expr.children[1]));
            } else if constexpr (std::is_same_v<T, Expr::Arith>) {
                return fmt::format("({} {} {})", to_string(expr.children[0]), op_text(node.op), to_string(expr.children[1]));
            } else {
                if (node.op == BoolOpKind::kNot) return fmt::format("NOT {}", to_string(expr.children[0]));
                std::string out = "(";
                for (std::size_t i = 0; i < expr.children.size(); ++i) {
                    if (i) out += node.op == BoolOpKind::kAnd ? " AND " : " OR ";
                    out += to_string(expr.children[i]);
                }
                return out + ")";
            }
        },
        expr.node);
}

void collect_columns(const Expr& expr, std::vector<std::string>& out) {
    if (const auto* ref = std::get_if<Expr::ColumnRef>(&expr.node)) out.push_back(ref->name);
    for (const auto& c : expr.children) collect_columns(c, out);
}

}  // namespace branchlake::rel
