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

#include "branchlake/plan.hpp"

#include <fmt/format.h>

#include "branchlake/hash.hpp"

namespace branchlake::rel {

AggSpec count(std::string output) { return AggSpec{AggKind::kCount, std::move(output), std::nullopt, {}}; }

AggSpec count_if(Expr predicate, std::string output) {
    return AggSpec{AggKind::kCountIf, std::move(output), std::move(predicate), {}};
}

AggSpec sum(std::string column, std::string output) {
    return AggSpec{AggKind::kSum, std::move(output), std::nullopt, std::move(column)};
}

AggSpec avg(std::string column, std::string output) {
    return AggSpec{AggKind::kAvg, std::move(output), std::nullopt, std::move(column)};
}

namespace {

PlanPtr node(PlanNode::Op op, std::vector<PlanPtr> inputs) {
    return std::make_shared<const PlanNode>(PlanNode{std::move(op), std::move(inputs)});
}

std::string join_names(const std::vector<std::string>& names) {
    return fmt::format("[{}]", fmt::join(names, ", "));
}

std::string describe_agg(const AggSpec& a) {
    switch (a.kind) {
    case AggKind::kCount: return fmt::format("{}=count()", a.output);
    case AggKind::kCountIf: return fmt::format("{}=count_if({})", a.output, to_string(*a.predicate));
    case AggKind::kSum: return fmt::format("{}=sum({})", a.output, a.column);
    case AggKind::kAvg: return fmt::format("{}=avg({})", a.output, a.column);
    }
    return "?";
}

std::string describe_op(const PlanNode::Op& op) {
    return std::visit(
        [](const auto& o) -> std::string {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, ScanOp>) {
                return fmt::format("Scan({})", o.table);
            } else if constexpr (std::is_same_v<T, FilterOp>) {
                return fmt::format("Filter({})", to_string(o.predicate));
            } else if constexpr (std::is_same_v<T, ProjectOp>) {
                std::vector<std::string> parts;
                for (std::size_t i = 0; i < o.exprs.size(); ++i) {
                    parts.push_back(fmt::format("{}={}", o.names[i], to_string(o.exprs[i])));
                }
                return fmt::format("Project({})", fmt::join(parts, ", "));
            } else if constexpr (std::is_same_v<T, HashJoinOp>) {
                return fmt::format("HashJoin({} = {})", join_names(o.left_keys), join_names(o.right_keys));
            } else if constexpr (std::is_same_v<T, AggregateOp>) {
                std::vector<std::string> aggs;
                for (const auto& a : o.aggs) aggs.push_back(describe_agg(a));
                auto s = fmt::format("Aggregate(keys={}, {})", join_names(o.group_keys), fmt::join(aggs, ", "));
                if (!o.branch_domain.empty()) s += fmt::format(" domain={}", join_names(o.branch_domain));
                return s;
            } else if constexpr (std::is_same_v<T, WindowRankOp>) {
                return fmt::format("WindowRank(partition={}, order={} {}, tie={}, as {})", join_names(o.partition_keys),
                                   o.order_column, o.descending ? "desc" : "asc", o.tie_break, o.output);
            } else if constexpr (std::is_same_v<T, TopKOp>) {
                return fmt::format("TopK(partition={}, order={} {}, tie={}, k={})", join_names(o.partition_keys),
                                   o.order_column, o.descending ? "desc" : "asc", o.tie_break, o.k);
            } else {
                if (o.filter) return fmt::format("BranchUnion({}, filter={})", o.table, to_string(*o.filter));
                return fmt::format("BranchUnion({})", o.table);
            }
        },
        op);
}

void render(const PlanNode& plan, int depth, std::string& out) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += describe_op(plan.op);
    out += '\n';
    for (const auto& in : plan.inputs) render(*in, depth + 1, out);
}

}  // namespace

PlanPtr scan(std::string table) { return node(ScanOp{std::move(table)}, {}); }

PlanPtr filter(PlanPtr input, Expr predicate) {
    return node(FilterOp{std::move(predicate)}, {std::move(input)});
}

PlanPtr project(PlanPtr input, std::vector<Expr> exprs, std::vector<std::string> names) {
    return node(ProjectOp{std::move(exprs), std::move(names)}, {std::move(input)});
}

PlanPtr hash_join(PlanPtr left, PlanPtr right, std::vector<std::string> left_keys,
                  std::vector<std::string> right_keys) {
    return node(HashJoinOp{std::move(left_keys), std::move(right_keys)}, {std::move(left), std::move(right)});
}

PlanPtr aggregate(PlanPtr input, std::vector<std::string> group_keys, std::vector<AggSpec> aggs,
                  std::vector<std::string> branch_domain) {
    return node(AggregateOp{std::move(group_keys), std::move(aggs), std::move(branch_domain)}, {std::move(input)});
}

PlanPtr window_rank(PlanPtr input, std::vector<std::string> partition_keys, std::string order_column,
                    bool descending, std::string tie_break, std::string output) {
    return node(WindowRankOp{std::move(partition_keys), std::move(order_column), descending, std::move(tie_break),
                             std::move(output)},
                {std::move(input)});
}

PlanPtr top_k(PlanPtr input, std::vector<std::string> partition_keys, std::string order_column,
              bool descending, std::string tie_break, std::int64_t k) {
    return node(TopKOp{std::move(partition_keys), std::move(order_column), descending, std::move(tie_break), k},
                {std::move(input)});
}

PlanPtr branch_union(std::string table, std::optional<Expr> filter) {
    return node(BranchUnionOp{std::move(table), std::move(filter)}, {});
}

std::string to_string(const PlanNode& plan) {
    std::string out;
    render(plan, 0, out);
    return out;
}

std::uint64_t structural_hash(const PlanNode& plan) { return fnv1a64(to_string(plan)); }

bool contains_branch_union(const PlanNode& plan) {
    if (std::holds_alternative<BranchUnionOp>(plan.op)) return true;
    for (const auto& in : plan.inputs) {
        if (contains_branch_union(*in)) return true;
    }
    return false;
}

void collect_tables(const PlanNode& plan, std::vector<std::string>& out) {
    if (const auto* s = std::get_if<ScanOp>(&plan.op)) out.push_back(s->table);
    if (const auto* u = std::get_if<BranchUnionOp>(&plan.op)) out.push_back(u->table);
    for (const auto& in : plan.inputs) collect_tables(*in, out);
}

}  // namespace branchlake::rel
