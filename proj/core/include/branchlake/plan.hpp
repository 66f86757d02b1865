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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "branchlake/expr.hpp"

namespace branchlake::rel {

enum class AggKind { kCount, kCountIf, kSum, kAvg };

struct AggSpec {
    AggKind kind;
    std::string output;
    std::optional<Expr> predicate;  // count_if
    std::string column;             // sum, avg
};

AggSpec count(std::string output);
AggSpec count_if(Expr predicate, std::string output);
AggSpec sum(std::string column, std::string output);
AggSpec avg(std::string column, std::string output);

struct ScanOp {
    std::string table;
};

struct FilterOp {
    Expr predicate;
};

struct ProjectOp {
    std::vector<Expr> exprs;
    std::vector<std::string> names;
};

/// Builds on the right input, probes with the left. Output rows follow left
/// order; the right key columns are dropped from the output.
struct HashJoinOp {
    std::vector<std::string> left_keys;
    std::vector<std::string> right_keys;
};

/// Output is sorted by the group keys. With no keys, exactly one row.
/// `branch_domain` lists branch ids that must each produce a group even when
/// no input row carries them; it is only valid when the sole key is the
/// branch column.
struct AggregateOp {
    std::vector<std::string> group_keys;
    std::vector<AggSpec> aggs;
    std::vector<std::string> branch_domain;
};

/// Row number within each partition, ordered by order_column and then by
/// tie_break ascending. Input row order is preserved.
struct WindowRankOp {
    std::vector<std::string> partition_keys;
    std::string order_column;
    bool descending = true;
    std::string tie_break;
    std::string output;
};

/// First k rows per partition, emitted sorted by (partition, order, tie_break).
struct TopKOp {
    std::vector<std::string> partition_keys;
    std::string order_column;
    bool descending = true;
    std::string tie_break;
    std::int64_t k = 0;
};

/// Every branch variant of a table, concatenated in branch order with the
/// branch column prepended. `filter` is a predicate pushed into the scan.
struct BranchUnionOp {
    std::string table;
    std::optional<Expr> filter;
};

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

struct PlanNode {
    using Op = std::variant<ScanOp, FilterOp, ProjectOp, HashJoinOp, AggregateOp, WindowRankOp, TopKOp, BranchUnionOp>;

    Op op;
    std::vector<PlanPtr> inputs;
};

PlanPtr scan(std::string table);
PlanPtr filter(PlanPtr input, Expr predicate);
PlanPtr project(PlanPtr input, std::vector<Expr> exprs, std::vector<std::string> names);
PlanPtr hash_join(PlanPtr left, PlanPtr right, std::vector<std::string> left_keys,
                  std::vector<std::string> right_keys);
PlanPtr aggregate(PlanPtr input, std::vector<std::string> group_keys, std::vector<AggSpec> aggs,
                  std::vector<std::string> branch_domain = {});
PlanPtr window_rank(PlanPtr input, std::vector<std::string> partition_keys, std::string order_column,
                    bool descending, std::string tie_break, std::string output);
PlanPtr top_k(PlanPtr input, std::vector<std::string> partition_keys, std::string order_column,
              bool descending, std::string tie_break, std::int64_t k);
PlanPtr branch_union(std::string table, std::optional<Expr> filter = std::nullopt);

/// Indented operator tree. Structurally equal plans render identically.
std::string to_string(const PlanNode& plan);
std::uint64_t structural_hash(const PlanNode& plan);

bool contains_branch_union(const PlanNode& plan);
void collect_tables(const PlanNode& plan, std::vector<std::string>& out);

}  // namespace branchlake::rel
