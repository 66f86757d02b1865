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

#include "branchlake/executor.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <set>
#include <string_view>

#include <fmt/format.h>

#include "branchlake/error.hpp"

namespace branchlake::rel {

void MapTableSource::add(std::string name, TablePtr table) { tables_[std::move(name)] = std::move(table); }

void MapTableSource::add_variant(const std::string& name, std::string branch, TablePtr table) {
    variants_[name][std::move(branch)] = std::move(table);
}

Schema MapTableSource::schema(const std::string& table) {
    if (auto it = tables_.find(table); it != tables_.end()) return it->second->schema();
    if (auto it = variants_.find(table); it != variants_.end() && !it->second.empty()) {
        return it->second.begin()->second->schema();
    }
    raise(ErrorCode::kUnknownTable, fmt::format("unknown table '{}'", table));
}

TablePtr MapTableSource::scan(const std::string& table) {
    if (auto it = tables_.find(table); it != tables_.end()) return it->second;
    raise(ErrorCode::kUnknownTable, fmt::format("unknown table '{}'", table));
}

std::vector<std::pair<std::string, TablePtr>> MapTableSource::variants(const std::string& table) {
    auto it = variants_.find(table);
    if (it == variants_.end()) raise(ErrorCode::kUnknownTable, fmt::format("no variants of table '{}'", table));
    return {it->second.begin(), it->second.end()};
}

std::optional<TablePtr> SubplanMemo::find(std::uint64_t key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    ++hits_;
    return it->second;
}

void SubplanMemo::put(std::uint64_t key, TablePtr table) { entries_.emplace(key, std::move(table)); }

namespace {

// ---------------------------------------------------------------------------
// Row comparison and key encoding

struct SortKey {
    const Column* column;
    bool descending;
};

int compare_at(const Column& c, std::size_t a, std::size_t b) {
    return std::visit(
        [&](const auto& v) -> int {
            if (v[a] < v[b]) return -1;
            if (v[b] < v[a]) return 1;
            return 0;
        },
        c);
}

class RowLess {
public:
    explicit RowLess(std::vector<SortKey> keys) : keys_(std::move(keys)) {}

    bool operator()(std::size_t a, std::size_t b) const {
        for (const auto& k : keys_) {
            int c = compare_at(*k.column, a, b);
            if (c != 0) return k.descending ? c > 0 : c < 0;
        }
        return false;
    }

private:
    std::vector<SortKey> keys_;
};

void encode_value(const Column& c, std::size_t row, std::string& out) {
    switch (type_of(c)) {
    case DataType::kInt64: {
        auto v = std::get<Int64Column>(c)[row];
        out.append(reinterpret_cast<const char*>(&v), sizeof(v));
        break;
    }
    case DataType::kFloat64: {
        double v = std::get<Float64Column>(c)[row];
        if (v == 0.0) v = 0.0;  // -0.0 and 0.0 group together
        out.append(reinterpret_cast<const char*>(&v), sizeof(v));
        break;
    }
    case DataType::kBool: out.push_back(static_cast<char>(std::get<BoolColumn>(c)[row])); break;
    case DataType::kString: {
        const auto& s = std::get<StringColumn>(c)[row];
        auto n = static_cast<std::uint32_t>(s.size());
        out.append(reinterpret_cast<const char*>(&n), sizeof(n));
        out += s;
        break;
    }
    }
}

std::string encode_row(const std::vector<const Column*>& cols, std::size_t row) {
    std::string key;
    for (const auto* c : cols) encode_value(*c, row, key);
    return key;
}

std::vector<const Column*> resolve_columns(const ColumnarTable& t, const std::vector<std::string>& names) {
    std::vector<const Column*> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(&t.column(n));
    return out;
}

// Assigns a dense group id to every row; `reps` holds the first row of each group.
struct Grouping {
    std::vector<std::size_t> group_of_row;
    std::vector<std::size_t> reps;
};

Grouping group_rows(const std::vector<const Column*>& keys, std::size_t rows) {
    Grouping g;
    g.group_of_row.resize(rows);
    // Branch-tagged inputs arrive in long runs of one key; reuse the previous
    // row's group instead of probing the index again.
    auto assign = [&](auto& index, auto key_of) {
        for (std::size_t r = 0; r < rows; ++r) {
            if (r > 0 && key_of(r) == key_of(r - 1)) {
                g.group_of_row[r] = g.group_of_row[r - 1];
                continue;
            }
            auto [it, inserted] = index.try_emplace(key_of(r), g.reps.size());
            if (inserted) g.reps.push_back(r);
            g.group_of_row[r] = it->second;
        }
    };
    if (keys.size() == 1 && type_of(*keys[0]) == DataType::kString) {
        const auto& v = std::get<StringColumn>(*keys[0]);
        std::unordered_map<std::string_view, std::size_t> index;
        assign(index, [&](std::size_t r) { return std::string_view(v[r]); });
    } else if (keys.size() == 1 && type_of(*keys[0]) == DataType::kInt64) {
        const auto& v = std::get<Int64Column>(*keys[0]);
        std::unordered_map<std::int64_t, std::size_t> index;
        assign(index, [&](std::size_t r) { return v[r]; });
    } else {
        std::unordered_map<std::string, std::size_t> index;
        assign(index, [&](std::size_t r) { return encode_row(keys, r); });
    }
    return g;
}

ColumnPtr concat_columns(DataType type, const std::vector<ColumnPtr>& parts) {
    Column out = make_column(type);
    std::visit(
        [&](auto& dst) {
            using V = std::decay_t<decltype(dst)>;
            std::size_t total = 0;
            for (const auto& p : parts) total += column_size(*p);
            dst.reserve(total);
            for (const auto& p : parts) {
                const auto& src = std::get<V>(*p);
                dst.insert(dst.end(), src.begin(), src.end());
            }
        },
        out);
    return std::make_shared<const Column>(std::move(out));
}

std::vector<std::size_t> selected_rows(const Column& mask) {
    const auto& m = std::get<BoolColumn>(mask);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) rows.push_back(i);
    }
    return rows;
}

TablePtr take_rows(const ColumnarTable& t, std::span<const std::size_t> rows) {
    std::vector<ColumnPtr> cols;
    cols.reserve(t.num_columns());
    for (std::size_t i = 0; i < t.num_columns(); ++i) {
        cols.push_back(std::make_shared<const Column>(gather(t.column(i), rows)));
    }
    return std::make_shared<const ColumnarTable>(t.schema(), std::move(cols));
}

// ---------------------------------------------------------------------------
// Join layout, shared by type checking and execution.

struct JoinLayout {
    Schema schema;
    // (from_right, column index) for each output column, in output order.
    std::vector<std::pair<bool, std::size_t>> sources;
    bool branch_from_right = false;
};

JoinLayout join_layout(const Schema& left, const Schema& right, const HashJoinOp& op) {
    if (op.left_keys.empty() || op.left_keys.size() != op.right_keys.size()) {
        raise(ErrorCode::kTypeError, "hash join needs matching, nonempty key lists");
    }
    for (std::size_t i = 0; i < op.left_keys.size(); ++i) {
        auto lt = left[left.require(op.left_keys[i])].type;
        auto rt = right[right.require(op.right_keys[i])].type;
        if (lt != rt) {
            raise(ErrorCode::kTypeError, fmt::format("join key {} ({}) vs {} ({})", op.left_keys[i], type_name(lt),
                                                     op.right_keys[i], type_name(rt)));
        }
    }
    JoinLayout layout;
    std::vector<ColumnDef> defs;
    for (std::size_t i = 0; i < left.size(); ++i) {
        defs.push_back(left[i]);
        layout.sources.emplace_back(false, i);
    }
    for (std::size_t i = 0; i < right.size(); ++i) {
        if (std::ranges::find(op.right_keys, right[i].name) != op.right_keys.end()) continue;
        if (left.contains(right[i].name)) {
            raise(ErrorCode::kTypeError, fmt::format("join output has duplicate column '{}'", right[i].name));
        }
        defs.push_back(right[i]);
        layout.sources.emplace_back(true, i);
    }
    // The branch column always leads.
    auto it = std::ranges::find_if(defs, [](const ColumnDef& d) { return d.name == kBranchColumn; });
    if (it != defs.end() && it != defs.begin()) {
        auto pos = static_cast<std::size_t>(it - defs.begin());
        layout.branch_from_right = layout.sources[pos].first;
        std::rotate(defs.begin(), defs.begin() + static_cast<std::ptrdiff_t>(pos),
                    defs.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
        std::rotate(layout.sources.begin(), layout.sources.begin() + static_cast<std::ptrdiff_t>(pos),
                    layout.sources.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
    }
    layout.schema = Schema(std::move(defs));
    return layout;
}

void require_keys(const Schema& s, const std::vector<std::string>& keys) {
    for (const auto& k : keys) s.require(k);
}

DataType agg_type(const AggSpec& a, const Schema& input) {
    switch (a.kind) {
    case AggKind::kCount: return DataType::kInt64;
    case AggKind::kCountIf:
        if (!a.predicate || result_type(*a.predicate, input) != DataType::kBool) {
            raise(ErrorCode::kTypeError, fmt::format("count_if '{}' needs a boolean predicate", a.output));
        }
        return DataType::kInt64;
    case AggKind::kSum:
    case AggKind::kAvg: {
        auto t = input[input.require(a.column)].type;
        if (t != DataType::kInt64 && t != DataType::kFloat64) {
            raise(ErrorCode::kTypeError, fmt::format("cannot aggregate non-numeric column '{}'", a.column));
        }
        if (a.kind == AggKind::kAvg) return DataType::kFloat64;
        return t;
    }
    }
    return DataType::kInt64;
}

Schema with_branch_column(const Schema& s) {
    if (s.contains(kBranchColumn)) {
        raise(ErrorCode::kSchemaError, fmt::format("column name '{}' is reserved", kBranchColumn));
    }
    std::vector<ColumnDef> defs{{std::string(kBranchColumn), DataType::kString}};
    defs.insert(defs.end(), s.columns().begin(), s.columns().end());
    return Schema(std::move(defs));
}

Schema infer(const PlanNode& plan, TableSource& source) {
    std::vector<Schema> in;
    for (const auto& i : plan.inputs) in.push_back(infer(*i, source));
    auto expect_inputs = [&](std::size_t n) {
        if (in.size() != n) raise(ErrorCode::kTypeError, "operator has the wrong number of inputs");
    };
    Schema out = std::visit(
        [&](const auto& op) -> Schema {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, ScanOp>) {
                expect_inputs(0);
                return source.schema(op.table);
            } else if constexpr (std::is_same_v<T, BranchUnionOp>) {
                expect_inputs(0);
                auto base = source.schema(op.table);
                if (op.filter && result_type(*op.filter, base) != DataType::kBool) {
                    raise(ErrorCode::kTypeError, "pushed filter must be boolean");
                }
                return with_branch_column(base);
            } else if constexpr (std::is_same_v<T, FilterOp>) {
                expect_inputs(1);
                if (result_type(op.predicate, in[0]) != DataType::kBool) {
                    raise(ErrorCode::kTypeError, fmt::format("filter predicate {} is not boolean",
                                                             to_string(op.predicate)));
                }
                return in[0];
            } else if constexpr (std::is_same_v<T, ProjectOp>) {
                expect_inputs(1);
                if (op.exprs.size() != op.names.size()) raise(ErrorCode::kTypeError, "project arity mismatch");
                std::vector<ColumnDef> defs;
                for (std::size_t i = 0; i < op.exprs.size(); ++i) {
                    defs.push_back({op.names[i], result_type(op.exprs[i], in[0])});
                }
                return Schema(std::move(defs));
            } else if constexpr (std::is_same_v<T, HashJoinOp>) {
                expect_inputs(2);
                return join_layout(in[0], in[1], op).schema;
            } else if constexpr (std::is_same_v<T, AggregateOp>) {
                expect_inputs(1);
                std::vector<ColumnDef> defs;
                for (const auto& k : op.group_keys) defs.push_back(in[0][in[0].require(k)]);
                if (!op.branch_domain.empty() &&
                    (op.group_keys.size() != 1 || op.group_keys[0] != kBranchColumn)) {
                    raise(ErrorCode::kTypeError, "branch domain requires the branch column as the only key");
                }
                for (const auto& a : op.aggs) defs.push_back({a.output, agg_type(a, in[0])});
                return Schema(std::move(defs));
            } else if constexpr (std::is_same_v<T, WindowRankOp>) {
                expect_inputs(1);
                require_keys(in[0], op.partition_keys);
                in[0].require(op.order_column);
                in[0].require(op.tie_break);
                auto defs = in[0].columns();
                defs.push_back({op.output, DataType::kInt64});
                return Schema(std::move(defs));
            } else {
                expect_inputs(1);
                require_keys(in[0], op.partition_keys);
                in[0].require(op.order_column);
                in[0].require(op.tie_break);
                if (op.k <= 0) raise(ErrorCode::kTypeError, "top-k needs k > 0");
                return in[0];
            }
        },
        plan.op);
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Operators

TablePtr run_filter(const FilterOp& op, const TablePtr& input) {
    auto mask = evaluate(op.predicate, *input);
    auto rows = selected_rows(*mask);
    if (rows.size() == input->row_count()) return input;
    return take_rows(*input, rows);
}

TablePtr run_project(const ProjectOp& op, const TablePtr& input) {
    std::vector<ColumnDef> defs;
    std::vector<ColumnPtr> cols;
    for (std::size_t i = 0; i < op.exprs.size(); ++i) {
        cols.push_back(evaluate(op.exprs[i], *input));
        defs.push_back({op.names[i], type_of(*cols.back())});
    }
    return std::make_shared<const ColumnarTable>(Schema(std::move(defs)), std::move(cols));
}

TablePtr run_union(const BranchUnionOp& op, TableSource& source) {
    auto variants = source.variants(op.table);
    if (variants.empty()) raise(ErrorCode::kUnknownTable, fmt::format("no variants of table '{}'", op.table));
    Schema schema = with_branch_column(variants.front().second->schema());
    std::vector<std::vector<ColumnPtr>> parts(schema.size());
    std::vector<std::pair<const std::string*, std::size_t>> runs;
    std::size_t total = 0;
    for (const auto& [branch, table] : variants) {
        if (table->schema() != variants.front().second->schema()) {
            raise(ErrorCode::kSchemaError,
                  fmt::format("variant of '{}' on branch '{}' has a different schema", op.table, branch));
        }
        TablePtr t = table;
        if (op.filter) t = run_filter(FilterOp{*op.filter}, table);
        runs.emplace_back(&branch, t->row_count());
        total += t->row_count();
        for (std::size_t c = 0; c < t->num_columns(); ++c) parts[c + 1].push_back(t->column_ptr(c));
    }
    StringColumn tags;
    tags.reserve(total);
    for (const auto& [branch, n] : runs) tags.insert(tags.end(), n, *branch);
    std::vector<ColumnPtr> cols{std::make_shared<const Column>(std::move(tags))};
    for (std::size_t c = 1; c < schema.size(); ++c) cols.push_back(concat_columns(schema[c].type, parts[c]));
    return std::make_shared<const ColumnarTable>(std::move(schema), std::move(cols));
}

TablePtr run_join(const HashJoinOp& op, const TablePtr& left, const TablePtr& right) {
    auto layout = join_layout(left->schema(), right->schema(), op);
    auto lkeys = resolve_columns(*left, op.left_keys);
    auto rkeys = resolve_columns(*right, op.right_keys);

    std::vector<std::size_t> lrows;
    std::vector<std::size_t> rrows;
    auto probe = [&](auto& index, auto lkey) {
        for (std::size_t l = 0; l < left->row_count(); ++l) {
            auto it = index.find(lkey(l));
            if (it == index.end()) continue;
            for (auto r : it->second) {
                lrows.push_back(l);
                rrows.push_back(r);
            }
        }
    };
    if (lkeys.size() == 1 && type_of(*lkeys[0]) == DataType::kInt64) {
        const auto& rv = std::get<Int64Column>(*rkeys[0]);
        const auto& lv = std::get<Int64Column>(*lkeys[0]);
        std::unordered_map<std::int64_t, std::vector<std::size_t>> index;
        for (std::size_t r = 0; r < rv.size(); ++r) index[rv[r]].push_back(r);
        probe(index, [&](std::size_t l) { return lv[l]; });
    } else {
        std::unordered_map<std::string, std::vector<std::size_t>> index;
        for (std::size_t r = 0; r < right->row_count(); ++r) index[encode_row(rkeys, r)].push_back(r);
        probe(index, [&](std::size_t l) { return encode_row(lkeys, l); });
    }

    if (layout.branch_from_right) {
        // Keep the output branch-major, matching per-branch execution order.
        const auto& branch = std::get<StringColumn>(right->column(kBranchColumn));
        std::vector<std::size_t> order(lrows.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return branch[rrows[a]] < branch[rrows[b]]; });
        std::vector<std::size_t> l2, r2;
        for (auto i : order) {
            l2.push_back(lrows[i]);
            r2.push_back(rrows[i]);
        }
        lrows.swap(l2);
        rrows.swap(r2);
    }

    std::vector<ColumnPtr> cols;
    for (const auto& [from_right, idx] : layout.sources) {
        const auto& src = from_right ? right->column(idx) : left->column(idx);
        cols.push_back(std::make_shared<const Column>(gather(src, from_right ? rrows : lrows)));
    }
    return std::make_shared<const ColumnarTable>(layout.schema, std::move(cols));
}

TablePtr run_aggregate(const AggregateOp& op, const TablePtr& input) {
    const std::size_t n = input->row_count();
    auto keys = resolve_columns(*input, op.group_keys);

    Grouping grouping;
    std::vector<Column> key_columns;
    if (keys.empty()) {
        grouping.group_of_row.assign(n, 0);
        grouping.reps.push_back(0);
    } else {
        grouping = group_rows(keys, n);
        for (const auto* k : keys) key_columns.push_back(gather(*k, grouping.reps));
    }
    std::size_t groups = grouping.reps.size();
    if (!op.branch_domain.empty()) {
        auto& names = std::get<StringColumn>(key_columns[0]);
        std::set<std::string> present(names.begin(), names.end());
        for (const auto& b : op.branch_domain) {
            if (present.insert(b).second) {
                names.push_back(b);
                ++groups;
            }
        }
    }

    std::vector<std::size_t> order(groups);
    std::iota(order.begin(), order.end(), 0);
    if (!key_columns.empty()) {
        std::vector<SortKey> sk;
        for (const auto& c : key_columns) sk.push_back({&c, false});
        std::stable_sort(order.begin(), order.end(), RowLess(std::move(sk)));
    }

    std::vector<std::int64_t> sizes(groups, 0);
    for (auto g : grouping.group_of_row) ++sizes[g];

    std::vector<ColumnDef> defs;
    std::vector<ColumnPtr> cols;
    for (std::size_t i = 0; i < key_columns.size(); ++i) {
        defs.push_back({op.group_keys[i], type_of(key_columns[i])});
        cols.push_back(std::make_shared<const Column>(gather(key_columns[i], order)));
    }
    for (const auto& a : op.aggs) {
        Column out;
        switch (a.kind) {
        case AggKind::kCount: {
            Int64Column v;
            for (auto g : order) v.push_back(sizes[g]);
            out = std::move(v);
            break;
        }
        case AggKind::kCountIf: {
            auto mask = evaluate(*a.predicate, *input);
            const auto& m = std::get<BoolColumn>(*mask);
            std::vector<std::int64_t> acc(groups, 0);
            for (std::size_t r = 0; r < n; ++r) acc[grouping.group_of_row[r]] += m[r];
            Int64Column v;
            for (auto g : order) v.push_back(acc[g]);
            out = std::move(v);
            break;
        }
        case AggKind::kSum:
        case AggKind::kAvg: {
            const auto& c = input->column(a.column);
            std::vector<double> facc(groups, 0.0);
            std::vector<std::int64_t> iacc(groups, 0);
            if (type_of(c) == DataType::kInt64) {
                const auto& v = std::get<Int64Column>(c);
                for (std::size_t r = 0; r < n; ++r) iacc[grouping.group_of_row[r]] += v[r];
            } else {
                const auto& v = std::get<Float64Column>(c);
                for (std::size_t r = 0; r < n; ++r) facc[grouping.group_of_row[r]] += v[r];
            }
            const bool ints = type_of(c) == DataType::kInt64;
            if (a.kind == AggKind::kSum) {
                if (ints) {
                    Int64Column v;
                    for (auto g : order) v.push_back(iacc[g]);
                    out = std::move(v);
                } else {
                    Float64Column v;
                    for (auto g : order) v.push_back(facc[g]);
                    out = std::move(v);
                }
            } else {
                Float64Column v;
                for (auto g : order) {
                    if (sizes[g] == 0) {
                        raise(ErrorCode::kEmptyAggregate, fmt::format("avg({}) over zero rows", a.column));
                    }
                    double total = ints ? static_cast<double>(iacc[g]) : facc[g];
                    v.push_back(total / static_cast<double>(sizes[g]));
                }
                out = std::move(v);
            }
            break;
        }
        }
        defs.push_back({a.output, type_of(out)});
        cols.push_back(std::make_shared<const Column>(std::move(out)));
    }
    return std::make_shared<const ColumnarTable>(Schema(std::move(defs)), std::move(cols));
}

std::vector<std::size_t> sorted_rows(const ColumnarTable& t, const std::vector<std::string>& partition,
                                     const std::string& order_column, bool descending, const std::string& tie) {
    std::vector<SortKey> keys;
    for (const auto& p : partition) keys.push_back({&t.column(p), false});
    keys.push_back({&t.column(order_column), descending});
    keys.push_back({&t.column(tie), false});
    std::vector<std::size_t> rows(t.row_count());
    std::iota(rows.begin(), rows.end(), 0);
    std::stable_sort(rows.begin(), rows.end(), RowLess(std::move(keys)));
    return rows;
}

bool same_partition(const std::vector<const Column*>& keys, std::size_t a, std::size_t b) {
    return std::ranges::all_of(keys, [&](const Column* c) { return compare_at(*c, a, b) == 0; });
}

TablePtr run_window_rank(const WindowRankOp& op, const TablePtr& input) {
    auto rows = sorted_rows(*input, op.partition_keys, op.order_column, op.descending, op.tie_break);
    auto keys = resolve_columns(*input, op.partition_keys);
    Int64Column rank(input->row_count());
    std::int64_t next = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 || !same_partition(keys, rows[i - 1], rows[i])) next = 0;
        rank[rows[i]] = ++next;
    }
    auto defs = input->schema().columns();
    defs.push_back({op.output, DataType::kInt64});
    std::vector<ColumnPtr> cols;
    for (std::size_t i = 0; i < input->num_columns(); ++i) cols.push_back(input->column_ptr(i));
    cols.push_back(std::make_shared<const Column>(std::move(rank)));
    return std::make_shared<const ColumnarTable>(Schema(std::move(defs)), std::move(cols));
}

TablePtr run_top_k(const TopKOp& op, const TablePtr& input) {
    auto rows = sorted_rows(*input, op.partition_keys, op.order_column, op.descending, op.tie_break);
    auto keys = resolve_columns(*input, op.partition_keys);
    std::vector<std::size_t> keep;
    std::int64_t taken = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 || !same_partition(keys, rows[i - 1], rows[i])) taken = 0;
        if (taken++ < op.k) keep.push_back(rows[i]);
    }
    return take_rows(*input, keep);
}

class Runner {
public:
    Runner(TableSource& source, SubplanMemo* memo) : source_(source), memo_(memo) {}

    TablePtr run(const PlanNode& plan) {
        std::optional<std::uint64_t> key;
        if (memo_ && !contains_branch_union(plan)) {
            key = structural_hash(plan);
            if (auto hit = memo_->find(*key)) return *hit;
        }
        std::vector<TablePtr> in;
        for (const auto& i : plan.inputs) in.push_back(run(*i));
        TablePtr out = std::visit(
            [&](const auto& op) -> TablePtr {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, ScanOp>) {
                    return source_.scan(op.table);
                } else if constexpr (std::is_same_v<T, BranchUnionOp>) {
                    return run_union(op, source_);
                } else if constexpr (std::is_same_v<T, FilterOp>) {
                    return run_filter(op, in[0]);
                } else if constexpr (std::is_same_v<T, ProjectOp>) {
                    return run_project(op, in[0]);
                } else if constexpr (std::is_same_v<T, HashJoinOp>) {
                    return run_join(op, in[0], in[1]);
                } else if constexpr (std::is_same_v<T, AggregateOp>) {
                    return run_aggregate(op, in[0]);
                } else if constexpr (std::is_same_v<T, WindowRankOp>) {
                    return run_window_rank(op, in[0]);
                } else {
                    return run_top_k(op, in[0]);
                }
            },
            plan.op);
        if (key) memo_->put(*key, out);
        return out;
    }

private:
    TableSource& source_;
    SubplanMemo* memo_;
};

}  // namespace

Schema infer_schema(const PlanNode& plan, TableSource& source) { return infer(plan, source); }

TablePtr execute(const PlanNode& plan, TableSource& source, SubplanMemo* memo) {
    infer(plan, source);
    return Runner(source, memo).run(plan);
}

}  // namespace branchlake::rel
