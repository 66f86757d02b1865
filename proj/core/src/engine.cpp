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

#include "branchlake/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "branchlake/error.hpp"
#include "branchlake/executor.hpp"

namespace branchlake::engine {

using question::QuerySpec;
using rel::PlanNode;
using rel::PlanPtr;
using rel::TablePtr;

std::string_view engine_name(EngineKind kind) { return kind == EngineKind::kAdHoc ? "adhoc" : "native"; }

EngineKind parse_engine(std::string_view name) {
    if (name == "adhoc") return EngineKind::kAdHoc;
    if (name == "native") return EngineKind::kNative;
    raise(ErrorCode::kBadParameter, fmt::format("engine must be 'adhoc' or 'native', got '{}'", name));
}

std::size_t thread_limit() {
    if (const char* env = std::getenv("BRANCHLAKE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> default_branches(const catalog::CatalogManifest& manifest, const QuerySpec& spec) {
    auto needed = question::tables_for(spec);
    std::vector<std::string> out;
    for (const auto& [name, info] : manifest.branches) {
        if (std::ranges::all_of(needed, [&](const auto& t) { return info.tables.contains(t); })) out.push_back(name);
    }
    if (out.empty()) {
        raise(ErrorCode::kEmptyBranchSet, fmt::format("no branch holds every table {} needs", spec.id()));
    }
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Sorted, deduplicated, and checked against the manifest.
std::vector<std::string> checked_branches(const catalog::CatalogManifest& manifest, const QuerySpec& spec,
                                          std::span<const std::string> branches) {
    if (branches.empty()) raise(ErrorCode::kEmptyBranchSet, "no branches selected");
    std::vector<std::string> out(branches.begin(), branches.end());
    std::ranges::sort(out);
    auto [first, last] = std::ranges::unique(out);
    out.erase(first, last);
    auto needed = question::tables_for(spec);
    for (const auto& b : out) {
        const auto& info = manifest.branch(b);
        for (const auto& t : needed) {
            if (!info.tables.contains(t)) {
                raise(ErrorCode::kUnknownTable, fmt::format("branch '{}' has no table '{}'", b, t));
            }
        }
    }
    return out;
}

/// Serves one branch's tables (ad hoc) or every selected branch's (native),
/// counting each leaf read.
class SnapshotSource : public rel::TableSource {
public:
    SnapshotSource(const catalog::CatalogSnapshot& snapshot, std::vector<std::string> branches)
        : snapshot_(snapshot), branches_(std::move(branches)) {}

    rel::Schema schema(const std::string& table) override { return snapshot_.table(ref(branches_.front(), table))->schema(); }

    TablePtr scan(const std::string& table) override { return read(branches_.front(), table); }

    std::vector<std::pair<std::string, TablePtr>> variants(const std::string& table) override {
        std::vector<std::pair<std::string, TablePtr>> out;
        out.reserve(branches_.size());
        for (const auto& b : branches_) out.emplace_back(b, read(b, table));
        return out;
    }

    void add_to(ExecutionReport& report) const {
        for (const auto& [t, n] : scans_) report.table_scans[t] += n;
        report.bytes_scanned += bytes_;
    }

private:
    const catalog::TableRef& ref(const std::string& branch, const std::string& table) const {
        const auto& tables = snapshot_.manifest().branch(branch).tables;
        auto it = tables.find(table);
        if (it == tables.end()) raise(ErrorCode::kUnknownTable, fmt::format("branch '{}' has no table '{}'", branch, table));
        return it->second;
    }

    TablePtr read(const std::string& branch, const std::string& table) {
        const auto& r = ref(branch, table);
        ++scans_[table];
        bytes_ += static_cast<std::int64_t>(snapshot_.table_bytes(r));
        return snapshot_.table(r);
    }

    const catalog::CatalogSnapshot& snapshot_;
    std::vector<std::string> branches_;
    std::map<std::string, std::int64_t> scans_;
    std::int64_t bytes_ = 0;
};

rel::Column constant_column(const std::string& value, std::size_t n) { return rel::StringColumn(n, value); }

/// The table with the branch column prepended.
TablePtr tag(const rel::ColumnarTable& t, const std::string& branch) {
    std::vector<rel::ColumnDef> defs{{std::string(rel::kBranchColumn), rel::DataType::kString}};
    std::vector<rel::ColumnPtr> cols{std::make_shared<const rel::Column>(constant_column(branch, t.row_count()))};
    for (std::size_t i = 0; i < t.num_columns(); ++i) {
        defs.push_back(t.schema()[i]);
        cols.push_back(t.column_ptr(i));
    }
    return std::make_shared<const rel::ColumnarTable>(rel::Schema(std::move(defs)), std::move(cols));
}

TablePtr concat(const std::vector<TablePtr>& parts) {
    const auto& schema = parts.front()->schema();
    std::vector<rel::Column> cols;
    for (std::size_t c = 0; c < schema.size(); ++c) {
        auto out = rel::make_column(schema[c].type);
        std::visit(
            [&](auto& dst) {
                using V = std::decay_t<decltype(dst)>;
                std::size_t n = 0;
                for (const auto& p : parts) n += p->row_count();
                dst.reserve(n);
                for (const auto& p : parts) {
                    const auto& src = std::get<V>(p->column(c));
                    dst.insert(dst.end(), src.begin(), src.end());
                }
            },
            out);
        cols.push_back(std::move(out));
    }
    return std::make_shared<const rel::ColumnarTable>(schema, std::move(cols));
}

std::vector<std::string> with_branch(std::vector<std::string> keys) {
    keys.insert(keys.begin(), std::string(rel::kBranchColumn));
    return keys;
}

struct Rewritten {
    PlanPtr plan;
    bool branched = false;
};

class Rewriter {
public:
    Rewriter(const std::vector<std::string>& divergent, const std::vector<std::string>& branches)
        : divergent_(divergent), branches_(branches) {}

    Rewritten rewrite(const PlanNode& node) const {
        return std::visit([&](const auto& op) { return apply(op, node); }, node.op);
    }

private:
    bool divergent(const std::string& table) const { return std::ranges::find(divergent_, table) != divergent_.end(); }

    Rewritten apply(const rel::ScanOp& op, const PlanNode&) const {
        if (divergent(op.table)) return {rel::branch_union(op.table), true};
        return {rel::scan(op.table), false};
    }

    Rewritten apply(const rel::FilterOp& op, const PlanNode& node) const {
        // A filter right on a divergent scan is evaluated per variant inside the union.
        if (const auto* s = std::get_if<rel::ScanOp>(&node.inputs[0]->op); s && divergent(s->table)) {
            return {rel::branch_union(s->table, op.predicate), true};
        }
        auto in = rewrite(*node.inputs[0]);
        return {rel::filter(in.plan, op.predicate), in.branched};
    }

    Rewritten apply(const rel::ProjectOp& op, const PlanNode& node) const {
        auto in = rewrite(*node.inputs[0]);
        if (!in.branched) return {rel::project(in.plan, op.exprs, op.names), false};
        auto exprs = op.exprs;
        exprs.insert(exprs.begin(), rel::col(std::string(rel::kBranchColumn)));
        return {rel::project(in.plan, std::move(exprs), with_branch(op.names)), true};
    }

    Rewritten apply(const rel::HashJoinOp& op, const PlanNode& node) const {
        auto l = rewrite(*node.inputs[0]);
        auto r = rewrite(*node.inputs[1]);
        if (l.branched && r.branched) {
            return {rel::hash_join(l.plan, r.plan, with_branch(op.left_keys), with_branch(op.right_keys)), true};
        }
        return {rel::hash_join(l.plan, r.plan, op.left_keys, op.right_keys), l.branched || r.branched};
    }

    Rewritten apply(const rel::AggregateOp& op, const PlanNode& node) const {
        auto in = rewrite(*node.inputs[0]);
        if (!in.branched) return {rel::aggregate(in.plan, op.group_keys, op.aggs, op.branch_domain), false};
        // A global aggregate yields a row even for a branch with no input rows.
        std::vector<std::string> domain = op.group_keys.empty() ? branches_ : std::vector<std::string>{};
        return {rel::aggregate(in.plan, with_branch(op.group_keys), op.aggs, std::move(domain)), true};
    }

    Rewritten apply(const rel::WindowRankOp& op, const PlanNode& node) const {
        auto in = rewrite(*node.inputs[0]);
        auto keys = in.branched ? with_branch(op.partition_keys) : op.partition_keys;
        return {rel::window_rank(in.plan, std::move(keys), op.order_column, op.descending, op.tie_break, op.output),
                in.branched};
    }

    Rewritten apply(const rel::TopKOp& op, const PlanNode& node) const {
        auto in = rewrite(*node.inputs[0]);
        auto keys = in.branched ? with_branch(op.partition_keys) : op.partition_keys;
        return {rel::top_k(in.plan, std::move(keys), op.order_column, op.descending, op.tie_break, op.k), in.branched};
    }

    Rewritten apply(const rel::BranchUnionOp& op, const PlanNode&) const {
        return {rel::branch_union(op.table, op.filter), true};
    }

    const std::vector<std::string>& divergent_;
    const std::vector<std::string>& branches_;
};

/// Tables whose variants differ across the branches.
std::vector<std::string> divergent_tables(const catalog::CatalogManifest& manifest, const QuerySpec& spec,
                                          const std::vector<std::string>& branches) {
    std::vector<std::string> out;
    for (const auto& t : question::tables_for(spec)) {
        if (!catalog::resolve_variants(manifest, t, branches).shared) out.push_back(t);
    }
    return out;
}

TablePtr evaluate_branch(const PlanNode& plan, SnapshotSource& source, const std::string& branch) {
    try {
        return rel::execute(plan, source);
    } catch (const Error& e) {
        raise(e.code(), fmt::format("branch '{}': {}", branch, e.what()));
    }
}

bool boolean_answer(const rel::ColumnarTable& t) {
    return rel::as<std::uint8_t>(t.column(question::kBooleanColumn)).at(0) != 0;
}

}  // namespace

PlanPtr native_plan(const PlanNode& plan, const std::vector<std::string>& divergent_tables,
                    const std::vector<std::string>& branches) {
    return Rewriter(divergent_tables, branches).rewrite(plan).plan;
}

TaggedRun run_adhoc(const QuerySpec& spec, const catalog::CatalogSnapshot& snapshot,
                    std::span<const std::string> branches) {
    auto start = Clock::now();
    auto selected = checked_branches(snapshot.manifest(), spec, branches);
    auto plan = question::plan_for(spec);
    TaggedRun run;
    run.report.engine = EngineKind::kAdHoc;
    run.report.branches_total = static_cast<std::int64_t>(selected.size());
    std::vector<TablePtr> parts;
    for (const auto& b : selected) {
        SnapshotSource source(snapshot, {b});
        parts.push_back(tag(*evaluate_branch(*plan, source, b), b));
        source.add_to(run.report);
    }
    run.table = concat(parts);
    run.report.branches_evaluated = run.report.branches_total;
    run.report.wall_time_ms = elapsed_ms(start);
    return run;
}

TaggedRun run_native(const QuerySpec& spec, const catalog::CatalogSnapshot& snapshot,
                     std::span<const std::string> branches) {
    auto start = Clock::now();
    const auto& manifest = snapshot.manifest();
    auto selected = checked_branches(manifest, spec, branches);
    auto divergent = divergent_tables(manifest, spec, selected);
    auto plan = native_plan(*question::plan_for(spec), divergent, selected);

    SnapshotSource source(snapshot, selected);
    rel::SubplanMemo memo;
    auto result = rel::execute(*plan, source, &memo);

    TaggedRun run;
    if (result->schema().size() > 0 && result->schema()[0].name == rel::kBranchColumn) {
        run.table = std::move(result);
    } else {
        // Every input was shared: the answer is the same in every branch.
        std::vector<TablePtr> parts;
        for (const auto& b : selected) parts.push_back(tag(*result, b));
        run.table = concat(parts);
    }
    run.report.engine = EngineKind::kNative;
    run.report.branches_total = static_cast<std::int64_t>(selected.size());
    run.report.branches_evaluated = run.report.branches_total;
    source.add_to(run.report);
    for (const auto& t : question::tables_for(spec)) {
        if (std::ranges::find(divergent, t) == divergent.end() && run.report.table_scans[t] == 1) {
            run.report.shared_tables_scanned_once.push_back(t);
        }
    }
    run.report.wall_time_ms = elapsed_ms(start);
    return run;
}

ShortCircuitRun run_boolean_shortcircuit(const QuerySpec& spec, const catalog::CatalogSnapshot& snapshot,
                                         std::span<const std::string> branches) {
    auto start = Clock::now();
    if (spec.result_kind() != question::ResultKind::kBoolean) {
        raise(ErrorCode::kNotBooleanQuestion, fmt::format("{} does not have a boolean result", spec.id()));
    }
    auto selected = checked_branches(snapshot.manifest(), spec, branches);
    auto plan = question::plan_for(spec);

    ShortCircuitRun run;
    run.report.engine = EngineKind::kNative;
    run.report.branches_total = static_cast<std::int64_t>(selected.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> saw_true{false};
    std::atomic<bool> saw_false{false};
    std::atomic<bool> stop{false};
    std::mutex mu;
    std::exception_ptr failure;

    auto worker = [&] {
        while (!stop.load()) {
            auto i = next.fetch_add(1);
            if (i >= selected.size()) return;
            const auto& b = selected[i];
            SnapshotSource source(snapshot, {b});
            try {
                bool answer = boolean_answer(*evaluate_branch(*plan, source, b));
                std::lock_guard lock(mu);
                source.add_to(run.report);
                // Late finishers after the verdict is settled are dropped.
                if (stop.load()) return;
                run.per_branch.emplace(b, answer);
                (answer ? saw_true : saw_false).store(true);
                if (saw_true.load() && saw_false.load()) stop.store(true);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                stop.store(true);
                return;
            }
        }
    };

    auto workers = std::min(thread_limit(), selected.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    run.verdict = superval::classify_bools(run.per_branch);
    run.report.branches_evaluated = static_cast<std::int64_t>(run.per_branch.size());
    run.report.wall_time_ms = elapsed_ms(start);
    return run;
}

Overlay build_overlay(const QuerySpec& spec, const rel::ColumnarTable& tagged, const std::vector<std::string>& branches) {
    const auto& branch_col = rel::as<std::string>(tagged.column(rel::kBranchColumn));
    switch (spec.result_kind()) {
    case question::ResultKind::kNumber: {
        const auto& values = rel::as<std::int64_t>(tagged.column(question::kNumberColumn));
        std::map<std::string, double> per_branch;
        for (std::size_t i = 0; i < tagged.row_count(); ++i) per_branch[branch_col[i]] = static_cast<double>(values[i]);
        return superval::summarize_numbers(per_branch);
    }
    case question::ResultKind::kBoolean: {
        const auto& values = rel::as<std::uint8_t>(tagged.column(question::kBooleanColumn));
        BooleanOverlay o;
        for (std::size_t i = 0; i < tagged.row_count(); ++i) o.per_branch[branch_col[i]] = values[i] != 0;
        o.verdict = superval::classify_bools(o.per_branch);
        return o;
    }
    case question::ResultKind::kList: {
        const auto& ids = rel::as<std::int64_t>(tagged.column(question::kListColumn));
        std::map<std::string, superval::IdList> per_branch;
        for (const auto& b : branches) per_branch[b];
        for (std::size_t i = 0; i < tagged.row_count(); ++i) per_branch[branch_col[i]].push_back(ids[i]);
        ListOverlay o{superval::diff_lists(per_branch), std::nullopt};
        if (std::holds_alternative<question::Q7>(spec.question)) o.undecided = superval::undecided(o.diff);
        return o;
    }
    }
    raise(ErrorCode::kUnsupportedQuestion, spec.id());
}

MultiBranchResult run(const QuerySpec& spec, const catalog::CatalogSnapshot& snapshot,
                      std::span<const std::string> branches, EngineKind engine, const RunOptions& options) {
    std::vector<std::string> selected = branches.empty() ? default_branches(snapshot.manifest(), spec)
                                                         : checked_branches(snapshot.manifest(), spec, branches);
    MultiBranchResult result;
    result.spec = spec;
    result.result_kind = spec.result_kind();
    result.branches = selected;
    if (engine == EngineKind::kNative && options.short_circuit &&
        result.result_kind == question::ResultKind::kBoolean) {
        auto sc = run_boolean_shortcircuit(spec, snapshot, selected);
        bool partial = sc.report.branches_evaluated < sc.report.branches_total;
        result.overlay = BooleanOverlay{sc.verdict, std::move(sc.per_branch), partial};
        result.report = std::move(sc.report);
        return result;
    }
    auto tagged = engine == EngineKind::kAdHoc ? run_adhoc(spec, snapshot, selected) : run_native(spec, snapshot, selected);
    result.overlay = build_overlay(spec, *tagged.table, selected);
    result.table = std::move(tagged.table);
    result.report = std::move(tagged.report);
    return result;
}

}  // namespace branchlake::engine
