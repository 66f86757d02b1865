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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "branchlake/catalog.hpp"
#include "branchlake/question.hpp"
#include "branchlake/superval.hpp"

namespace branchlake::engine {

enum class EngineKind { kAdHoc, kNative };

/// "adhoc" / "native".
std::string_view engine_name(EngineKind kind);
/// Raises BadParameter.
EngineKind parse_engine(std::string_view name);

struct ExecutionReport {
    EngineKind engine = EngineKind::kAdHoc;
    std::int64_t branches_total = 0;
    std::int64_t branches_evaluated = 0;
    /// Shared tables the query read exactly once. Always empty for ad hoc.
    std::vector<std::string> shared_tables_scanned_once;
    double wall_time_ms = 0;
    /// Leaf reads per table: a Scan counts one, a BranchUnion one per variant.
    std::map<std::string, std::int64_t> table_scans;
    /// In-memory payload of every table read, summed over reads.
    std::int64_t bytes_scanned = 0;
};

/// A result table with the branch column first, rows ordered by branch name
/// and then by plan order.
struct TaggedRun {
    rel::TablePtr table;
    ExecutionReport report;
};

/// Evaluates the question once per branch and concatenates the outputs.
/// Raises EmptyBranchSet, UnknownBranch, UnknownTable, or the execution
/// error with the failing branch named.
TaggedRun run_adhoc(const question::QuerySpec& spec, const catalog::CatalogSnapshot& snapshot,
                    std::span<const std::string> branches);

/// Plans once over branch-union relations, scanning shared tables once.
/// The output equals run_adhoc's.
TaggedRun run_native(const question::QuerySpec& spec, const catalog::CatalogSnapshot& snapshot,
                     std::span<const std::string> branches);

/// The rewrite run_native applies: divergent scans become branch unions and
/// every operator above one is keyed by the branch column. Exposed for tests
/// and `describe`.
rel::PlanPtr native_plan(const rel::PlanNode& plan, const std::vector<std::string>& divergent_tables,
                         const std::vector<std::string>& branches);

struct ShortCircuitRun {
    superval::Verdict verdict = superval::Verdict::kGlut;
    /// Only the branches whose evaluation counted toward the verdict.
    std::map<std::string, bool> per_branch;
    ExecutionReport report;
};

/// Evaluates a boolean question branch by branch (in parallel when allowed)
/// and stops once a true and a false outcome have both been seen.
/// Raises EmptyBranchSet or NotBooleanQuestion.
ShortCircuitRun run_boolean_shortcircuit(const question::QuerySpec& spec, const catalog::CatalogSnapshot& snapshot,
                                         std::span<const std::string> branches);

/// Worker cap: BRANCHLAKE_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
std::size_t thread_limit();

/// Branches holding every table the question reads, ascending. Raises
/// EmptyBranchSet when none do.
std::vector<std::string> default_branches(const catalog::CatalogManifest& manifest, const question::QuerySpec& spec);

struct BooleanOverlay {
    superval::Verdict verdict = superval::Verdict::kGlut;
    std::map<std::string, bool> per_branch;
    /// True when short-circuiting left some branches unevaluated.
    bool partial = false;
};

struct ListOverlay {
    superval::ListDiff diff;
    /// Q7 only: ids bought in some branch but not all.
    std::optional<superval::IdList> undecided;
};

using Overlay = std::variant<superval::NumberSummary, BooleanOverlay, ListOverlay>;

struct MultiBranchResult {
    question::QuerySpec spec;
    question::ResultKind result_kind = question::ResultKind::kNumber;
    std::vector<std::string> branches;
    /// Null when the boolean short-circuit path answered.
    rel::TablePtr table;
    Overlay overlay;
    ExecutionReport report;
};

struct RunOptions {
    /// Native boolean questions stop at the first disagreement. Turn off to
    /// get every branch's answer.
    bool short_circuit = true;
};

/// Runs the chosen engine over the branches (default_branches when empty)
/// and builds the overlay for the question's result kind.
MultiBranchResult run(const question::QuerySpec& spec, const catalog::CatalogSnapshot& snapshot,
                      std::span<const std::string> branches, EngineKind engine, const RunOptions& options = {});

/// Overlay from a tagged result table.
Overlay build_overlay(const question::QuerySpec& spec, const rel::ColumnarTable& tagged,
                      const std::vector<std::string>& branches);

}  // namespace branchlake::engine
