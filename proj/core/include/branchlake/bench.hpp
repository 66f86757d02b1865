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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "branchlake/catalog.hpp"
#include "branchlake/engine.hpp"
#include "branchlake/question.hpp"

namespace branchlake::bench {

struct BenchConfig {
    std::vector<std::int64_t> branch_counts = {1, 2, 4, 8, 16, 32, 50};
    std::int64_t repeats = 5;
    std::int64_t warmups = 1;
    std::vector<question::QuerySpec> questions = {{question::Q1{}}, {question::Q3{}}, {question::Q4{}}};
    std::vector<engine::EngineKind> engines = {engine::EngineKind::kAdHoc, engine::EngineKind::kNative};
    /// Called with a short line before each (question, B) cell.
    std::function<void(const std::string&)> progress;
};

/// Raises BadConfig.
void validate(const BenchConfig& config);

struct RawRow {
    std::string question;
    engine::EngineKind engine;
    std::int64_t branches;
    std::int64_t repeat;  // 1-based
    double latency_ms;
};

struct MedianRow {
    std::string question;
    engine::EngineKind engine;
    std::int64_t branches;
    double median_ms;
    /// Mean branches_evaluated over the timed repeats.
    double branches_evaluated;
};

struct SpeedupRow {
    std::string question;
    std::int64_t branches;
    double adhoc_ms;
    double native_ms;
    double speedup;  // adhoc / native
};

struct BenchResults {
    std::vector<RawRow> raw;
    std::vector<MedianRow> medians;
    std::vector<SpeedupRow> speedups;

    /// Raises BadParameter when the triple was not measured.
    const MedianRow& median(const std::string& question, engine::EngineKind engine, std::int64_t branches) const;
};

/// Median of the values; the mean of the middle two for even sizes.
double median(std::vector<double> values);

/// For every question and B: selects the first B default branches, checks
/// that both engines agree (raising EngineMismatch otherwise), then times
/// each engine with warmups followed by repeats. Raises BadConfig when the
/// catalog has fewer than max(branch_counts) eligible branches.
BenchResults run_bench(const BenchConfig& config, const catalog::CatalogSnapshot& snapshot);

/// raw.csv, medians.csv, table.csv (one row per question and engine, one
/// column per B), speedup.csv. Returns the written paths.
std::vector<std::filesystem::path> write_results(const BenchResults& results, const std::filesystem::path& dir);

/// Markdown rendering of the medians, shaped like table.csv.
std::string format_table(const BenchResults& results);

struct Plots {
    std::vector<std::filesystem::path> files;
    std::string ascii;
};

/// One latency-vs-B SVG per question plus one speedup-vs-B SVG, and a text
/// rendering of the same series. Raises BadParameter on empty results.
Plots emit_plots(const BenchResults& results, const std::filesystem::path& dir);

}  // namespace branchlake::bench
