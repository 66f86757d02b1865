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

#include <regex>

#include <gtest/gtest.h>

#include "branchlake/bench.hpp"
#include "branchlake/datagen.hpp"
#include "branchlake/table_io.hpp"
#include "test_util.hpp"

namespace branchlake::bench {
namespace {

using engine::EngineKind;
using testing::code_of;
using testing::TempDir;

TEST(Bench, Median) {
    EXPECT_EQ(median({3, 1, 2}), 2);
    EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
    EXPECT_EQ(median({7}), 7);
}

TEST(Bench, ConfigValidation) {
    auto bad = [](auto mutate) {
        BenchConfig c;
        mutate(c);
        return code_of([&] { validate(c); });
    };
    EXPECT_EQ(bad([](BenchConfig&) {}), std::nullopt);
    EXPECT_EQ(bad([](BenchConfig& c) { c.branch_counts.clear(); }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](BenchConfig& c) { c.branch_counts = {0}; }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](BenchConfig& c) { c.repeats = 0; }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](BenchConfig& c) { c.warmups = -1; }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](BenchConfig& c) { c.questions.clear(); }), ErrorCode::kBadConfig);
}

class BenchRun : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir;
        datagen::GenConfig g;
        g.seed = 3;
        g.n_users = 500;
        g.branches = datagen::branch_names(4);
        datagen::generate(g, *dir_ / "c");
        BenchConfig c;
        c.branch_counts = {1, 2, 4};
        c.repeats = 3;
        c.warmups = 1;
        int calls = 0;
        c.progress = [&](const std::string&) { ++calls; };
        results_ = new BenchResults(run_bench(c, *catalog::CatalogSnapshot::load(*dir_ / "c")));
        progress_calls_ = calls;
    }
    static void TearDownTestSuite() {
        delete results_;
        delete dir_;
    }

    static TempDir* dir_;
    static BenchResults* results_;
    static int progress_calls_;
};

TempDir* BenchRun::dir_ = nullptr;
BenchResults* BenchRun::results_ = nullptr;
int BenchRun::progress_calls_ = 0;

TEST_F(BenchRun, RecordsEveryRepeatAndOneMedianPerTriple) {
    const auto& r = *results_;
    EXPECT_EQ(r.raw.size(), 3u * 2u * 3u * 3u);
    EXPECT_EQ(r.medians.size(), 3u * 2u * 3u);
    EXPECT_EQ(r.speedups.size(), 3u * 3u);
    EXPECT_EQ(progress_calls_, 9);
    for (const auto& m : r.medians) {
        std::vector<double> samples;
        std::set<std::int64_t> repeats;
        for (const auto& raw : r.raw) {
            if (raw.question == m.question && raw.engine == m.engine && raw.branches == m.branches) {
                samples.push_back(raw.latency_ms);
                repeats.insert(raw.repeat);
            }
        }
        EXPECT_EQ(repeats, (std::set<std::int64_t>{1, 2, 3}));
        EXPECT_EQ(m.median_ms, median(samples));
        EXPECT_EQ(&r.median(m.question, m.engine, m.branches), &m);
    }
    for (const auto& s : r.speedups) {
        EXPECT_DOUBLE_EQ(s.speedup, s.adhoc_ms / s.native_ms);
        EXPECT_EQ(s.adhoc_ms, r.median(s.question, EngineKind::kAdHoc, s.branches).median_ms);
    }
    EXPECT_EQ(code_of([&] { r.median("Q2", EngineKind::kNative, 1); }), ErrorCode::kBadParameter);
}

TEST_F(BenchRun, AdHocEvaluatesEveryBranch) {
    for (const auto& m : results_->medians) {
        if (m.engine == EngineKind::kAdHoc || m.question != "Q4") {
            EXPECT_EQ(m.branches_evaluated, static_cast<double>(m.branches)) << m.question;
        } else {
            EXPECT_LE(m.branches_evaluated, static_cast<double>(m.branches));
        }
    }
}

TEST_F(BenchRun, WritesCsvFiles) {
    TempDir out;
    auto files = write_results(*results_, out.path());
    ASSERT_EQ(files.size(), 4u);
    auto raw = io::read_file(out / "raw.csv");
    EXPECT_EQ(raw.substr(0, raw.find('\n')), "question,engine,branches,repeat,latency_ms");
    EXPECT_EQ(std::count(raw.begin(), raw.end(), '\n'), 1 + static_cast<long>(results_->raw.size()));
    auto table = io::read_file(out / "table.csv");
    EXPECT_EQ(table.substr(0, table.find('\n')), "question,engine,B=1,B=2,B=4");
    EXPECT_TRUE(std::filesystem::exists(out / "medians.csv"));
    EXPECT_TRUE(std::filesystem::exists(out / "speedup.csv"));
    auto md = format_table(*results_);
    EXPECT_NE(md.find("| Q3 | native |"), std::string::npos) << md;
}

TEST_F(BenchRun, EmitsOnePlotPerQuestionPlusSpeedup) {
    TempDir out;
    auto plots = emit_plots(*results_, out.path());
    std::vector<std::string> names;
    for (const auto& f : plots.files) names.push_back(f.filename().string());
    EXPECT_EQ(names, (std::vector<std::string>{"latency_Q1.svg", "latency_Q3.svg", "latency_Q4.svg", "speedup.svg"}));
    EXPECT_NE(plots.ascii.find("speedup"), std::string::npos);
}

TEST_F(BenchRun, TooFewBranches) {
    BenchConfig c;
    c.branch_counts = {8};
    EXPECT_EQ(code_of([&] { run_bench(c, *catalog::CatalogSnapshot::load(*dir_ / "c")); }), ErrorCode::kBadConfig);
}

std::vector<std::pair<double, double>> polyline(const std::string& svg, const std::string& series) {
    std::regex re("<polyline data-series=\"" + series + "\"[^>]*points=\"([^\"]*)\"");
    std::smatch m;
    if (!std::regex_search(svg, m, re)) return {};
    std::vector<std::pair<double, double>> out;
    std::istringstream in(m[1].str());
    std::string pt;
    while (in >> pt) {
        auto comma = pt.find(',');
        out.emplace_back(std::stod(pt.substr(0, comma)), std::stod(pt.substr(comma + 1)));
    }
    return out;
}

TEST(BenchPlots, MonotoneSeriesDrawsRisingLine) {
    BenchResults r;
    for (std::int64_t b : {1, 2, 4, 8}) {
        r.medians.push_back({"Q3", EngineKind::kAdHoc, b, 10.0 * static_cast<double>(b), static_cast<double>(b)});
        r.medians.push_back({"Q3", EngineKind::kNative, b, 5.0, static_cast<double>(b)});
        r.speedups.push_back({"Q3", b, 10.0 * static_cast<double>(b), 5.0, 2.0 * static_cast<double>(b)});
    }
    TempDir out;
    emit_plots(r, out.path());
    auto latency = io::read_file(out / "latency_Q3.svg");
    auto pts = polyline(latency, "adhoc");
    ASSERT_EQ(pts.size(), 4u);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        EXPECT_GT(pts[i].first, pts[i - 1].first);
        // SVG y grows downward.
        EXPECT_LT(pts[i].second, pts[i - 1].second);
    }
    auto flat = polyline(latency, "native");
    ASSERT_EQ(flat.size(), 4u);
    for (const auto& p : flat) EXPECT_EQ(p.second, flat[0].second);
    auto speed = polyline(io::read_file(out / "speedup.svg"), "Q3");
    ASSERT_EQ(speed.size(), 4u);
    EXPECT_LT(speed.back().second, speed.front().second);
}

TEST(BenchPlots, LegendSkipsEmptySeries) {
    BenchResults r;
    r.medians.push_back({"Q1", EngineKind::kNative, 2, 1.0, 2});
    TempDir out;
    emit_plots(r, out.path());
    auto svg = io::read_file(out / "latency_Q1.svg");
    EXPECT_TRUE(polyline(svg, "adhoc").empty());
    EXPECT_EQ(polyline(svg, "native").size(), 1u);
    EXPECT_EQ(svg.find(">adhoc</text>"), std::string::npos);
    EXPECT_NE(svg.find("class=\"legend\" x="), std::string::npos);
    EXPECT_EQ(code_of([&] { emit_plots(BenchResults{}, out.path()); }), ErrorCode::kBadParameter);
}

}  // namespace
}  // namespace branchlake::bench
