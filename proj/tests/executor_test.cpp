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

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "branchlake/executor.hpp"
#include "test_util.hpp"

namespace branchlake::rel {
namespace {

using testing::code_of;
using testing::share;

TablePtr predictions(std::vector<std::pair<std::int64_t, bool>> rows) {
    std::vector<std::vector<Value>> r;
    for (auto [id, buy] : rows) r.push_back({id, 1.0 - static_cast<double>(id) / 100.0, buy});
    return share(ColumnarTable::from_rows(
        Schema{{"user_id", DataType::kInt64}, {"score", DataType::kFloat64}, {"will_buy", DataType::kBool}}, r));
}

TablePtr users(std::vector<std::tuple<std::int64_t, std::string, double>> rows) {
    std::vector<std::vector<Value>> r;
    for (auto& [id, seg, ltv] : rows) r.push_back({id, seg, ltv});
    return share(ColumnarTable::from_rows(
        Schema{{"user_id", DataType::kInt64}, {"segment", DataType::kString}, {"ltv", DataType::kFloat64}}, r));
}

TEST(Executor, CountOfFilteredRows) {
    MapTableSource src;
    src.add("predictions", predictions({{1, true}, {2, false}, {3, true}}));
    auto plan = aggregate(filter(scan("predictions"), col("will_buy")), {}, {count("n")});
    auto out = execute(*plan, src);
    EXPECT_EQ(out->row_count(), 1u);
    EXPECT_EQ(std::get<std::int64_t>(out->value(0, 0)), 2);
}

TEST(Executor, HashJoinKeepsMatchingKeys) {
    MapTableSource src;
    src.add("users", users({{1, "top", 1.0}, {2, "low", 2.0}, {3, "mid", 3.0}}));
    src.add("predictions", predictions({{2, true}, {3, false}, {4, true}}));
    auto out = execute(*hash_join(scan("predictions"), scan("users"), {"user_id"}, {"user_id"}), src);
    EXPECT_EQ(as<std::int64_t>(out->column("user_id")), (Int64Column{2, 3}));
    // Right key columns are dropped.
    EXPECT_EQ(out->num_columns(), 5u);
    EXPECT_EQ(as<std::string>(out->column("segment")), (StringColumn{"low", "mid"}));
}

TEST(Executor, WindowRankWithinPartitions) {
    MapTableSource src;
    src.add("users", users({{1, "a", 5.0}, {2, "b", 1.0}, {3, "a", 9.0}, {4, "b", 7.0}}));
    auto out = execute(*window_rank(scan("users"), {"segment"}, "ltv", true, "user_id", "r"), src);
    // Input order is preserved; rank is within segment by ltv descending.
    EXPECT_EQ(as<std::int64_t>(out->column("r")), (Int64Column{2, 2, 1, 1}));
}

TEST(Executor, WindowRankBreaksTiesByUserId) {
    MapTableSource src;
    src.add("users", users({{7, "a", 5.0}, {3, "a", 5.0}, {5, "a", 5.0}}));
    auto out = execute(*window_rank(scan("users"), {"segment"}, "ltv", true, "user_id", "r"), src);
    EXPECT_EQ(as<std::int64_t>(out->column("r")), (Int64Column{3, 1, 2}));
}

TEST(Executor, TopKOrdersByScoreThenId) {
    MapTableSource src;
    src.add("users", users({{4, "a", 1.0}, {2, "a", 3.0}, {9, "a", 3.0}, {1, "a", 0.5}}));
    auto out = execute(*top_k(scan("users"), {}, "ltv", true, "user_id", 3), src);
    EXPECT_EQ(as<std::int64_t>(out->column("user_id")), (Int64Column{2, 9, 4}));
}

TEST(Executor, AggregateSortsByKeysAndComputesAll) {
    MapTableSource src;
    src.add("users", users({{1, "mid", 2.0}, {2, "top", 4.0}, {3, "mid", 6.0}, {4, "low", 1.0}}));
    auto plan = aggregate(scan("users"), {"segment"},
                          {count("n"), sum("ltv", "total"), avg("ltv", "mean"),
                           count_if(gt(col("ltv"), lit(1.5)), "big")});
    auto out = execute(*plan, src);
    EXPECT_EQ(as<std::string>(out->column("segment")), (StringColumn{"low", "mid", "top"}));
    EXPECT_EQ(as<std::int64_t>(out->column("n")), (Int64Column{1, 2, 1}));
    EXPECT_EQ(as<double>(out->column("total")), (Float64Column{1.0, 8.0, 4.0}));
    EXPECT_EQ(as<double>(out->column("mean")), (Float64Column{1.0, 4.0, 4.0}));
    EXPECT_EQ(as<std::int64_t>(out->column("big")), (Int64Column{0, 2, 1}));
}

TEST(Executor, GlobalAggregateOverNoRows) {
    MapTableSource src;
    src.add("users", users({}));
    auto out = execute(*aggregate(scan("users"), {}, {count("n"), sum("ltv", "s")}), src);
    EXPECT_EQ(out->row_count(), 1u);
    EXPECT_EQ(std::get<std::int64_t>(out->value(0, 0)), 0);
    EXPECT_EQ(code_of([&] { execute(*aggregate(scan("users"), {}, {avg("ltv", "m")}), src); }),
              ErrorCode::kEmptyAggregate);
}

TEST(Executor, TypeChecksBeforeRunning) {
    MapTableSource src;
    src.add("users", users({{1, "a", 1.0}}));
    EXPECT_EQ(code_of([&] { execute(*filter(scan("users"), col("ltv")), src); }), ErrorCode::kTypeError);
    EXPECT_EQ(code_of([&] { execute(*aggregate(scan("users"), {}, {sum("segment", "s")}), src); }),
              ErrorCode::kTypeError);
    EXPECT_EQ(code_of([&] { execute(*hash_join(scan("users"), scan("users"), {"user_id"}, {"segment"}), src); }),
              ErrorCode::kTypeError);
    EXPECT_EQ(code_of([&] { execute(*scan("nope"), src); }), ErrorCode::kUnknownTable);
}

TEST(Executor, BranchUnionTagsAndFilters) {
    MapTableSource src;
    src.add_variant("predictions", "b", predictions({{1, true}, {2, true}}));
    src.add_variant("predictions", "a", predictions({{1, false}, {3, true}}));
    auto out = execute(*branch_union("predictions", col("will_buy")), src);
    EXPECT_EQ(out->schema()[0].name, kBranchColumn);
    EXPECT_EQ(as<std::string>(out->column(kBranchColumn)), (StringColumn{"a", "b", "b"}));
    EXPECT_EQ(as<std::int64_t>(out->column("user_id")), (Int64Column{3, 1, 2}));
}

TEST(Executor, BranchDomainFillsEmptyBranches) {
    MapTableSource src;
    src.add_variant("predictions", "a", predictions({{1, false}}));
    src.add_variant("predictions", "b", predictions({{1, true}}));
    auto plan = aggregate(branch_union("predictions", col("will_buy")), {std::string(kBranchColumn)}, {count("n")},
                          {"a", "b"});
    auto out = execute(*plan, src);
    EXPECT_EQ(as<std::string>(out->column(kBranchColumn)), (StringColumn{"a", "b"}));
    EXPECT_EQ(as<std::int64_t>(out->column("n")), (Int64Column{0, 1}));
    auto bad = aggregate(scan("x"), {"user_id"}, {count("n")}, {"a"});
    src.add("x", predictions({{1, true}}));
    EXPECT_EQ(code_of([&] { execute(*bad, src); }), ErrorCode::kTypeError);
}

TEST(Executor, MemoReusesBranchFreeSubplans) {
    MapTableSource src;
    src.add("users", users({{1, "a", 1.0}, {2, "a", 2.0}}));
    auto ranked = window_rank(scan("users"), {"segment"}, "ltv", true, "user_id", "r");
    auto renamed = project(ranked, {col("user_id"), col("r")}, {"uid", "r2"});
    auto plan = hash_join(ranked, renamed, {"user_id"}, {"uid"});
    SubplanMemo memo;
    auto out = execute(*plan, src, &memo);
    EXPECT_EQ(out->row_count(), 2u);
    EXPECT_GE(memo.hits(), 1u);
    EXPECT_EQ(*out, *execute(*plan, src));
}

TEST(Plan, StructuralHashIsStable) {
    auto a = aggregate(filter(scan("p"), col("will_buy")), {}, {count("n")});
    auto b = aggregate(filter(scan("p"), col("will_buy")), {}, {count("n")});
    auto c = aggregate(filter(scan("q"), col("will_buy")), {}, {count("n")});
    EXPECT_EQ(structural_hash(*a), structural_hash(*b));
    EXPECT_NE(structural_hash(*a), structural_hash(*c));
    EXPECT_FALSE(contains_branch_union(*a));
    EXPECT_TRUE(contains_branch_union(*hash_join(a, branch_union("p"), {"n"}, {"user_id"})));
}

// ---------------------------------------------------------------------------
// Properties over random tables.

struct RandomTable {
    TablePtr table;
    std::vector<std::int64_t> key;
    std::vector<std::int64_t> num;
    std::vector<bool> flag;
    std::vector<std::string> tag;
};

RandomTable random_table(std::mt19937_64& rng, std::size_t max_rows, std::int64_t key_range,
                         const std::string& suffix = "") {
    std::uniform_int_distribution<std::size_t> rows_d(0, max_rows);
    std::uniform_int_distribution<std::int64_t> key_d(0, key_range);
    std::uniform_int_distribution<std::int64_t> num_d(-50, 50);
    std::bernoulli_distribution flag_d(0.4);
    const char* tags[] = {"x", "y", "z"};
    RandomTable r;
    std::size_t n = rows_d(rng);
    std::vector<std::vector<Value>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        r.key.push_back(key_d(rng));
        r.num.push_back(num_d(rng));
        r.flag.push_back(flag_d(rng));
        r.tag.emplace_back(tags[rng() % 3]);
        rows.push_back({r.key.back(), r.num.back(), static_cast<bool>(r.flag.back()), r.tag.back()});
    }
    r.table = share(ColumnarTable::from_rows(Schema{{"k" + suffix, DataType::kInt64},
                                                    {"v" + suffix, DataType::kInt64},
                                                    {"f" + suffix, DataType::kBool},
                                                    {"t" + suffix, DataType::kString}},
                                             rows));
    return r;
}

TEST(ExecutorProperty, FilteredCountMatchesRowScan) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        auto r = random_table(rng, 1000, 20);
        MapTableSource src;
        src.add("t", r.table);
        auto threshold = static_cast<std::int64_t>(rng() % 40) - 20;
        auto pred = and_({col("f"), gt(col("v"), lit(threshold))});
        auto out = execute(*aggregate(filter(scan("t"), pred), {}, {count("n")}), src);
        std::int64_t expected = 0;
        for (std::size_t i = 0; i < r.key.size(); ++i) expected += (r.flag[i] && r.num[i] > threshold) ? 1 : 0;
        ASSERT_EQ(std::get<std::int64_t>(out->value(0, 0)), expected) << "trial " << trial;
    }
}

TEST(ExecutorProperty, GroupedAggregatesMatchRowScan) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        auto r = random_table(rng, 1000, 8);
        MapTableSource src;
        src.add("t", r.table);
        auto out = execute(*aggregate(scan("t"), {"t", "k"}, {count("n"), sum("v", "s"), count_if(col("f"), "c")}), src);
        std::map<std::pair<std::string, std::int64_t>, std::tuple<std::int64_t, std::int64_t, std::int64_t>> oracle;
        for (std::size_t i = 0; i < r.key.size(); ++i) {
            auto& [n, s, c] = oracle[{r.tag[i], r.key[i]}];
            ++n;
            s += r.num[i];
            c += r.flag[i] ? 1 : 0;
        }
        ASSERT_EQ(out->row_count(), oracle.size());
        std::size_t row = 0;
        for (const auto& [key, agg] : oracle) {
            ASSERT_EQ(std::get<std::string>(out->value(row, 0)), key.first);
            ASSERT_EQ(std::get<std::int64_t>(out->value(row, 1)), key.second);
            ASSERT_EQ(std::get<std::int64_t>(out->value(row, 2)), std::get<0>(agg));
            ASSERT_EQ(std::get<std::int64_t>(out->value(row, 3)), std::get<1>(agg));
            ASSERT_EQ(std::get<std::int64_t>(out->value(row, 4)), std::get<2>(agg));
            ++row;
        }
    }
}

TEST(ExecutorProperty, HashJoinMatchesNestedLoop) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        auto l = random_table(rng, 200, 30);
        auto r = random_table(rng, 200, 30, "2");
        MapTableSource src;
        src.add("l", l.table);
        src.add("r", r.table);
        bool two_keys = trial % 2 == 1;
        auto plan = two_keys ? hash_join(scan("l"), scan("r"), {"k", "t"}, {"k2", "t2"})
                             : hash_join(scan("l"), scan("r"), {"k"}, {"k2"});
        auto out = execute(*plan, src);
        std::multiset<std::vector<Value>> expected;
        for (std::size_t i = 0; i < l.key.size(); ++i) {
            for (std::size_t j = 0; j < r.key.size(); ++j) {
                if (l.key[i] != r.key[j] || (two_keys && l.tag[i] != r.tag[j])) continue;
                std::vector<Value> row = l.table->row(i);
                row.push_back(r.num[j]);
                row.push_back(static_cast<bool>(r.flag[j]));
                if (!two_keys) row.push_back(r.tag[j]);
                expected.insert(row);
            }
        }
        std::multiset<std::vector<Value>> actual;
        for (std::size_t i = 0; i < out->row_count(); ++i) actual.insert(out->row(i));
        ASSERT_EQ(actual, expected) << "trial " << trial;
    }
}

TEST(ExecutorProperty, WindowRankIsAPermutationPerPartition) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        auto r = random_table(rng, 300, 1000);
        MapTableSource src;
        src.add("t", r.table);
        auto out = execute(*window_rank(scan("t"), {"t"}, "v", true, "k", "rank"), src);
        const auto& rank = as<std::int64_t>(out->column("rank"));
        // Brute force: sort each partition by (v desc, k asc).
        std::map<std::string, std::vector<std::size_t>> parts;
        for (std::size_t i = 0; i < r.key.size(); ++i) parts[r.tag[i]].push_back(i);
        for (auto& [_, rows] : parts) {
            std::ranges::stable_sort(rows, [&](std::size_t a, std::size_t b) {
                if (r.num[a] != r.num[b]) return r.num[a] > r.num[b];
                return r.key[a] < r.key[b];
            });
            std::set<std::int64_t> seen;
            for (std::size_t p = 0; p < rows.size(); ++p) {
                seen.insert(rank[rows[p]]);
                // Equal (v, k) pairs may legitimately swap places.
                if (p > 0 && r.num[rows[p]] == r.num[rows[p - 1]] && r.key[rows[p]] == r.key[rows[p - 1]]) continue;
                ASSERT_EQ(rank[rows[p]], static_cast<std::int64_t>(p + 1));
            }
            ASSERT_EQ(seen.size(), rows.size());
        }
    }
}

TEST(ExecutorProperty, TopKMatchesSortedPrefix) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 40; ++trial) {
        auto r = random_table(rng, 300, 100000);
        MapTableSource src;
        src.add("t", r.table);
        std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 20);
        auto out = execute(*top_k(scan("t"), {}, "v", true, "k", k), src);
        std::vector<std::size_t> idx(r.key.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::ranges::stable_sort(idx, [&](std::size_t a, std::size_t b) {
            if (r.num[a] != r.num[b]) return r.num[a] > r.num[b];
            return r.key[a] < r.key[b];
        });
        auto n = std::min<std::size_t>(static_cast<std::size_t>(k), idx.size());
        ASSERT_EQ(out->row_count(), n);
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_EQ(std::get<std::int64_t>(out->value(i, 0)), r.key[idx[i]]);
            ASSERT_EQ(std::get<std::int64_t>(out->value(i, 1)), r.num[idx[i]]);
        }
    }
}

TEST(ExecutorProperty, DeterministicAcrossRuns) {
    std::mt19937_64 rng(16);
    auto r = random_table(rng, 1000, 50);
    MapTableSource src;
    src.add("t", r.table);
    auto plan = top_k(window_rank(filter(scan("t"), col("f")), {"t"}, "v", false, "k", "rk"), {"t"}, "rk", false, "k", 3);
    auto first = execute(*plan, src);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(*execute(*plan, src), *first);
}

}  // namespace
}  // namespace branchlake::rel
