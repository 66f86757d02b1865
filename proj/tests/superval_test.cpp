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
#include <iterator>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "branchlake/superval.hpp"
#include "test_util.hpp"

namespace branchlake::superval {
namespace {

using testing::code_of;

TEST(Superval, ClassifyBools) {
    EXPECT_EQ(classify_bools({{"a", true}, {"b", true}}), Verdict::kDefinitelyTrue);
    EXPECT_EQ(classify_bools({{"a", false}}), Verdict::kDefinitelyFalse);
    EXPECT_EQ(classify_bools({{"a", true}, {"b", false}, {"c", true}}), Verdict::kGlut);
    EXPECT_EQ(code_of([] { classify_bools({}); }), ErrorCode::kEmptyBranchSet);
    EXPECT_EQ(verdict_name(Verdict::kGlut), "glut");
    EXPECT_EQ(verdict_label(Verdict::kGlut), "mixed");
    EXPECT_EQ(verdict_label(Verdict::kDefinitelyTrue), "true");
}

TEST(Superval, SummarizeNumbers) {
    auto s = summarize_numbers({{"agent_a", 2}, {"agent_b", 1}});
    EXPECT_EQ(s.min, 1);
    EXPECT_EQ(s.max, 2);
    EXPECT_DOUBLE_EQ(s.mean, 1.5);
    EXPECT_FALSE(s.unanimous);
    EXPECT_TRUE(summarize_numbers({{"a", 3}, {"b", 3}}).unanimous);
    EXPECT_EQ(code_of([] { summarize_numbers({}); }), ErrorCode::kEmptyBranchSet);
}

TEST(Superval, DiffLists) {
    auto d = diff_lists({{"a", {3, 1, 2}}, {"b", {2, 4, 3}}});
    EXPECT_EQ(d.consensus, (IdList{2, 3}));
    EXPECT_EQ(d.exclusive.at("a"), IdList{1});
    EXPECT_EQ(d.exclusive.at("b"), IdList{4});
    EXPECT_EQ(d.per_branch.at("a"), (IdList{3, 1, 2}));
    EXPECT_EQ(undecided(d), (IdList{1, 4}));
    EXPECT_EQ(code_of([] { diff_lists({{"a", {1, 1}}}); }), ErrorCode::kDuplicateId);
    EXPECT_EQ(code_of([] { diff_lists({}); }), ErrorCode::kEmptyBranchSet);
    auto single = diff_lists({{"a", {5, 4}}});
    EXPECT_EQ(single.consensus, (IdList{4, 5}));
    EXPECT_TRUE(undecided(single).empty());
}

TEST(SupervalProperty, DiffMatchesSetAlgebra) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        std::map<std::string, IdList> lists;
        std::map<std::string, std::set<std::int64_t>> sets;
        auto branches = 1 + rng() % 3;
        for (std::size_t b = 0; b < branches; ++b) {
            auto name = fmt::format("b{}", b);
            std::set<std::int64_t> s;
            auto n = rng() % 20;
            for (std::size_t i = 0; i < n; ++i) s.insert(static_cast<std::int64_t>(rng() % 50));
            IdList l(s.begin(), s.end());
            std::shuffle(l.begin(), l.end(), rng);
            lists[name] = l;
            sets[name] = s;
        }
        auto d = diff_lists(lists);

        std::set<std::int64_t> all, every = sets.begin()->second;
        for (const auto& [_, s] : sets) {
            all.insert(s.begin(), s.end());
            std::set<std::int64_t> kept;
            std::ranges::set_intersection(every, s, std::inserter(kept, kept.end()));
            every = kept;
        }
        ASSERT_EQ(d.consensus, IdList(every.begin(), every.end()));
        for (const auto& [name, s] : sets) {
            std::set<std::int64_t> ex;
            std::ranges::set_difference(s, every, std::inserter(ex, ex.end()));
            ASSERT_EQ(d.exclusive.at(name), IdList(ex.begin(), ex.end()));
        }
        std::set<std::int64_t> und;
        std::ranges::set_difference(all, every, std::inserter(und, und.end()));
        ASSERT_EQ(undecided(d), IdList(und.begin(), und.end()));
    }
}

TEST(SupervalProperty, ClassifyMatchesCounting) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 500; ++trial) {
        std::map<std::string, bool> m;
        auto n = 1 + rng() % 6;
        int trues = 0;
        for (std::size_t i = 0; i < n; ++i) {
            bool v = rng() % 2;
            m[fmt::format("b{}", i)] = v;
            trues += v;
        }
        auto expected = trues == static_cast<int>(n) ? Verdict::kDefinitelyTrue
                        : trues == 0                 ? Verdict::kDefinitelyFalse
                                                     : Verdict::kGlut;
        ASSERT_EQ(classify_bools(m), expected);
    }
}

}  // namespace
}  // namespace branchlake::superval
