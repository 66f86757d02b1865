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

#include <random>

#include <gtest/gtest.h>

#include "branchlake/question.hpp"
#include "test_util.hpp"

namespace branchlake::question {
namespace {

using testing::code_of;

TEST(Question, CanonicalStringsCompile) {
    EXPECT_EQ(compile("How many customers are expected to buy tomorrow?"), QuerySpec{Q1{}});
    EXPECT_EQ(compile("How many smartphone shoppers will convert tomorrow?"), QuerySpec{Q2{"smartphones"}});
    EXPECT_EQ(compile("How many customers in the top segments are expected to buy tomorrow?"), QuerySpec{Q3{}});
    EXPECT_EQ(compile("Is tomorrow's conversion rate above 2%?"), QuerySpec{Q4{0.02}});
    EXPECT_EQ(compile("Is customer 42 expected to buy tomorrow?"), QuerySpec{Q5{42}});
    EXPECT_EQ(compile("Which customers are expected to buy tomorrow?"), QuerySpec{Q6{}});
    EXPECT_EQ(compile("Which customers are undecided and might be influenced by messaging?"), QuerySpec{Q7{}});
}

TEST(Question, MatchingIsForgiving) {
    EXPECT_EQ(compile("  how MANY customers   are expected to buy tomorrow  "), QuerySpec{Q1{}});
    EXPECT_EQ(compile("Is tomorrow’s conversion rate above 2.5%."), QuerySpec{Q4{0.025}});
    EXPECT_EQ(compile("How many shoppers interested in audio will convert tomorrow?"), QuerySpec{Q2{"audio"}});
    EXPECT_EQ(compile("Which top 3 customers are expected to buy tomorrow?"), QuerySpec{Q6{3}});
    EXPECT_EQ(compile("How many customers in the top 5 by lifetime value of segments top, mid are expected to buy "
                      "tomorrow?"),
              (QuerySpec{Q3{{"top", "mid"}, 5}}));
}

TEST(Question, RejectsUnknownAndBadParameters) {
    EXPECT_EQ(code_of([] { compile("Tell me a joke"); }), ErrorCode::kUnrecognizedQuestion);
    EXPECT_EQ(code_of([] { compile(""); }), ErrorCode::kUnrecognizedQuestion);
    // The demo phrasing of Q5 has a placeholder where the id goes.
    EXPECT_EQ(code_of([] { compile(templates()[4].canonical); }), ErrorCode::kBadParameter);
    EXPECT_EQ(code_of([] { compile("Is tomorrow's conversion rate above 150%?"); }), ErrorCode::kBadParameter);
    EXPECT_EQ(code_of([] { compile("Is tomorrow's conversion rate above two%?"); }), ErrorCode::kBadParameter);
    EXPECT_EQ(code_of([] { compile("Which top 0 customers are expected to buy tomorrow?"); }),
              ErrorCode::kBadParameter);
    try {
        compile("Tell me a joke");
    } catch (const Error& e) {
        // The message lists what is supported.
        EXPECT_NE(std::string(e.what()).find("Q7"), std::string::npos);
    }
}

TEST(Question, RateParsing) {
    EXPECT_EQ(parse_rate("2%"), 0.02);
    EXPECT_EQ(parse_rate("2.5%"), 0.025);
    EXPECT_EQ(parse_rate("0.02"), 0.02);
    EXPECT_EQ(parse_rate("12.34%"), 0.1234);
    EXPECT_EQ(format_percent(0.02), "2%");
    EXPECT_EQ(format_percent(0.025), "2.5%");
    EXPECT_EQ(format_percent(0.1234), "12.34%");
    EXPECT_EQ(code_of([] { parse_rate("0%"); }), ErrorCode::kBadParameter);
    EXPECT_EQ(code_of([] { parse_rate("-1%"); }), ErrorCode::kBadParameter);
}

TEST(Question, TemplatesAreGroupedByKind) {
    const auto& ts = templates();
    ASSERT_EQ(ts.size(), 7u);
    int counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < ts.size(); ++i) {
        EXPECT_EQ(ts[i].id, fmt::format("Q{}", i + 1));
        EXPECT_EQ(ts[i].result_kind, default_spec(ts[i].id).result_kind());
        ++counts[static_cast<int>(ts[i].result_kind)];
    }
    EXPECT_EQ(counts[0], 3);
    EXPECT_EQ(counts[1], 2);
    EXPECT_EQ(counts[2], 2);
    EXPECT_EQ(ts[3].slots.at(0).default_value, "2%");
    EXPECT_FALSE(ts[4].slots.at(0).default_value.has_value());
}

TEST(Question, DefaultSpecs) {
    EXPECT_EQ(default_spec("q5"), QuerySpec{Q5{1}});
    EXPECT_EQ(default_spec("Q3").id(), "Q3");
    EXPECT_EQ(code_of([] { default_spec("Q8"); }), ErrorCode::kUnsupportedQuestion);
}

TEST(Question, PlansHaveTheExpectedShape) {
    EXPECT_EQ(tables_for(QuerySpec{Q1{}}), std::vector<std::string>{"predictions"});
    EXPECT_EQ(tables_for(QuerySpec{Q3{}}), (std::vector<std::string>{"predictions", "users"}));
    EXPECT_EQ(tables_for(QuerySpec{Q2{}}, TableNames{"p", "u"}), (std::vector<std::string>{"p", "u"}));
    auto q3 = rel::to_string(*plan_for(QuerySpec{Q3{}}));
    EXPECT_NE(q3.find("WindowRank"), std::string::npos) << q3;
    EXPECT_NE(q3.find("HashJoin"), std::string::npos) << q3;
    EXPECT_FALSE(rel::contains_branch_union(*plan_for(QuerySpec{Q7{}})));
    EXPECT_EQ(code_of([] { plan_for(QuerySpec{Q4{1.5}}); }), ErrorCode::kBadParameter);
}

// Random parameters survive describe -> compile, and equal specs always get
// structurally equal plans.
std::string random_name(std::mt19937_64& rng, std::size_t min_len) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789_-";
    std::string s;
    auto len = min_len + rng() % 8;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
}

QuerySpec random_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (rng() % 7) {
        case 0: return {Q1{}};
        case 1: return {Q2{random_name(rng, 1)}};
        case 2: {
            Q3 q;
            q.segments.clear();
            auto n = 1 + rng() % 3;
            for (std::size_t i = 0; i < n; ++i) q.segments.push_back(random_name(rng, 1));
            q.k = 1 + static_cast<std::int64_t>(rng() % 100);
            return {q};
        }
        case 3: {
            double tau = rng() % 2 ? static_cast<double>(1 + rng() % 9999) / 10000.0 : unit(rng);
            if (tau <= 0.0) tau = 0.5;
            return {Q4{tau}};
        }
        case 4: return {Q5{static_cast<std::int64_t>(rng() % 1000000)}};
        case 5: return {Q6{1 + static_cast<std::int64_t>(rng() % 100)}};
        default: return {Q7{}};
    }
}

TEST(QuestionProperty, DescribeCompileRoundTrip) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 2000; ++i) {
        auto spec = random_spec(rng);
        auto text = describe(spec).question;
        ASSERT_EQ(compile(text), spec) << text;
    }
    for (const auto& t : templates()) {
        auto spec = default_spec(t.id);
        ASSERT_EQ(compile(describe(spec).question), spec);
    }
}

TEST(QuestionProperty, PlansAreDeterministic) {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 300; ++i) {
        auto spec = random_spec(rng);
        auto a = plan_for(spec);
        auto b = plan_for(compile(describe(spec).question));
        ASSERT_EQ(rel::structural_hash(*a), rel::structural_hash(*b));
        ASSERT_EQ(rel::to_string(*a), rel::to_string(*b));
        ASSERT_EQ(describe(spec).plan_sketch, describe(spec).plan_sketch);
    }
}

}  // namespace
}  // namespace branchlake::question
