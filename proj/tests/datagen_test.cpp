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

#include <gtest/gtest.h>

#include "branchlake/datagen.hpp"
#include "branchlake/table_io.hpp"
#include "branchlake/wire.hpp"
#include "test_util.hpp"

namespace branchlake::datagen {
namespace {

using testing::code_of;
using testing::TempDir;

GenConfig small(std::uint64_t seed, std::size_t branches, std::int64_t users = 2000) {
    GenConfig c;
    c.seed = seed;
    c.n_users = users;
    c.branches = branch_names(branches);
    return c;
}

// Values below come from a separate reference implementation of the draw.
TEST(Datagen, FrozenDraws) {
    EXPECT_DOUBLE_EQ(draw(42, "agent_000", 0), 0.8816202945997991);
    EXPECT_DOUBLE_EQ(draw(42, "agent_000", 1), 0.20970440613040953);
    EXPECT_DOUBLE_EQ(draw(42, "agent_001", 7), 0.8476652407347911);
    EXPECT_DOUBLE_EQ(draw(7, "@segment", 1), 0.9882759991666251);
    EXPECT_DOUBLE_EQ(draw(0, "main", 123456), 0.0728159464396334);
    GenConfig c;
    EXPECT_DOUBLE_EQ(branch_rate(c, "agent_000"), 0.027632405891995983);
}

TEST(Datagen, FrozenRows) {
    auto c = small(42, 1, 5);
    auto users = make_users(c);
    EXPECT_EQ(rel::as<std::string>(users.column("segment")),
              (rel::StringColumn{"low", "low", "mid", "mid", "mid"}));
    EXPECT_EQ(rel::as<std::string>(users.column("interest")),
              (rel::StringColumn{"laptops", "audio", "audio", "tablets", "audio"}));
    EXPECT_EQ(rel::as<double>(users.column("ltv")), (rel::Float64Column{337.12, 253.52, 438.89, 928.48, 794.78}));
    auto p = make_predictions(c, "agent_000");
    const auto& score = rel::as<double>(p.column("score"));
    EXPECT_DOUBLE_EQ(score[0], 0.7902955938695905);
    EXPECT_DOUBLE_EQ(score[1], 0.9033646057309006);
    EXPECT_DOUBLE_EQ(score[2], 0.011099731114266098);
    EXPECT_DOUBLE_EQ(score[3], 0.9781486514685923);
    EXPECT_DOUBLE_EQ(score[4], 0.2186016631578691);
    EXPECT_EQ(rel::as<std::uint8_t>(p.column("will_buy")), (rel::BoolColumn{0, 0, 0, 1, 0}));
}

TEST(Datagen, BranchNames) {
    EXPECT_EQ(branch_names(3), (std::vector<std::string>{"agent_000", "agent_001", "agent_002"}));
    EXPECT_EQ(branch_names(1001).back(), "agent_1000");
}

TEST(Datagen, RegenerationIsByteIdentical) {
    TempDir td;
    auto c = small(7, 4);
    auto a = generate(c, td / "a");
    auto b = generate(c, td / "b");
    EXPECT_EQ(a, b);
    EXPECT_EQ(io::read_file(td / "a" / "catalog.json"), io::read_file(td / "b" / "catalog.json"));
    for (const auto& [name, info] : a.branches) {
        for (const auto& [t, ref] : info.tables) {
            EXPECT_EQ(io::read_file(td / "a" / ref.file), io::read_file(td / "b" / ref.file)) << name << "/" << t;
        }
    }
    auto other = small(8, 4);
    EXPECT_NE(generate(other, td / "c").branch("agent_000").commit, a.branch("agent_000").commit);
}

TEST(Datagen, UsersAreSharedPredictionsDiverge) {
    TempDir td;
    auto m = generate(small(3, 5), td / "c");
    EXPECT_EQ(m.branch_names().size(), 6u);
    EXPECT_FALSE(m.branch("main").tables.contains("predictions"));
    const auto& users = m.branch("main").tables.at("users");
    std::set<std::string> prediction_hashes;
    for (const auto& b : branch_names(5)) {
        EXPECT_EQ(m.branch(b).parent, "main");
        EXPECT_EQ(m.branch(b).tables.at("users"), users);
        prediction_hashes.insert(m.branch(b).tables.at("predictions").content_hash);
    }
    EXPECT_EQ(prediction_hashes.size(), 5u);
    EXPECT_EQ(code_of([&] { generate(small(3, 5), td / "c"); }), ErrorCode::kAlreadyExists);
}

TEST(Datagen, RatesStraddleTheBase) {
    GenConfig c = small(42, 50);
    int above = 0, below = 0;
    for (const auto& b : c.branches) {
        double r = branch_rate(c, b);
        EXPECT_GE(r, c.base_rate - c.jitter);
        EXPECT_LE(r, c.base_rate + c.jitter);
        (r > c.base_rate ? above : below)++;
    }
    EXPECT_GT(above, 0);
    EXPECT_GT(below, 0);
}

TEST(Datagen, RealizedRatesTrackBranchRates) {
    auto c = small(5, 3, 100000);
    for (const auto& b : c.branches) {
        auto p = make_predictions(c, b);
        const auto& buy = rel::as<std::uint8_t>(p.column("will_buy"));
        double realized = static_cast<double>(std::count(buy.begin(), buy.end(), 1)) / static_cast<double>(buy.size());
        // Binomial standard deviation at n=1e5 and p~0.03 is ~0.0005.
        EXPECT_NEAR(realized, branch_rate(c, b), 0.003) << b;
    }
}

TEST(Datagen, SegmentProportions) {
    auto users = make_users(small(1, 1, 50000));
    std::map<std::string, int> counts;
    for (const auto& s : rel::as<std::string>(users.column("segment"))) ++counts[s];
    EXPECT_NEAR(counts["top"] / 50000.0, 0.2, 0.01);
    EXPECT_NEAR(counts["mid"] / 50000.0, 0.3, 0.01);
    EXPECT_NEAR(counts["low"] / 50000.0, 0.5, 0.01);
}

TEST(Datagen, ConfigValidation) {
    auto bad = [](auto mutate) {
        GenConfig c = small(1, 2);
        mutate(c);
        return code_of([&] { validate(c); });
    };
    EXPECT_EQ(bad([](GenConfig&) {}), std::nullopt);
    EXPECT_EQ(bad([](GenConfig& c) { c.n_users = 0; }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](GenConfig& c) { c.branches.clear(); }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](GenConfig& c) { c.branches.push_back("main"); }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](GenConfig& c) { c.branches.push_back("agent_000"); }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](GenConfig& c) { c.branches.push_back("Agent"); }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](GenConfig& c) { c.jitter = 0.02; }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](GenConfig& c) { c.jitter = -0.01; }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](GenConfig& c) { c.segments[0].proportion = 0.3; }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](GenConfig& c) { c.interests.clear(); }), ErrorCode::kBadConfig);
    EXPECT_EQ(bad([](GenConfig& c) { c.interests.push_back("audio"); }), ErrorCode::kBadConfig);
}

TEST(Datagen, JsonConfig) {
    auto c = small(9, 3, 10);
    EXPECT_EQ(wire::gen_config_from_json(wire::to_json(c)), c);
    auto d = wire::gen_config_from_json(wire::json::object());
    EXPECT_EQ(d.branches.size(), 50u);
    EXPECT_EQ(d.seed, 42u);
    auto e = wire::gen_config_from_json({{"branch_count", 4}, {"n_users", 10}});
    EXPECT_EQ(e.branches, branch_names(4));
    EXPECT_EQ(code_of([] { wire::gen_config_from_json({{"n_users", "many"}}); }), ErrorCode::kBadConfig);
    EXPECT_EQ(code_of([] { wire::gen_config_from_json({{"jitter", 0.5}}); }), ErrorCode::kBadConfig);
}

}  // namespace
}  // namespace branchlake::datagen
