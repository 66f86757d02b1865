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
#include <string>
#include <string_view>
#include <vector>

#include "branchlake/catalog.hpp"

namespace branchlake::datagen {

struct Segment {
    std::string name;
    double proportion;

    bool operator==(const Segment&) const = default;
};

struct GenConfig {
    std::uint64_t seed = 42;
    std::int64_t n_users = 100'000;
    std::vector<std::string> branches;
    double base_rate = 0.02;
    double jitter = 0.01;
    std::vector<Segment> segments = {{"top", 0.2}, {"mid", 0.3}, {"low", 0.5}};
    std::vector<std::string> interests = {"smartphones", "laptops", "tablets", "audio"};

    bool operator==(const GenConfig&) const = default;
};

/// agent_000, agent_001, ... zero-padded to at least three digits.
std::vector<std::string> branch_names(std::size_t count);

/// Raises BadConfig.
void validate(const GenConfig& config);

/// Uniform [0, 1) draw keyed by (seed, stream, id): splitmix64 over the
/// FNV-1a of le64(seed) ++ stream ++ 0x1f ++ le64(id). Branch streams use
/// the branch name; user attributes use "@segment", "@interest", "@ltv",
/// which no branch name can collide with.
double draw(std::uint64_t seed, std::string_view stream, std::uint64_t id);

/// base_rate + jitter * (2u - 1) with u = draw(seed, branch, 0).
double branch_rate(const GenConfig& config, std::string_view branch);

/// The shared dimension table: user_id, segment, interest, ltv.
rel::ColumnarTable make_users(const GenConfig& config);

/// One branch's predictions: user_id, score, will_buy.
rel::ColumnarTable make_predictions(const GenConfig& config, std::string_view branch);

/// Creates a catalog at `root` with users on main and one forked branch per
/// configured name holding its own predictions. Raises BadConfig,
/// AlreadyExists, IoError.
catalog::CatalogManifest generate(const GenConfig& config, const std::filesystem::path& root);

}  // namespace branchlake::datagen
