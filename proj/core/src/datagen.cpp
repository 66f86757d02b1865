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

#include "branchlake/datagen.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "branchlake/error.hpp"
#include "branchlake/hash.hpp"

namespace branchlake::datagen {

namespace {

constexpr std::uint8_t kStreamSeparator = 0x1f;

[[noreturn]] void bad(const std::string& msg) { raise(ErrorCode::kBadConfig, msg); }

}  // namespace

std::vector<std::string> branch_names(std::size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(fmt::format("agent_{:03}", i));
    return out;
}

void validate(const GenConfig& c) {
    if (c.n_users < 1) bad("n_users must be at least 1");
    if (c.branches.empty()) bad("at least one branch is required");
    std::set<std::string> seen;
    for (const auto& b : c.branches) {
        if (!catalog::is_valid_name(b)) bad(fmt::format("invalid branch name '{}'", b));
        if (b == catalog::kMainBranch) bad("main holds the shared tables and cannot be a generated branch");
        if (!seen.insert(b).second) bad(fmt::format("branch '{}' listed twice", b));
    }
    if (!std::isfinite(c.base_rate) || !std::isfinite(c.jitter) || c.jitter < 0) bad("rates must be finite, jitter >= 0");
    if (!(c.base_rate - c.jitter > 0) || !(c.base_rate + c.jitter < 1)) {
        bad(fmt::format("base_rate +/- jitter must stay inside (0, 1), got {} +/- {}", c.base_rate, c.jitter));
    }
    if (c.segments.empty()) bad("at least one segment is required");
    double total = 0;
    seen.clear();
    for (const auto& s : c.segments) {
        if (!catalog::is_valid_name(s.name)) bad(fmt::format("invalid segment name '{}'", s.name));
        if (!seen.insert(s.name).second) bad(fmt::format("segment '{}' listed twice", s.name));
        if (!(s.proportion > 0)) bad(fmt::format("segment '{}' needs a positive proportion", s.name));
        total += s.proportion;
    }
    if (std::abs(total - 1.0) > 1e-9) bad(fmt::format("segment proportions sum to {}, not 1", total));
    if (c.interests.empty()) bad("at least one interest is required");
    seen.clear();
    for (const auto& i : c.interests) {
        if (!catalog::is_valid_name(i)) bad(fmt::format("invalid interest '{}'", i));
        if (!seen.insert(i).second) bad(fmt::format("interest '{}' listed twice", i));
    }
}

double draw(std::uint64_t seed, std::string_view stream, std::uint64_t id) {
    Fnv1a h;
    h.update_u64(seed).update(stream).update_byte(kStreamSeparator).update_u64(id);
    return unit_interval(splitmix64(h.digest()));
}

double branch_rate(const GenConfig& config, std::string_view branch) {
    return config.base_rate + config.jitter * (2.0 * draw(config.seed, branch, 0) - 1.0);
}

rel::ColumnarTable make_users(const GenConfig& c) {
    auto n = static_cast<std::size_t>(c.n_users);
    rel::Int64Column ids(n);
    rel::StringColumn segment(n), interest(n);
    rel::Float64Column ltv(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto uid = static_cast<std::uint64_t>(i + 1);
        ids[i] = static_cast<std::int64_t>(uid);

        double u = draw(c.seed, "@segment", uid);
        double acc = 0;
        segment[i] = c.segments.back().name;
        for (const auto& s : c.segments) {
            acc += s.proportion;
            if (u < acc) {
                segment[i] = s.name;
                break;
            }
        }
        auto k = static_cast<std::size_t>(draw(c.seed, "@interest", uid) * static_cast<double>(c.interests.size()));
        interest[i] = c.interests[std::min(k, c.interests.size() - 1)];
        ltv[i] = std::round(draw(c.seed, "@ltv", uid) * 100'000.0) / 100.0;
    }
    rel::Schema schema{{"user_id", rel::DataType::kInt64},
                       {"segment", rel::DataType::kString},
                       {"interest", rel::DataType::kString},
                       {"ltv", rel::DataType::kFloat64}};
    return rel::ColumnarTable(std::move(schema), std::vector<rel::Column>{std::move(ids), std::move(segment),
                                                                          std::move(interest), std::move(ltv)});
}

rel::ColumnarTable make_predictions(const GenConfig& c, std::string_view branch) {
    auto n = static_cast<std::size_t>(c.n_users);
    double rate = branch_rate(c, branch);
    rel::Int64Column ids(n);
    rel::Float64Column score(n);
    rel::BoolColumn will_buy(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto uid = static_cast<std::uint64_t>(i + 1);
        double d = draw(c.seed, branch, uid);
        ids[i] = static_cast<std::int64_t>(uid);
        score[i] = 1.0 - d;
        will_buy[i] = d < rate ? 1 : 0;
    }
    rel::Schema schema{{"user_id", rel::DataType::kInt64},
                       {"score", rel::DataType::kFloat64},
                       {"will_buy", rel::DataType::kBool}};
    return rel::ColumnarTable(std::move(schema),
                              std::vector<rel::Column>{std::move(ids), std::move(score), std::move(will_buy)});
}

catalog::CatalogManifest generate(const GenConfig& config, const std::filesystem::path& root) {
    validate(config);
    auto cat = catalog::Catalog::init(root);
    const std::string main(catalog::kMainBranch);
    cat.write_table(main, "users", make_users(config));
    for (const auto& b : config.branches) {
        cat.create_branch(b, main);
        cat.write_table(b, "predictions", make_predictions(config, b));
    }
    return cat.manifest();
}

}  // namespace branchlake::datagen
