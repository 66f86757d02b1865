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

#include "branchlake/superval.hpp"

#include <algorithm>
#include <iterator>
#include <unordered_map>

#include <fmt/format.h>

#include "branchlake/error.hpp"

namespace branchlake::superval {

std::string_view verdict_name(Verdict v) {
    switch (v) {
    case Verdict::kDefinitelyTrue: return "definitely_true";
    case Verdict::kDefinitelyFalse: return "definitely_false";
    case Verdict::kGlut: return "glut";
    }
    return "?";
}

std::string_view verdict_label(Verdict v) {
    switch (v) {
    case Verdict::kDefinitelyTrue: return "true";
    case Verdict::kDefinitelyFalse: return "false";
    case Verdict::kGlut: return "mixed";
    }
    return "?";
}

Verdict classify_bools(const std::map<std::string, bool>& per_branch) {
    if (per_branch.empty()) raise(ErrorCode::kEmptyBranchSet, "no branches to classify");
    bool any_true = false;
    bool any_false = false;
    for (const auto& [_, v] : per_branch) (v ? any_true : any_false) = true;
    if (any_true && any_false) return Verdict::kGlut;
    return any_true ? Verdict::kDefinitelyTrue : Verdict::kDefinitelyFalse;
}

NumberSummary summarize_numbers(const std::map<std::string, double>& per_branch) {
    if (per_branch.empty()) raise(ErrorCode::kEmptyBranchSet, "no branches to summarize");
    NumberSummary s;
    s.per_branch = per_branch;
    s.min = per_branch.begin()->second;
    s.max = s.min;
    double total = 0;
    for (const auto& [_, v] : per_branch) {
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
        total += v;
    }
    s.mean = total / static_cast<double>(per_branch.size());
    s.unanimous = s.min == s.max;
    return s;
}

ListDiff diff_lists(const std::map<std::string, IdList>& per_branch) {
    if (per_branch.empty()) raise(ErrorCode::kEmptyBranchSet, "no branches to diff");
    ListDiff d;
    d.per_branch = per_branch;
    std::unordered_map<std::int64_t, std::size_t> seen_in;
    for (const auto& [branch, ids] : per_branch) {
        IdList sorted = ids;
        std::ranges::sort(sorted);
        if (auto dup = std::ranges::adjacent_find(sorted); dup != sorted.end()) {
            raise(ErrorCode::kDuplicateId, fmt::format("branch '{}' lists id {} twice", branch, *dup));
        }
        for (auto id : sorted) ++seen_in[id];
    }
    for (const auto& [id, n] : seen_in) {
        if (n == per_branch.size()) d.consensus.push_back(id);
    }
    std::ranges::sort(d.consensus);
    for (const auto& [branch, ids] : per_branch) {
        IdList sorted = ids;
        std::ranges::sort(sorted);
        IdList rest;
        std::ranges::set_difference(sorted, d.consensus, std::back_inserter(rest));
        d.exclusive.emplace(branch, std::move(rest));
    }
    return d;
}

IdList undecided(const ListDiff& diff) {
    IdList out;
    for (const auto& [_, ids] : diff.exclusive) out.insert(out.end(), ids.begin(), ids.end());
    std::ranges::sort(out);
    auto [first, last] = std::ranges::unique(out);
    out.erase(first, last);
    return out;
}

}  // namespace branchlake::superval
