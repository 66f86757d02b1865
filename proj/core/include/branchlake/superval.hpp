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
#include <string>
#include <string_view>
#include <vector>

namespace branchlake::superval {

enum class Verdict { kDefinitelyTrue, kDefinitelyFalse, kGlut };

/// "definitely_true", "definitely_false", "glut".
std::string_view verdict_name(Verdict v);
/// "true", "false", "mixed": the wording shown to people.
std::string_view verdict_label(Verdict v);

/// All true, all false, or a glut. Raises EmptyBranchSet.
Verdict classify_bools(const std::map<std::string, bool>& per_branch);

struct NumberSummary {
    std::map<std::string, double> per_branch;
    double min = 0;
    double max = 0;
    double mean = 0;  // each branch weighted equally
    bool unanimous = true;

    bool operator==(const NumberSummary&) const = default;
};

/// Raises EmptyBranchSet.
NumberSummary summarize_numbers(const std::map<std::string, double>& per_branch);

using IdList = std::vector<std::int64_t>;

struct ListDiff {
    std::map<std::string, IdList> per_branch;  // as given
    IdList consensus;                          // in every branch, ascending
    std::map<std::string, IdList> exclusive;   // per_branch minus consensus, ascending

    bool operator==(const ListDiff&) const = default;
};

/// Raises EmptyBranchSet, or DuplicateId when a branch lists an id twice.
ListDiff diff_lists(const std::map<std::string, IdList>& per_branch);

/// Ids present in some branch but not in all of them, ascending: the union
/// of the exclusives.
IdList undecided(const ListDiff& diff);

}  // namespace branchlake::superval
