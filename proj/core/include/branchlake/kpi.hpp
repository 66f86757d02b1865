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

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "branchlake/superval.hpp"

namespace branchlake::superval {

/// Sentences over KPI constants: threshold atoms `name > x` closed under
/// not / and / or.
class KpiSentence {
public:
    struct Atom {
        std::string kpi;
        double threshold;
    };
    struct Not {
        std::shared_ptr<const KpiSentence> operand;
    };
    struct And {
        std::shared_ptr<const KpiSentence> lhs, rhs;
    };
    struct Or {
        std::shared_ptr<const KpiSentence> lhs, rhs;
    };
    using Node = std::variant<Atom, Not, And, Or>;

    const Node& node() const { return node_; }

    /// Raises BadParameter on an empty name or non-finite threshold.
    static KpiSentence atom(std::string kpi, double threshold);
    static KpiSentence negate(KpiSentence s);
    static KpiSentence conj(KpiSentence lhs, KpiSentence rhs);
    static KpiSentence disj(KpiSentence lhs, KpiSentence rhs);

    /// Renders in the textual grammar; parse(to_string()) is structurally equal.
    std::string to_string() const;
    std::size_t depth() const;
    void collect_kpis(std::vector<std::string>& out) const;

    bool operator==(const KpiSentence& other) const;

private:
    explicit KpiSentence(Node node) : node_(std::move(node)) {}
    Node node_;
};

/// Grammar: atom := NAME '>' NUMBER;
///          sentence := atom | 'not' '(' sentence ')' | '(' sentence ('and'|'or') sentence ')'.
/// Raises ParseError.
KpiSentence parse_sentence(std::string_view text);

struct BranchModel {
    std::string branch;
    std::map<std::string, double> kpi_values;
};

class BranchModelSet {
public:
    /// Raises EmptyBranchSet, or DuplicateBranch for repeated branch ids.
    explicit BranchModelSet(std::vector<BranchModel> models);

    const std::vector<BranchModel>& models() const { return models_; }

private:
    std::vector<BranchModel> models_;
};

/// Classical satisfaction in one branch. Raises UnknownKpi.
bool eval_classical(const KpiSentence& s, const BranchModel& m);

struct SupervalResult {
    bool true_plus = false;   // some branch satisfies the sentence
    bool true_minus = false;  // some branch refutes it
    Verdict verdict = Verdict::kGlut;

    bool operator==(const SupervalResult&) const = default;
};

/// Evaluates the whole sentence inside each branch, then quantifies
/// existentially over branches. Raises UnknownKpi.
SupervalResult eval_superval(const KpiSentence& s, const BranchModelSet& models);

}  // namespace branchlake::superval
