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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "branchlake/plan.hpp"

namespace branchlake::question {

enum class ResultKind { kNumber, kBoolean, kList };

std::string_view kind_name(ResultKind kind);

// The seven demo questions. Numbers: Q1-Q3, booleans: Q4-Q5, lists: Q6-Q7.

/// Buyers per branch.
struct Q1 {
    bool operator==(const Q1&) const = default;
};
/// Buyers among users with the given interest.
struct Q2 {
    std::string interest = "smartphones";
    bool operator==(const Q2&) const = default;
};
/// Buyers among the top-k users by lifetime value within each listed segment.
struct Q3 {
    std::vector<std::string> segments = {"top"};
    std::int64_t k = 10;
    bool operator==(const Q3&) const = default;
};
/// Conversion rate (buyers / rows) strictly above tau.
struct Q4 {
    double tau = 0.02;
    bool operator==(const Q4&) const = default;
};
/// Whether the given user is predicted to buy.
struct Q5 {
    std::int64_t user_id = 0;
    bool operator==(const Q5&) const = default;
};
/// Top-k buyers by score.
struct Q6 {
    std::int64_t k = 10;
    bool operator==(const Q6&) const = default;
};
/// Users that buy in some branch but not in all of them.
struct Q7 {
    bool operator==(const Q7&) const = default;
};

using Question = std::variant<Q1, Q2, Q3, Q4, Q5, Q6, Q7>;

struct QuerySpec {
    Question question;

    /// 1..7
    int number() const { return static_cast<int>(question.index()) + 1; }
    /// "Q1".."Q7"
    std::string id() const;
    ResultKind result_kind() const;

    bool operator==(const QuerySpec&) const = default;
};

/// Raises BadParameter when a parameter is out of range.
void validate(const QuerySpec& spec);

/// Default-parameter spec for "Q1".."Q7" (case-insensitive). Q5 gets user 1.
/// Raises UnsupportedQuestion.
QuerySpec default_spec(std::string_view id);

struct TemplateSlot {
    std::string name;
    std::string type;
    std::optional<std::string> default_value;
};

struct TemplateInfo {
    std::string id;
    ResultKind result_kind;
    std::string canonical;  // the question as phrased in the demo script
    std::string pattern;    // general form with {slot} placeholders
    std::vector<TemplateSlot> slots;
};

/// The seven templates in id order.
const std::vector<TemplateInfo>& templates();

/// Case-insensitive template match. Raises UnrecognizedQuestion (listing the
/// supported templates) or BadParameter.
QuerySpec compile(std::string_view question);

struct Description {
    std::string question;
    std::string plan_sketch;
};

/// Canonical question text; compile(describe(s).question) == s.
Description describe(const QuerySpec& spec);

/// "2%" -> 0.02 by decimal shifting, so describe/compile round-trip exactly.
/// Bare fractions ("0.02") are accepted as-is.
double parse_rate(std::string_view text);
std::string format_percent(double rate);

struct TableNames {
    std::string predictions = "predictions";
    std::string users = "users";
};

/// The canonical single-branch plan. Number plans yield one int64 `value`
/// row, boolean plans one bool `answer` row, list plans a `user_id` column.
/// Raises UnsupportedQuestion / BadParameter.
rel::PlanPtr plan_for(const QuerySpec& spec, const TableNames& tables = {});

/// Tables the plan reads.
std::vector<std::string> tables_for(const QuerySpec& spec, const TableNames& tables = {});

inline constexpr std::string_view kNumberColumn = "value";
inline constexpr std::string_view kBooleanColumn = "answer";
inline constexpr std::string_view kListColumn = "user_id";

}  // namespace branchlake::question
