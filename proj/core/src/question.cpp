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

#include "branchlake/question.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "branchlake/catalog.hpp"
#include "branchlake/error.hpp"

namespace branchlake::question {

std::string_view kind_name(ResultKind kind) {
    switch (kind) {
    case ResultKind::kNumber: return "number";
    case ResultKind::kBoolean: return "boolean";
    case ResultKind::kList: return "list";
    }
    return "?";
}

std::string QuerySpec::id() const { return fmt::format("Q{}", number()); }

ResultKind QuerySpec::result_kind() const {
    int n = number();
    if (n <= 3) return ResultKind::kNumber;
    if (n <= 5) return ResultKind::kBoolean;
    return ResultKind::kList;
}

void validate(const QuerySpec& spec) {
    std::visit(
        [](const auto& q) {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, Q2>) {
                if (!catalog::is_valid_name(q.interest)) {
                    raise(ErrorCode::kBadParameter, fmt::format("bad interest '{}'", q.interest));
                }
            } else if constexpr (std::is_same_v<T, Q3>) {
                if (q.segments.empty()) raise(ErrorCode::kBadParameter, "Q3 needs at least one segment");
                for (const auto& s : q.segments) {
                    if (!catalog::is_valid_name(s)) raise(ErrorCode::kBadParameter, fmt::format("bad segment '{}'", s));
                }
                if (q.k <= 0) raise(ErrorCode::kBadParameter, "k must be positive");
            } else if constexpr (std::is_same_v<T, Q4>) {
                if (!(q.tau > 0.0 && q.tau < 1.0)) raise(ErrorCode::kBadParameter, "tau must be in (0, 1)");
            } else if constexpr (std::is_same_v<T, Q6>) {
                if (q.k <= 0) raise(ErrorCode::kBadParameter, "k must be positive");
            }
        },
        spec.question);
}

QuerySpec default_spec(std::string_view id) {
    std::string s(id);
    std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "q1") return {Q1{}};
    if (s == "q2") return {Q2{}};
    if (s == "q3") return {Q3{}};
    if (s == "q4") return {Q4{}};
    if (s == "q5") return {Q5{1}};
    if (s == "q6") return {Q6{}};
    if (s == "q7") return {Q7{}};
    raise(ErrorCode::kUnsupportedQuestion, fmt::format("unknown question id '{}'", id));
}

const std::vector<TemplateInfo>& templates() {
    static const std::vector<TemplateInfo> kTemplates = {
        {"Q1", ResultKind::kNumber, "How many customers are expected to buy tomorrow?",
         "How many customers are expected to buy tomorrow?", {}},
        {"Q2", ResultKind::kNumber, "How many smartphone shoppers will convert tomorrow?",
         "How many {interest} shoppers will convert tomorrow?",
         {{"interest", "string", "smartphones"}}},
        {"Q3", ResultKind::kNumber, "How many customers in the top segments are expected to buy tomorrow?",
         "How many customers in the top {k} by lifetime value of segments {segments} are expected to buy tomorrow?",
         {{"segments", "string list", "top"}, {"k", "integer", "10"}}},
        {"Q4", ResultKind::kBoolean, "Is tomorrow's conversion rate above 2%?",
         "Is tomorrow's conversion rate above {tau}?", {{"tau", "percent", "2%"}}},
        {"Q5", ResultKind::kBoolean, "Is customer u expected to buy tomorrow?",
         "Is customer {user_id} expected to buy tomorrow?", {{"user_id", "integer", std::nullopt}}},
        {"Q6", ResultKind::kList, "Which customers are expected to buy tomorrow?",
         "Which top {k} customers are expected to buy tomorrow?", {{"k", "integer", "10"}}},
        {"Q7", ResultKind::kList, "Which customers are undecided and might be influenced by messaging?",
         "Which customers are undecided and might be influenced by messaging?", {}},
    };
    return kTemplates;
}

namespace {

std::string normalize(std::string_view q) {
    std::string out;
    bool space = false;
    for (std::size_t i = 0; i < q.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(q[i]);
        // U+2019 right single quotation mark, as typed by many keyboards.
        if (c == 0xE2 && i + 2 < q.size() && static_cast<unsigned char>(q[i + 1]) == 0x80 &&
            static_cast<unsigned char>(q[i + 2]) == 0x99) {
            c = '\'';
            i += 2;
        }
        if (std::isspace(c)) {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(c));
    }
    while (!out.empty() && (out.back() == '?' || out.back() == '.' || out.back() == ' ')) out.pop_back();
    return out;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        raise(ErrorCode::kBadParameter, fmt::format("{} must be an integer, got '{}'", what, text));
    }
    return v;
}

std::int64_t parse_positive(std::string_view text, std::string_view what) {
    auto v = parse_int(text, what);
    if (v <= 0) raise(ErrorCode::kBadParameter, fmt::format("{} must be positive, got {}", what, v));
    return v;
}

bool is_decimal(std::string_view s) {
    static const std::regex kDecimal(R"(\d+(\.\d+)?)");
    return std::regex_match(s.begin(), s.end(), kDecimal);
}

// Moves the decimal point of a plain decimal string; positive = right.
std::string shift_decimal(std::string_view s, int places) {
    auto dot = s.find('.');
    std::string whole(s.substr(0, dot));
    std::string frac = dot == std::string_view::npos ? "" : std::string(s.substr(dot + 1));
    if (places > 0) {
        auto n = static_cast<std::size_t>(places);
        if (frac.size() < n) frac.append(n - frac.size(), '0');
        whole += frac.substr(0, n);
        frac.erase(0, n);
    } else {
        auto n = static_cast<std::size_t>(-places);
        if (whole.size() < n + 1) whole.insert(0, n + 1 - whole.size(), '0');
        frac.insert(0, whole.substr(whole.size() - n));
        whole.erase(whole.size() - n);
    }
    auto first = whole.find_first_not_of('0');
    whole = first == std::string::npos ? "0" : whole.substr(first);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    return frac.empty() ? whole : whole + "." + frac;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(' ');
    auto e = s.find_last_not_of(' ');
    return b == std::string_view::npos ? std::string() : std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void unrecognized(std::string_view question) {
    std::string msg = fmt::format("unrecognized question '{}'; supported templates:", question);
    for (const auto& t : templates()) msg += fmt::format("\n  {}: {}", t.id, t.pattern);
    raise(ErrorCode::kUnrecognizedQuestion, msg);
}

struct Rule {
    std::regex pattern;
    QuerySpec (*build)(const std::smatch&);
};

const std::vector<Rule>& rules() {
    using std::regex;
    static const std::vector<Rule> kRules = [] {
        std::vector<Rule> r;
        r.push_back({regex("how many customers are expected to buy tomorrow"),
                     [](const std::smatch&) { return QuerySpec{Q1{}}; }});
        r.push_back({regex("how many shoppers interested in (\\S+) will convert tomorrow"),
                     [](const std::smatch& m) { return QuerySpec{Q2{m[1].str()}}; }});
        r.push_back({regex("how many (\\S+) shoppers will convert tomorrow"), [](const std::smatch& m) {
                         auto word = m[1].str();
                         return QuerySpec{Q2{word + "s"}};
                     }});
        r.push_back({regex("how many customers in the top segments are expected to buy tomorrow"),
                     [](const std::smatch&) { return QuerySpec{Q3{}}; }});
        r.push_back({regex("how many customers in the top (\\S+) by lifetime value of segments (.+) are "
                           "expected to buy tomorrow"),
                     [](const std::smatch& m) {
                         return QuerySpec{Q3{split_list(m[2].str()), parse_positive(m[1].str(), "k")}};
                     }});
        r.push_back({regex("is tomorrow's conversion rate above (\\S+)"),
                     [](const std::smatch& m) { return QuerySpec{Q4{parse_rate(m[1].str())}}; }});
        r.push_back({regex("is customer (\\S+) expected to buy tomorrow"),
                     [](const std::smatch& m) { return QuerySpec{Q5{parse_int(m[1].str(), "customer id")}}; }});
        r.push_back({regex("which customers are expected to buy tomorrow"),
                     [](const std::smatch&) { return QuerySpec{Q6{}}; }});
        r.push_back({regex("which top (\\S+) customers are expected to buy tomorrow"),
                     [](const std::smatch& m) { return QuerySpec{Q6{parse_positive(m[1].str(), "k")}}; }});
        r.push_back({regex("which customers are undecided and might be influenced by messaging"),
                     [](const std::smatch&) { return QuerySpec{Q7{}}; }});
        return r;
    }();
    return kRules;
}

}  // namespace

double parse_rate(std::string_view text) {
    std::string s(text);
    bool percent = !s.empty() && s.back() == '%';
    if (percent) s.pop_back();
    if (!is_decimal(s)) raise(ErrorCode::kBadParameter, fmt::format("bad rate '{}'", text));
    if (percent) s = shift_decimal(s, -2);
    double v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    if (!(v > 0.0 && v < 1.0)) raise(ErrorCode::kBadParameter, fmt::format("rate {} is outside (0, 1)", text));
    return v;
}

std::string format_percent(double rate) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), rate, std::chars_format::fixed);
    return shift_decimal(std::string_view(buf, static_cast<std::size_t>(end - buf)), 2) + "%";
}

QuerySpec compile(std::string_view question) {
    auto q = normalize(question);
    for (const auto& rule : rules()) {
        std::smatch m;
        if (std::regex_match(q, m, rule.pattern)) {
            auto spec = rule.build(m);
            validate(spec);
            return spec;
        }
    }
    unrecognized(question);
}

Description describe(const QuerySpec& spec) {
    validate(spec);
    Description d;
    d.question = std::visit(
        [](const auto& q) -> std::string {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, Q1>) {
                return templates()[0].canonical;
            } else if constexpr (std::is_same_v<T, Q2>) {
                // "smartphones" reads as "smartphone shoppers"; other words use the long form.
                if (q.interest.size() > 1 && q.interest.back() == 's') {
                    return fmt::format("How many {} shoppers will convert tomorrow?",
                                       q.interest.substr(0, q.interest.size() - 1));
                }
                return fmt::format("How many shoppers interested in {} will convert tomorrow?", q.interest);
            } else if constexpr (std::is_same_v<T, Q3>) {
                if (q == Q3{}) return templates()[2].canonical;
                return fmt::format("How many customers in the top {} by lifetime value of segments {} are "
                                   "expected to buy tomorrow?",
                                   q.k, fmt::join(q.segments, ", "));
            } else if constexpr (std::is_same_v<T, Q4>) {
                return fmt::format("Is tomorrow's conversion rate above {}?", format_percent(q.tau));
            } else if constexpr (std::is_same_v<T, Q5>) {
                return fmt::format("Is customer {} expected to buy tomorrow?", q.user_id);
            } else if constexpr (std::is_same_v<T, Q6>) {
                if (q == Q6{}) return templates()[5].canonical;
                return fmt::format("Which top {} customers are expected to buy tomorrow?", q.k);
            } else {
                return templates()[6].canonical;
            }
        },
        spec.question);
    std::string summary = std::visit(
        [](const auto& q) -> std::string {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, Q1>) {
                return "count predictions with will_buy = true, once per branch";
            } else if constexpr (std::is_same_v<T, Q2>) {
                return fmt::format("join buyers in predictions with users filtered by interest = '{}', count per "
                                   "branch",
                                   q.interest);
            } else if constexpr (std::is_same_v<T, Q3>) {
                return fmt::format("rank users by ltv within segment, keep rank <= {} in [{}], join buyers in "
                                   "predictions, count per branch",
                                   q.k, fmt::join(q.segments, ", "));
            } else if constexpr (std::is_same_v<T, Q4>) {
                return fmt::format("buyers / rows in predictions > {}, one boolean per branch, verdict over "
                                   "branches",
                                   q.tau);
            } else if constexpr (std::is_same_v<T, Q5>) {
                return fmt::format("does predictions hold user {} with will_buy = true, per branch", q.user_id);
            } else if constexpr (std::is_same_v<T, Q6>) {
                return fmt::format("top {} buyers by score per branch, diffed across branches", q.k);
            } else {
                return "buyer set per branch; users buying in some but not all branches";
            }
        },
        spec.question);
    d.plan_sketch = summary + "\n" + rel::to_string(*plan_for(spec));
    return d;
}

rel::PlanPtr plan_for(const QuerySpec& spec, const TableNames& tables) {
    using namespace rel;
    validate(spec);
    auto buyers = [&] { return filter(scan(tables.predictions), col("will_buy")); };
    auto count_value = [](PlanPtr in) { return aggregate(std::move(in), {}, {count(std::string(kNumberColumn))}); };
    return std::visit(
        [&](const auto& q) -> PlanPtr {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, Q1>) {
                return count_value(buyers());
            } else if constexpr (std::is_same_v<T, Q2>) {
                auto users = filter(scan(tables.users), eq(col("interest"), lit(q.interest)));
                return count_value(hash_join(buyers(), users, {"user_id"}, {"user_id"}));
            } else if constexpr (std::is_same_v<T, Q3>) {
                std::vector<Expr> in_segments;
                for (const auto& s : q.segments) in_segments.push_back(eq(col("segment"), lit(s)));
                auto ranked = window_rank(scan(tables.users), {"segment"}, "ltv", true, "user_id", "ltv_rank");
                auto top = filter(ranked, and_({or_(std::move(in_segments)), le(col("ltv_rank"), lit(q.k))}));
                return count_value(hash_join(buyers(), top, {"user_id"}, {"user_id"}));
            } else if constexpr (std::is_same_v<T, Q4>) {
                auto totals = aggregate(scan(tables.predictions), {},
                                        {count_if(col("will_buy"), "buyers"), count("total")});
                return project(totals, {gt(arith(ArithOp::kDiv, col("buyers"), col("total")), lit(q.tau))},
                               {std::string(kBooleanColumn)});
            } else if constexpr (std::is_same_v<T, Q5>) {
                auto hits = aggregate(scan(tables.predictions), {},
                                      {count_if(and_({eq(col("user_id"), lit(q.user_id)), col("will_buy")}), "hits")});
                return project(hits, {gt(col("hits"), lit(std::int64_t{0}))}, {std::string(kBooleanColumn)});
            } else if constexpr (std::is_same_v<T, Q6>) {
                auto top = top_k(buyers(), {}, "score", true, "user_id", q.k);
                return project(top, {col("user_id")}, {std::string(kListColumn)});
            } else {
                return project(buyers(), {col("user_id")}, {std::string(kListColumn)});
            }
        },
        spec.question);
}

std::vector<std::string> tables_for(const QuerySpec& spec, const TableNames& tables) {
    std::vector<std::string> out;
    rel::collect_tables(*plan_for(spec, tables), out);
    std::ranges::sort(out);
    auto [first, last] = std::ranges::unique(out);
    out.erase(first, last);
    return out;
}

}  // namespace branchlake::question
