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

#include "branchlake/kpi.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "branchlake/error.hpp"
#include "branchlake/table.hpp"

namespace branchlake::superval {

namespace {

template <class... Fs>
struct Overload : Fs... {
    using Fs::operator()...;
};

}  // namespace

KpiSentence KpiSentence::atom(std::string kpi, double threshold) {
    if (kpi.empty()) raise(ErrorCode::kBadParameter, "kpi name must be nonempty");
    if (!std::isfinite(threshold)) raise(ErrorCode::kBadParameter, "kpi threshold must be finite");
    return KpiSentence(Atom{std::move(kpi), threshold});
}

KpiSentence KpiSentence::negate(KpiSentence s) {
    return KpiSentence(Not{std::make_shared<const KpiSentence>(std::move(s))});
}

KpiSentence KpiSentence::conj(KpiSentence lhs, KpiSentence rhs) {
    return KpiSentence(And{std::make_shared<const KpiSentence>(std::move(lhs)),
                           std::make_shared<const KpiSentence>(std::move(rhs))});
}

KpiSentence KpiSentence::disj(KpiSentence lhs, KpiSentence rhs) {
    return KpiSentence(Or{std::make_shared<const KpiSentence>(std::move(lhs)),
                          std::make_shared<const KpiSentence>(std::move(rhs))});
}

std::string KpiSentence::to_string() const {
    return std::visit(Overload{
                          [](const Atom& a) { return fmt::format("{} > {}", a.kpi, rel::format_double(a.threshold)); },
                          [](const Not& n) { return fmt::format("not ({})", n.operand->to_string()); },
                          [](const And& a) { return fmt::format("({} and {})", a.lhs->to_string(), a.rhs->to_string()); },
                          [](const Or& o) { return fmt::format("({} or {})", o.lhs->to_string(), o.rhs->to_string()); },
                      },
                      node_);
}

std::size_t KpiSentence::depth() const {
    return std::visit(Overload{
                          [](const Atom&) -> std::size_t { return 1; },
                          [](const Not& n) { return 1 + n.operand->depth(); },
                          [](const And& a) { return 1 + std::max(a.lhs->depth(), a.rhs->depth()); },
                          [](const Or& o) { return 1 + std::max(o.lhs->depth(), o.rhs->depth()); },
                      },
                      node_);
}

void KpiSentence::collect_kpis(std::vector<std::string>& out) const {
    std::visit(Overload{
                   [&](const Atom& a) { out.push_back(a.kpi); },
                   [&](const Not& n) { n.operand->collect_kpis(out); },
                   [&](const And& a) {
                       a.lhs->collect_kpis(out);
                       a.rhs->collect_kpis(out);
                   },
                   [&](const Or& o) {
                       o.lhs->collect_kpis(out);
                       o.rhs->collect_kpis(out);
                   },
               },
               node_);
}

bool KpiSentence::operator==(const KpiSentence& other) const {
    if (node_.index() != other.node_.index()) return false;
    return std::visit(Overload{
                          [&](const Atom& a) {
                              const auto& b = std::get<Atom>(other.node_);
                              return a.kpi == b.kpi && a.threshold == b.threshold;
                          },
                          [&](const Not& n) { return *n.operand == *std::get<Not>(other.node_).operand; },
                          [&](const And& a) {
                              const auto& b = std::get<And>(other.node_);
                              return *a.lhs == *b.lhs && *a.rhs == *b.rhs;
                          },
                          [&](const Or& a) {
                              const auto& b = std::get<Or>(other.node_);
                              return *a.lhs == *b.lhs && *a.rhs == *b.rhs;
                          },
                      },
                      node_);
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    KpiSentence parse() {
        auto s = sentence();
        skip_space();
        if (pos_ != text_.size()) fail("trailing input");
        return s;
    }

private:
    KpiSentence sentence() {
        skip_space();
        if (peek() == '(') {
            ++pos_;
            auto lhs = sentence();
            auto op = word();
            auto rhs = sentence();
            expect(')');
            if (op == "and") return KpiSentence::conj(std::move(lhs), std::move(rhs));
            if (op == "or") return KpiSentence::disj(std::move(lhs), std::move(rhs));
            fail(fmt::format("expected 'and' or 'or', got '{}'", op));
        }
        auto name = word();
        if (name.empty()) fail("expected a sentence");
        if (name == "not") {
            expect('(');
            auto inner = sentence();
            expect(')');
            return KpiSentence::negate(std::move(inner));
        }
        expect('>');
        return KpiSentence::atom(std::move(name), number());
    }

    std::string word() {
        skip_space();
        auto start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    double number() {
        skip_space();
        double v = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
        if (ec != std::errc{}) fail("expected a number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return v;
    }

    void expect(char c) {
        skip_space();
        if (peek() != c) fail(fmt::format("expected '{}'", c));
        ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        raise(ErrorCode::kParseError, fmt::format("kpi sentence, offset {}: {}", pos_, what));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

KpiSentence parse_sentence(std::string_view text) { return Parser(text).parse(); }

BranchModelSet::BranchModelSet(std::vector<BranchModel> models) : models_(std::move(models)) {
    if (models_.empty()) raise(ErrorCode::kEmptyBranchSet, "a model set needs at least one branch");
    std::set<std::string> seen;
    for (const auto& m : models_) {
        if (!seen.insert(m.branch).second) {
            raise(ErrorCode::kDuplicateBranch, fmt::format("branch '{}' appears twice", m.branch));
        }
    }
}

bool eval_classical(const KpiSentence& s, const BranchModel& m) {
    return std::visit(Overload{
                          [&](const KpiSentence::Atom& a) {
                              auto it = m.kpi_values.find(a.kpi);
                              if (it == m.kpi_values.end()) {
                                  raise(ErrorCode::kUnknownKpi,
                                        fmt::format("branch '{}' has no kpi '{}'", m.branch, a.kpi));
                              }
                              return it->second > a.threshold;
                          },
                          [&](const KpiSentence::Not& n) { return !eval_classical(*n.operand, m); },
                          [&](const KpiSentence::And& a) {
                              // Both sides are evaluated so a missing kpi always surfaces.
                              bool l = eval_classical(*a.lhs, m);
                              bool r = eval_classical(*a.rhs, m);
                              return l && r;
                          },
                          [&](const KpiSentence::Or& o) {
                              bool l = eval_classical(*o.lhs, m);
                              bool r = eval_classical(*o.rhs, m);
                              return l || r;
                          },
                      },
                      s.node());
}

SupervalResult eval_superval(const KpiSentence& s, const BranchModelSet& models) {
    SupervalResult r;
    for (const auto& m : models.models()) (eval_classical(s, m) ? r.true_plus : r.true_minus) = true;
    if (r.true_plus && r.true_minus) {
        r.verdict = Verdict::kGlut;
    } else {
        r.verdict = r.true_plus ? Verdict::kDefinitelyTrue : Verdict::kDefinitelyFalse;
    }
    return r;
}

}  // namespace branchlake::superval
