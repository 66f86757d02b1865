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

#include "branchlake/wire.hpp"

#include <set>

#include <fmt/format.h>

#include "branchlake/error.hpp"

namespace branchlake::wire {

using question::QuerySpec;

namespace {

template <class... Fs>
struct Overload : Fs... {
    using Fs::operator()...;
};

template <typename T>
T field(const json& j, const char* name, ErrorCode code) {
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        raise(code, fmt::format("field '{}': {}", name, e.what()));
    }
}

template <typename T>
T field_or(const json& j, const char* name, T fallback, ErrorCode code) {
    return j.contains(name) ? field<T>(j, name, code) : fallback;
}

}  // namespace

json to_json(const QuerySpec& spec) {
    json j{{"id", spec.id()}};
    std::visit(Overload{
                   [](const question::Q1&) {},
                   [&](const question::Q2& q) { j["interest"] = q.interest; },
                   [&](const question::Q3& q) {
                       j["segments"] = q.segments;
                       j["k"] = q.k;
                   },
                   [&](const question::Q4& q) { j["tau"] = q.tau; },
                   [&](const question::Q5& q) { j["user_id"] = q.user_id; },
                   [&](const question::Q6& q) { j["k"] = q.k; },
                   [](const question::Q7&) {},
               },
               spec.question);
    return j;
}

QuerySpec spec_from_json(const json& j) {
    constexpr auto kBad = ErrorCode::kBadRequest;
    if (!j.is_object()) raise(kBad, "spec must be an object");
    auto spec = question::default_spec(field<std::string>(j, "id", kBad));
    std::visit(Overload{
                   [](question::Q1&) {},
                   [&](question::Q2& q) { q.interest = field_or(j, "interest", q.interest, kBad); },
                   [&](question::Q3& q) {
                       q.segments = field_or(j, "segments", q.segments, kBad);
                       q.k = field_or(j, "k", q.k, kBad);
                   },
                   [&](question::Q4& q) { q.tau = field_or(j, "tau", q.tau, kBad); },
                   [&](question::Q5& q) {
                       if (!j.contains("user_id")) raise(ErrorCode::kBadParameter, "Q5 needs a user_id");
                       q.user_id = field<std::int64_t>(j, "user_id", kBad);
                   },
                   [&](question::Q6& q) { q.k = field_or(j, "k", q.k, kBad); },
                   [](question::Q7&) {},
               },
               spec.question);
    question::validate(spec);
    return spec;
}

json to_json(const engine::ExecutionReport& r) {
    return json{
        {"engine", engine::engine_name(r.engine)},
        {"branches_total", r.branches_total},
        {"branches_evaluated", r.branches_evaluated},
        {"shared_tables_scanned_once", r.shared_tables_scanned_once},
        {"wall_time_ms", r.wall_time_ms},
        {"table_scans", r.table_scans},
        {"bytes_scanned", r.bytes_scanned},
    };
}

json to_json(const superval::NumberSummary& s) {
    return json{{"per_branch", s.per_branch}, {"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"unanimous", s.unanimous}};
}

json to_json(const superval::ListDiff& d) {
    return json{{"per_branch", d.per_branch}, {"consensus", d.consensus}, {"exclusive", d.exclusive}};
}

json to_json(const engine::MultiBranchResult& r) {
    json j{
        {"spec", to_json(r.spec)},
        {"question", question::describe(r.spec).question},
        {"result_kind", question::kind_name(r.result_kind)},
        {"branches", r.branches},
        {"report", to_json(r.report)},
    };
    std::visit(Overload{
                   [&](const superval::NumberSummary& s) {
                       j["per_branch"] = s.per_branch;
                       j["overlay"] = to_json(s);
                   },
                   [&](const engine::BooleanOverlay& o) {
                       j["per_branch"] = o.per_branch;
                       j["overlay"] = json{{"verdict", superval::verdict_name(o.verdict)},
                                           {"label", superval::verdict_label(o.verdict)},
                                           {"per_branch", o.per_branch},
                                           {"partial", o.partial}};
                   },
                   [&](const engine::ListOverlay& o) {
                       j["per_branch"] = o.diff.per_branch;
                       j["overlay"] = to_json(o.diff);
                       if (o.undecided) j["overlay"]["undecided"] = *o.undecided;
                   },
               },
               r.overlay);
    return j;
}

json templates_json() {
    json list = json::array();
    json groups = json::object();
    for (const auto& t : question::templates()) {
        json slots = json::array();
        for (const auto& s : t.slots) {
            json slot{{"name", s.name}, {"type", s.type}};
            if (!s.default_value) {
                slot["default"] = nullptr;
            } else if (s.type == "percent") {
                slot["default"] = question::parse_rate(*s.default_value);
            } else if (s.type == "integer") {
                slot["default"] = std::stoll(*s.default_value);
            } else if (s.type == "string list") {
                slot["default"] = json::array({*s.default_value});
            } else {
                slot["default"] = *s.default_value;
            }
            if (s.default_value) slot["default_text"] = *s.default_value;
            slots.push_back(std::move(slot));
        }
        auto kind = std::string(question::kind_name(t.result_kind));
        list.push_back({{"id", t.id}, {"result_kind", kind}, {"canonical", t.canonical}, {"pattern", t.pattern},
                        {"slots", std::move(slots)}});
        groups[kind].push_back(t.id);
    }
    return json{{"templates", std::move(list)}, {"groups", std::move(groups)}};
}

json branch_graph(const catalog::CatalogManifest& m) {
    json nodes = json::array();
    json edges = json::array();
    std::map<std::string, std::set<std::string>> hashes;
    for (const auto& [name, info] : m.branches) {
        json tables = json::object();
        for (const auto& [t, ref] : info.tables) {
            tables[t] = {{"content_hash", ref.content_hash}, {"file", ref.file}};
            hashes[t].insert(ref.content_hash);
        }
        nodes.push_back({{"id", name},
                         {"parent", info.parent ? json(*info.parent) : json(nullptr)},
                         {"commit", info.commit},
                         {"tables", std::move(tables)}});
        if (info.parent) edges.push_back({{"from", name}, {"to", *info.parent}});
    }
    json shared = json::array();
    for (const auto& [t, hs] : hashes) {
        if (hs.size() == 1) shared.push_back(t);
    }
    return json{{"version", m.version}, {"branches", std::move(nodes)}, {"edges", std::move(edges)},
                {"shared_tables", std::move(shared)}};
}

json to_json(const datagen::GenConfig& c) {
    json segments = json::array();
    for (const auto& s : c.segments) segments.push_back({{"name", s.name}, {"proportion", s.proportion}});
    return json{{"seed", c.seed},          {"n_users", c.n_users}, {"branches", c.branches},
                {"base_rate", c.base_rate}, {"jitter", c.jitter},   {"segments", std::move(segments)},
                {"interests", c.interests}};
}

datagen::GenConfig gen_config_from_json(const json& j) {
    constexpr auto kBad = ErrorCode::kBadConfig;
    if (!j.is_object()) raise(kBad, "generator config must be an object");
    datagen::GenConfig c;
    c.seed = field_or(j, "seed", c.seed, kBad);
    c.n_users = field_or(j, "n_users", c.n_users, kBad);
    if (j.contains("branches")) {
        c.branches = field<std::vector<std::string>>(j, "branches", kBad);
    } else {
        auto count = field_or<std::int64_t>(j, "branch_count", 50, kBad);
        if (count < 1) raise(kBad, "branch_count must be at least 1");
        c.branches = datagen::branch_names(static_cast<std::size_t>(count));
    }
    c.base_rate = field_or(j, "base_rate", c.base_rate, kBad);
    c.jitter = field_or(j, "jitter", c.jitter, kBad);
    if (j.contains("segments")) {
        c.segments.clear();
        const auto& segs = j.at("segments");
        if (!segs.is_array()) raise(kBad, "segments must be an array");
        for (const auto& s : segs) {
            c.segments.push_back({field<std::string>(s, "name", kBad), field<double>(s, "proportion", kBad)});
        }
    }
    c.interests = field_or(j, "interests", c.interests, kBad);
    datagen::validate(c);
    return c;
}

}  // namespace branchlake::wire
