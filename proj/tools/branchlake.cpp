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

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "branchlake/bench.hpp"
#include "branchlake/datagen.hpp"
#include "branchlake/engine.hpp"
#include "branchlake/error.hpp"
#include "branchlake/kpi.hpp"
#include "branchlake/question.hpp"
#include "branchlake/service.hpp"
#include "branchlake/wire.hpp"

namespace {

using namespace branchlake;
namespace fs = std::filesystem;

branchlake::service::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

std::vector<question::QuerySpec> parse_questions(const std::vector<std::string>& ids) {
    std::vector<question::QuerySpec> out;
    for (const auto& id : ids) out.push_back(question::default_spec(id));
    return out;
}

// "a:revenue=120,cost=3" -> BranchModel
superval::BranchModel parse_model(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) raise(ErrorCode::kBadParameter, fmt::format("model '{}' needs 'branch:kpi=value'", text));
    superval::BranchModel m{text.substr(0, colon), {}};
    std::string rest = text.substr(colon + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
        auto comma = rest.find(',', start);
        auto item = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        auto eq = item.find('=');
        if (eq == std::string::npos) raise(ErrorCode::kBadParameter, fmt::format("bad kpi assignment '{}'", item));
        m.kpi_values[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"branchlake: ask one question across every branch of a catalog"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Generate a synthetic catalog");
    datagen::GenConfig gen_config;
    std::int64_t gen_branches = 50;
    fs::path gen_out;
    gen->add_option("--seed", gen_config.seed, "Generator seed")->capture_default_str();
    gen->add_option("--users", gen_config.n_users, "Rows in the users table")->capture_default_str();
    gen->add_option("--branches", gen_branches, "Number of agent branches")->capture_default_str();
    gen->add_option("--base-rate", gen_config.base_rate, "Mean conversion rate")->capture_default_str();
    gen->add_option("--jitter", gen_config.jitter, "Per-branch rate spread")->capture_default_str();
    gen->add_option("--out", gen_out, "Catalog directory (must be empty or absent)")->required();

    auto* bench_cmd = app.add_subcommand("bench", "Time both engines across branch counts");
    bench::BenchConfig bench_config;
    fs::path bench_catalog, bench_out = "results";
    std::vector<std::string> bench_questions = {"q1", "q3", "q4"};
    bench_cmd->add_option("--catalog", bench_catalog, "Catalog directory")->required();
    bench_cmd->add_option("--branch-counts", bench_config.branch_counts, "Branch counts")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--repeats", bench_config.repeats, "Timed runs per cell")->capture_default_str();
    bench_cmd->add_option("--warmups", bench_config.warmups, "Untimed runs per cell")->capture_default_str();
    bench_cmd->add_option("--questions", bench_questions, "Question ids")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--out", bench_out, "Output directory")->capture_default_str();

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    fs::path serve_catalog;
    std::string host = "127.0.0.1", cors = "*";
    int port = 8080;
    bool admin = false;
    serve->add_option("--catalog", serve_catalog, "Catalog directory")->required();
    serve->add_option("--port", port, "Port (0 picks one)")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--cors-origin", cors, "Allowed console origin")->capture_default_str();
    serve->add_flag("--admin", admin, "Enable POST /api/v1/admin/generate (replaces the catalog)");

    auto* questions = app.add_subcommand("questions", "Question templates");
    questions->require_subcommand(1);
    auto* q_list = questions->add_subcommand("list", "List the supported templates");
    auto* q_compile = questions->add_subcommand("compile", "Compile a question into a spec");
    std::string compile_text;
    q_compile->add_option("text", compile_text, "Question text")->required();

    auto* query = app.add_subcommand("query", "Ask a question across branches");
    fs::path query_catalog;
    std::string query_text, query_spec, query_engine = "native";
    std::vector<std::string> query_branches;
    bool query_full = false, query_table = false;
    query->add_option("--catalog", query_catalog, "Catalog directory")->required();
    auto* q_opt = query->add_option("--question", query_text, "Question text");
    query->add_option("--spec", query_spec, "Spec as JSON, e.g. {\"id\":\"Q4\",\"tau\":0.03}")->excludes(q_opt);
    query->add_option("--engine", query_engine, "adhoc or native")->capture_default_str();
    query->add_option("--branches", query_branches, "Branches (default: all eligible)")->delimiter(',');
    query->add_flag("--full", query_full, "Evaluate every branch of a boolean question");
    query->add_flag("--table", query_table, "Print the branch-tagged result table instead of JSON");

    auto* branches_cmd = app.add_subcommand("branches", "Print the branch graph");
    fs::path branches_catalog;
    branches_cmd->add_option("--catalog", branches_catalog, "Catalog directory")->required();

    auto* kpi = app.add_subcommand("kpi", "Evaluate a KPI sentence over branch models");
    std::string sentence;
    std::vector<std::string> models;
    kpi->add_option("--sentence", sentence, "e.g. \"(revenue > 100 or not (revenue > -1))\"")->required();
    kpi->add_option("--model", models, "branch:kpi=value[,kpi=value] (repeatable)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            gen_config.branches = datagen::branch_names(static_cast<std::size_t>(std::max<std::int64_t>(gen_branches, 0)));
            auto m = datagen::generate(gen_config, gen_out);
            fmt::print("wrote {} branches ({} users) to {}\n", m.branches.size() - 1, gen_config.n_users, gen_out.string());
        } else if (*bench_cmd) {
            bench_config.questions = parse_questions(bench_questions);
            bench_config.progress = [](const std::string& line) { fmt::print(stderr, "  {}\n", line); };
            auto snap = catalog::CatalogSnapshot::load(bench_catalog, true);
            auto results = bench::run_bench(bench_config, *snap);
            for (const auto& p : bench::write_results(results, bench_out)) fmt::print("wrote {}\n", p.string());
            auto plots = bench::emit_plots(results, bench_out);
            for (const auto& p : plots.files) fmt::print("wrote {}\n", p.string());
            fmt::print("\nMedian latency (ms) by engine and branch count\n\n{}\n{}", bench::format_table(results), plots.ascii);
        } else if (*serve) {
            service::Service svc({serve_catalog, admin});
            service::HttpServer server(svc, cors);
            int bound = server.bind(host, port);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            fmt::print("serving {} on http://{}:{}/api/v1{}\n", serve_catalog.string(), host, bound,
                       admin ? " (admin enabled)" : "");
            std::fflush(stdout);
            server.serve();
            g_server = nullptr;
        } else if (*q_list) {
            for (const auto& t : question::templates()) {
                fmt::print("{}  [{}]  {}\n", t.id, question::kind_name(t.result_kind), t.canonical);
                if (t.pattern != t.canonical) fmt::print("      pattern: {}\n", t.pattern);
                for (const auto& s : t.slots) {
                    fmt::print("      {} ({}), default {}\n", s.name, s.type, s.default_value.value_or("required"));
                }
            }
        } else if (*q_compile) {
            auto spec = question::compile(compile_text);
            auto d = question::describe(spec);
            fmt::print("{}\n{}\n\n{}\n", wire::to_json(spec).dump(), d.question, d.plan_sketch);
        } else if (*query) {
            auto snap = catalog::CatalogSnapshot::load(query_catalog);
            question::QuerySpec spec = !query_text.empty()  ? question::compile(query_text)
                                       : !query_spec.empty() ? wire::spec_from_json(wire::json::parse(query_spec))
                                                             : throw CLI::RequiredError("--question or --spec");
            auto result = engine::run(spec, *snap, query_branches, engine::parse_engine(query_engine),
                                      {.short_circuit = !query_full});
            if (query_table && result.table) {
                fmt::print("{}", rel::format_table(*result.table, 200));
            } else {
                fmt::print("{}\n", wire::to_json(result).dump(2));
            }
        } else if (*branches_cmd) {
            auto cat = catalog::Catalog::open(branches_catalog);
            fmt::print("{}\n", wire::branch_graph(cat.manifest()).dump(2));
        } else if (*kpi) {
            std::vector<superval::BranchModel> parsed;
            for (const auto& m : models) parsed.push_back(parse_model(m));
            auto s = superval::parse_sentence(sentence);
            auto r = superval::eval_superval(s, superval::BranchModelSet(parsed));
            for (const auto& m : parsed) fmt::print("{}: {}\n", m.branch, superval::eval_classical(s, m));
            fmt::print("true+ {}  true- {}  verdict {}\n", r.true_plus, r.true_minus, superval::verdict_name(r.verdict));
        }
    } catch (const Error& e) {
        fmt::print(stderr, "error [{}]: {}\n", error_code_name(e.code()), e.what());
        return 2;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
