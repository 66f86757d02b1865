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

#include "branchlake/service.hpp"

#include <atomic>

#include <fmt/format.h>
#include <httplib.h>

#include "branchlake/datagen.hpp"
#include "branchlake/engine.hpp"
#include "branchlake/question.hpp"
#include "branchlake/wire.hpp"

namespace branchlake::service {

namespace fs = std::filesystem;
using nlohmann::json;

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::kUnrecognizedQuestion:
    case ErrorCode::kBadParameter:
    case ErrorCode::kBadRequest:
    case ErrorCode::kBadConfig:
    case ErrorCode::kUnsupportedQuestion:
    case ErrorCode::kEmptyBranchSet:
    case ErrorCode::kNotBooleanQuestion:
    case ErrorCode::kInvalidName:
        return 400;
    case ErrorCode::kUnknownBranch:
    case ErrorCode::kUnknownTable:
        return 404;
    case ErrorCode::kNoCatalog:
        return 503;
    default:
        return 500;
    }
}

namespace {

Response error_response(int status, std::string_view code, const std::string& message) {
    return {status, json{{"error", {{"code", code}, {"message", message}}}}};
}

Response error_response(const Error& e) {
    return error_response(status_for(e.code()), error_code_name(e.code()), e.what());
}

template <typename F>
Response guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        return error_response(e);
    } catch (const std::exception& e) {
        return error_response(500, "Internal", e.what());
    }
}

json parse_body(std::string_view body) {
    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::kBadRequest, "request body is not valid JSON");
    return j;
}

}  // namespace

Service::Service(Options options) : options_(std::move(options)) {
    std::error_code ec;
    if (fs::exists(options_.catalog_root / catalog::kManifestFile, ec)) {
        snapshot_ = catalog::CatalogSnapshot::load(options_.catalog_root, true);
    }
}

std::shared_ptr<const catalog::CatalogSnapshot> Service::snapshot() const {
    std::lock_guard lock(snapshot_mu_);
    return snapshot_;
}

void Service::swap_in(std::shared_ptr<const catalog::CatalogSnapshot> next) {
    std::lock_guard lock(snapshot_mu_);
    snapshot_ = std::move(next);
}

Response Service::get_branches() const {
    return guarded([&] {
        auto snap = snapshot();
        if (!snap) raise(ErrorCode::kNoCatalog, "no catalog loaded");
        return Response{200, wire::branch_graph(snap->manifest())};
    });
}

Response Service::post_query(std::string_view body) const {
    return guarded([&] {
        auto req = parse_body(body);
        if (!req.is_object()) raise(ErrorCode::kBadRequest, "request must be a JSON object");
        bool has_question = req.contains("question") && !req["question"].is_null();
        bool has_spec = req.contains("spec") && !req["spec"].is_null();
        if (has_question == has_spec) raise(ErrorCode::kBadRequest, "send exactly one of 'question' and 'spec'");
        if (req.contains("translator") && !req["translator"].is_null()) {
            raise(ErrorCode::kBadRequest, "external translators are not configured on this server");
        }

        question::QuerySpec spec;
        if (has_question) {
            if (!req["question"].is_string()) raise(ErrorCode::kBadRequest, "'question' must be a string");
            spec = question::compile(req["question"].get<std::string>());
        } else {
            spec = wire::spec_from_json(req["spec"]);
        }
        auto engine = engine::EngineKind::kNative;
        if (req.contains("engine")) {
            if (!req["engine"].is_string()) raise(ErrorCode::kBadRequest, "'engine' must be a string");
            engine = engine::parse_engine(req["engine"].get<std::string>());
        }
        std::vector<std::string> branches;
        bool explicit_branches = req.contains("branches") && !req["branches"].is_null();
        if (explicit_branches) {
            if (!req["branches"].is_array()) raise(ErrorCode::kBadRequest, "'branches' must be a list");
            for (const auto& b : req["branches"]) {
                if (!b.is_string()) raise(ErrorCode::kBadRequest, "branch ids must be strings");
                branches.push_back(b.get<std::string>());
            }
            if (branches.empty()) raise(ErrorCode::kEmptyBranchSet, "'branches' is empty");
        }
        engine::RunOptions options;
        if (req.contains("short_circuit")) {
            if (!req["short_circuit"].is_boolean()) raise(ErrorCode::kBadRequest, "'short_circuit' must be a boolean");
            options.short_circuit = req["short_circuit"].get<bool>();
        }

        auto snap = snapshot();
        if (!snap) raise(ErrorCode::kNoCatalog, "no catalog loaded");
        auto result = engine::run(spec, *snap, branches, engine, options);
        return Response{200, wire::to_json(result)};
    });
}

Response Service::get_questions() const {
    return guarded([] { return Response{200, wire::templates_json()}; });
}

Response Service::post_admin_generate(std::string_view body) {
    if (!options_.admin) return error_response(403, "Forbidden", "admin endpoints are disabled");
    return guarded([&] {
        auto config = wire::gen_config_from_json(parse_body(body));
        std::lock_guard lock(admin_mu_);
        const auto& root = options_.catalog_root;
        auto staging = fs::path(root.string() + ".staging");
        auto retired = fs::path(root.string() + ".retired");
        fs::remove_all(staging);
        fs::remove_all(retired);
        datagen::generate(config, staging);
        // Readers hold fully decoded snapshots, so the old files can go as
        // soon as the new directory is in place.
        std::error_code ec;
        if (fs::exists(root, ec)) fs::rename(root, retired);
        fs::rename(staging, root);
        auto next = catalog::CatalogSnapshot::load(root, true);
        swap_in(next);
        fs::remove_all(retired, ec);

        json tables = json::object();
        for (const auto& [name, info] : next->manifest().branches) {
            for (const auto& [t, ref] : info.tables) tables[name][t] = ref.content_hash;
        }
        return Response{200, json{{"branches", next->manifest().branch_names()},
                                  {"content_hashes", std::move(tables)},
                                  {"config", wire::to_json(config)}}};
    });
}

struct HttpServer::Impl {
    httplib::Server server;
    std::atomic<bool> bound{false};
};

HttpServer::HttpServer(Service& service, std::string cors_origin) : impl_(std::make_unique<Impl>()) {
    auto& srv = impl_->server;
    srv.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    srv.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    srv.Get("/api/v1/branches", [&service, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, service.get_branches());
    });
    srv.Get("/api/v1/questions", [&service, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, service.get_questions());
    });
    srv.Post("/api/v1/query", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.post_query(req.body));
    });
    srv.Post("/api/v1/admin/generate", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.post_admin_generate(req.body));
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                          : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) raise(ErrorCode::kIoError, fmt::format("cannot bind {}:{}", host, port));
    impl_->bound = true;
    return bound;
}

void HttpServer::serve() {
    if (!impl_->bound) raise(ErrorCode::kIoError, "serve() before bind()");
    impl_->server.listen_after_bind();
}

void HttpServer::stop() {
    if (impl_->bound) impl_->server.stop();
}

}  // namespace branchlake::service
