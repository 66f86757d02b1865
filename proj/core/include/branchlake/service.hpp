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

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "branchlake/catalog.hpp"
#include "branchlake/error.hpp"

namespace branchlake::service {

struct Response {
    int status = 200;
    nlohmann::json body;
};

/// HTTP status for a library error code.
int status_for(ErrorCode code);

/// The API's request handlers, independent of any socket. Each request reads
/// one immutable snapshot; regeneration swaps it atomically.
class Service {
public:
    struct Options {
        std::filesystem::path catalog_root;
        bool admin = false;
    };

    /// Loads the catalog when one exists; a missing catalog answers 503.
    explicit Service(Options options);

    std::shared_ptr<const catalog::CatalogSnapshot> snapshot() const;

    /// GET /api/v1/branches
    Response get_branches() const;
    /// POST /api/v1/query
    Response post_query(std::string_view body) const;
    /// GET /api/v1/questions
    Response get_questions() const;
    /// POST /api/v1/admin/generate: regenerates the catalog from a GenConfig
    /// body. Replaces everything under the catalog root.
    Response post_admin_generate(std::string_view body);

private:
    void swap_in(std::shared_ptr<const catalog::CatalogSnapshot> next);

    Options options_;
    mutable std::mutex snapshot_mu_;
    std::shared_ptr<const catalog::CatalogSnapshot> snapshot_;
    std::mutex admin_mu_;
};

/// Serves a Service over HTTP under /api/v1 with CORS enabled.
class HttpServer {
public:
    explicit HttpServer(Service& service, std::string cors_origin = "*");
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds (port 0 picks a free port) and returns the bound port. Raises IoError.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind.
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace branchlake::service
