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

#include "branchlake/catalog.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "branchlake/error.hpp"
#include "branchlake/hash.hpp"
#include "branchlake/table_io.hpp"

namespace branchlake::catalog {

namespace fs = std::filesystem;
using nlohmann::json;

bool is_valid_name(std::string_view name) noexcept {
    return !name.empty() && std::ranges::all_of(name, [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

const BranchInfo& CatalogManifest::branch(std::string_view name) const {
    auto it = branches.find(std::string(name));
    if (it == branches.end()) raise(ErrorCode::kUnknownBranch, fmt::format("unknown branch '{}'", name));
    return it->second;
}

std::vector<std::string> CatalogManifest::branch_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : branches) out.push_back(name);
    return out;
}

std::string commit_id(const std::map<std::string, TableRef>& tables) {
    Fnv1a h;
    for (const auto& [name, ref] : tables) {
        h.update(name).update("=").update(ref.content_hash).update("\n");
    }
    return to_hex16(h.digest());
}

std::string serialize_manifest(const CatalogManifest& manifest) {
    json branches = json::object();
    for (const auto& [name, info] : manifest.branches) {
        json tables = json::object();
        for (const auto& [tname, ref] : info.tables) {
            tables[tname] = {{"table_name", ref.table_name},
                             {"file", ref.file},
                             {"content_hash", ref.content_hash},
                             {"schema_file", ref.schema_file}};
        }
        branches[name] = {{"parent", info.parent ? json(*info.parent) : json(nullptr)},
                          {"commit", info.commit},
                          {"tables", tables}};
    }
    json doc = {{"version", manifest.version}, {"branches", branches}};
    return doc.dump(2) + "\n";
}

CatalogManifest parse_manifest(std::string_view text) {
    CatalogManifest m;
    try {
        auto doc = json::parse(text);
        m.version = doc.at("version").get<int>();
        for (const auto& [name, b] : doc.at("branches").items()) {
            BranchInfo info;
            if (!b.at("parent").is_null()) info.parent = b.at("parent").get<std::string>();
            info.commit = b.at("commit").get<std::string>();
            for (const auto& [tname, t] : b.at("tables").items()) {
                info.tables[tname] = TableRef{t.at("table_name").get<std::string>(), t.at("file").get<std::string>(),
                                              t.at("content_hash").get<std::string>(),
                                              t.at("schema_file").get<std::string>()};
            }
            m.branches[name] = std::move(info);
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::kParseError, fmt::format("malformed catalog manifest: {}", e.what()));
    }
    if (m.version != kManifestVersion) {
        raise(ErrorCode::kParseError, fmt::format("unsupported manifest version {}", m.version));
    }
    validate_manifest(m);
    return m;
}

void validate_manifest(const CatalogManifest& m) {
    if (!m.has_branch(kMainBranch)) raise(ErrorCode::kParseError, "manifest has no main branch");
    if (m.branch(kMainBranch).parent) raise(ErrorCode::kParseError, "main must not have a parent");
    for (const auto& [name, info] : m.branches) {
        if (!is_valid_name(name)) raise(ErrorCode::kInvalidName, fmt::format("invalid branch name '{}'", name));
        if (info.commit != commit_id(info.tables)) {
            raise(ErrorCode::kParseError, fmt::format("branch '{}' commit id does not match its tables", name));
        }
        for (const auto& [tname, ref] : info.tables) {
            if (tname != ref.table_name || !is_hex16(ref.content_hash)) {
                raise(ErrorCode::kParseError, fmt::format("malformed table ref '{}' on branch '{}'", tname, name));
            }
        }
        // Walk to main; more steps than branches means a cycle.
        std::string cur = name;
        std::size_t steps = 0;
        while (cur != kMainBranch) {
            const auto& b = m.branch(cur);
            if (!b.parent) raise(ErrorCode::kParseError, fmt::format("branch '{}' has no parent", cur));
            if (!m.has_branch(*b.parent)) {
                raise(ErrorCode::kParseError, fmt::format("branch '{}' has unknown parent '{}'", cur, *b.parent));
            }
            cur = *b.parent;
            if (++steps > m.branches.size()) {
                raise(ErrorCode::kParseError, fmt::format("parent cycle through branch '{}'", name));
            }
        }
    }
}

CatalogManifest fork_branch(CatalogManifest manifest, const std::string& name, const std::string& from) {
    if (!is_valid_name(name)) raise(ErrorCode::kInvalidName, fmt::format("invalid branch name '{}'", name));
    const auto& src = manifest.branch(from);
    if (manifest.has_branch(name)) raise(ErrorCode::kDuplicateBranch, fmt::format("branch '{}' exists", name));
    BranchInfo info;
    info.parent = from;
    info.tables = src.tables;
    info.commit = commit_id(info.tables);
    manifest.branches.emplace(name, std::move(info));
    return manifest;
}

CatalogManifest merge_into(CatalogManifest manifest, const std::string& src, const std::string& dst) {
    const auto& from = manifest.branch(src);
    manifest.branch(dst);
    auto& into = manifest.branches.at(dst);
    for (const auto& [name, ref] : from.tables) into.tables[name] = ref;
    into.commit = commit_id(into.tables);
    return manifest;
}

TableVariants resolve_variants(const CatalogManifest& manifest, const std::string& table) {
    std::vector<std::string> holders;
    for (const auto& [name, info] : manifest.branches) {
        if (info.tables.contains(table)) holders.push_back(name);
    }
    if (holders.empty()) raise(ErrorCode::kUnknownTable, fmt::format("no branch holds table '{}'", table));
    return resolve_variants(manifest, table, holders);
}

TableVariants resolve_variants(const CatalogManifest& manifest, const std::string& table,
                               std::span<const std::string> branches) {
    if (branches.empty()) raise(ErrorCode::kEmptyBranchSet, "no branches selected");
    TableVariants out;
    std::set<std::string_view> hashes;
    for (const auto& b : branches) {
        const auto& info = manifest.branch(b);
        auto it = info.tables.find(table);
        if (it == info.tables.end()) {
            raise(ErrorCode::kUnknownTable, fmt::format("branch '{}' has no table '{}'", b, table));
        }
        out.per_branch[b] = it->second;
    }
    for (const auto& [_, ref] : out.per_branch) hashes.insert(ref.content_hash);
    out.shared = hashes.size() == 1;
    return out;
}

rel::TablePtr TableStore::load(const TableRef& ref) { return entry(ref).table; }

std::size_t TableStore::byte_size(const TableRef& ref) { return entry(ref).bytes; }

const TableStore::Entry& TableStore::entry(const TableRef& ref) {
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(ref.content_hash); it != cache_.end()) return it->second;
    }
    auto bytes = io::read_file(root_ / ref.file);
    auto actual = to_hex16(fnv1a64(bytes));
    if (actual != ref.content_hash) {
        raise(ErrorCode::kHashMismatch, fmt::format("'{}' hashes to {}, manifest says {}", ref.file, actual,
                                                    ref.content_hash));
    }
    auto schema = io::decode_schema_json(io::read_file(root_ / ref.schema_file));
    if (schema.contains(rel::kBranchColumn)) {
        raise(ErrorCode::kSchemaError, fmt::format("table '{}' uses reserved column '{}'", ref.table_name,
                                                   rel::kBranchColumn));
    }
    auto table = std::make_shared<const rel::ColumnarTable>(io::decode_csv(bytes, schema));
    auto size = table->byte_size();
    std::lock_guard lock(mu_);
    ++files_read_;
    // std::map nodes are stable, so the reference outlives the lock.
    return cache_.emplace(ref.content_hash, Entry{std::move(table), size}).first->second;
}

std::size_t TableStore::files_read() const {
    std::lock_guard lock(mu_);
    return files_read_;
}

Catalog Catalog::init(const fs::path& root) {
    std::error_code ec;
    if (fs::exists(root / kManifestFile, ec)) {
        raise(ErrorCode::kAlreadyExists, fmt::format("catalog already exists at '{}'", root.string()));
    }
    if (fs::exists(root, ec) && !fs::is_empty(root, ec)) {
        raise(ErrorCode::kIoError, fmt::format("'{}' is not empty", root.string()));
    }
    CatalogManifest m;
    m.branches[std::string(kMainBranch)] = BranchInfo{std::nullopt, commit_id({}), {}};
    io::write_file(root / kManifestFile, serialize_manifest(m));
    return Catalog(root, std::move(m));
}

Catalog Catalog::open(const fs::path& root) {
    std::error_code ec;
    if (!fs::exists(root / kManifestFile, ec)) {
        raise(ErrorCode::kNoCatalog, fmt::format("no catalog at '{}'", root.string()));
    }
    return Catalog(root, parse_manifest(io::read_file(root / kManifestFile)));
}

void Catalog::commit(CatalogManifest next) {
    io::write_file(root_ / kManifestFile, serialize_manifest(next));
    manifest_ = std::move(next);
}

const CatalogManifest& Catalog::create_branch(const std::string& name, const std::string& from) {
    commit(fork_branch(manifest_, name, from));
    return manifest_;
}

const CatalogManifest& Catalog::write_table(const std::string& branch, const std::string& table_name,
                                            const rel::ColumnarTable& rows) {
    manifest_.branch(branch);
    if (!is_valid_name(table_name)) {
        raise(ErrorCode::kInvalidName, fmt::format("invalid table name '{}'", table_name));
    }
    rows.schema().validate();
    if (rows.schema().contains(rel::kBranchColumn)) {
        raise(ErrorCode::kSchemaError, fmt::format("column name '{}' is reserved", rel::kBranchColumn));
    }
    auto bytes = io::encode_csv(rows);
    auto hash = to_hex16(fnv1a64(bytes));
    // Content-addressed, so files referenced by other branches are never overwritten.
    auto dir = fmt::format("data/{}/{}", branch, hash);
    TableRef ref{table_name, fmt::format("{}/{}.csv", dir, table_name), hash,
                 fmt::format("{}/{}.schema.json", dir, table_name)};
    io::write_file(root_ / ref.file, bytes);
    io::write_file(root_ / ref.schema_file, io::encode_schema_json(rows.schema()));

    auto next = manifest_;
    auto& info = next.branches.at(branch);
    info.tables[table_name] = ref;
    info.commit = commit_id(info.tables);
    commit(std::move(next));
    return manifest_;
}

const CatalogManifest& Catalog::merge_branch(const std::string& src, const std::string& dst) {
    commit(merge_into(manifest_, src, dst));
    return manifest_;
}

rel::ColumnarTable Catalog::read_table(const std::string& branch, const std::string& table_name) const {
    const auto& info = manifest_.branch(branch);
    auto it = info.tables.find(table_name);
    if (it == info.tables.end()) {
        raise(ErrorCode::kUnknownTable, fmt::format("branch '{}' has no table '{}'", branch, table_name));
    }
    TableStore store(root_);
    return *store.load(it->second);
}

CatalogSnapshot::CatalogSnapshot(fs::path root, CatalogManifest manifest)
    : root_(std::move(root)), manifest_(std::move(manifest)), store_(std::make_shared<TableStore>(root_)) {}

std::shared_ptr<const CatalogSnapshot> CatalogSnapshot::load(const fs::path& root, bool preload) {
    auto cat = Catalog::open(root);
    auto snap = std::make_shared<const CatalogSnapshot>(root, cat.manifest());
    if (preload) {
        for (const auto& [_, info] : snap->manifest().branches) {
            for (const auto& [__, ref] : info.tables) snap->table(ref);
        }
    }
    return snap;
}

}  // namespace branchlake::catalog
