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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "branchlake/table.hpp"

namespace branchlake::catalog {

inline constexpr std::string_view kMainBranch = "main";
inline constexpr std::string_view kManifestFile = "catalog.json";
inline constexpr int kManifestVersion = 1;

/// Nonempty, characters in [a-z0-9_-]. Also used for table names.
bool is_valid_name(std::string_view name) noexcept;

struct TableRef {
    std::string table_name;
    std::string file;          // relative to the catalog root
    std::string content_hash;  // FNV-1a 64 over the file bytes, 16 hex digits
    std::string schema_file;

    bool operator==(const TableRef&) const = default;
};

struct BranchInfo {
    std::optional<std::string> parent;
    std::string commit;
    std::map<std::string, TableRef> tables;

    bool operator==(const BranchInfo&) const = default;
};

struct CatalogManifest {
    int version = kManifestVersion;
    std::map<std::string, BranchInfo> branches;

    bool has_branch(std::string_view name) const { return branches.contains(std::string(name)); }
    /// Raises UnknownBranch.
    const BranchInfo& branch(std::string_view name) const;
    std::vector<std::string> branch_names() const;

    bool operator==(const CatalogManifest&) const = default;
};

/// FNV-1a 64 over the table map as sorted `name=hash\n` lines.
std::string commit_id(const std::map<std::string, TableRef>& tables);

/// Deterministic JSON: keys in lexicographic order, two-space indent.
std::string serialize_manifest(const CatalogManifest& manifest);
/// Parses and validates. Raises ParseError.
CatalogManifest parse_manifest(std::string_view text);
/// Checks names, commit ids, and that parent links are acyclic and end at main.
void validate_manifest(const CatalogManifest& manifest);

/// Copy-on-write fork: `name` gets `from`'s table refs. Raises UnknownBranch,
/// DuplicateBranch, InvalidName.
CatalogManifest fork_branch(CatalogManifest manifest, const std::string& name, const std::string& from);
/// Table-granularity merge where the source's refs win.
CatalogManifest merge_into(CatalogManifest manifest, const std::string& src, const std::string& dst);

struct TableVariants {
    std::map<std::string, TableRef> per_branch;
    /// True iff every variant has the same content hash.
    bool shared = true;
};

/// Variants across every branch holding the table. Raises UnknownTable.
TableVariants resolve_variants(const CatalogManifest& manifest, const std::string& table);
/// Variants across the given branches, each of which must hold the table.
TableVariants resolve_variants(const CatalogManifest& manifest, const std::string& table,
                               std::span<const std::string> branches);

/// Loads table files, checking content hashes, and caches decoded tables by
/// hash. Thread-safe.
class TableStore {
public:
    explicit TableStore(std::filesystem::path root) : root_(std::move(root)) {}

    rel::TablePtr load(const TableRef& ref);
    /// In-memory payload of the decoded table, computed once per hash.
    std::size_t byte_size(const TableRef& ref);
    std::size_t files_read() const;

private:
    std::filesystem::path root_;
    mutable std::mutex mu_;
    struct Entry {
        rel::TablePtr table;
        std::size_t bytes = 0;
    };
    const Entry& entry(const TableRef& ref);

    std::map<std::string, Entry> cache_;
    std::size_t files_read_ = 0;
};

/// A catalog directory opened for reading and writing. Every mutation is
/// persisted to catalog.json before returning; one writer at a time.
class Catalog {
public:
    /// Creates root (if needed) with a manifest holding an empty main branch.
    /// Raises AlreadyExists or IoError.
    static Catalog init(const std::filesystem::path& root);
    /// Raises NoCatalog when catalog.json is missing.
    static Catalog open(const std::filesystem::path& root);

    const std::filesystem::path& root() const { return root_; }
    const CatalogManifest& manifest() const { return manifest_; }

    const CatalogManifest& create_branch(const std::string& name, const std::string& from);
    /// Writes the table under the branch's data directory and repoints the
    /// branch at it. Raises UnknownBranch, SchemaError, IoError.
    const CatalogManifest& write_table(const std::string& branch, const std::string& table_name,
                                       const rel::ColumnarTable& rows);
    const CatalogManifest& merge_branch(const std::string& src, const std::string& dst);

    /// Reads and hash-checks the branch's table. Raises UnknownTable, HashMismatch.
    rel::ColumnarTable read_table(const std::string& branch, const std::string& table_name) const;

private:
    Catalog(std::filesystem::path root, CatalogManifest manifest)
        : root_(std::move(root)), manifest_(std::move(manifest)) {}

    void commit(CatalogManifest next);

    std::filesystem::path root_;
    CatalogManifest manifest_;
};

/// Immutable point-in-time view of a catalog that engines query.
class CatalogSnapshot {
public:
    CatalogSnapshot(std::filesystem::path root, CatalogManifest manifest);

    /// Loads the manifest; with `preload`, decodes every referenced table so
    /// later file changes cannot affect this snapshot.
    static std::shared_ptr<const CatalogSnapshot> load(const std::filesystem::path& root, bool preload = false);

    const std::filesystem::path& root() const { return root_; }
    const CatalogManifest& manifest() const { return manifest_; }

    rel::TablePtr table(const TableRef& ref) const { return store_->load(ref); }
    std::size_t table_bytes(const TableRef& ref) const { return store_->byte_size(ref); }
    const TableStore& store() const { return *store_; }

private:
    std::filesystem::path root_;
    CatalogManifest manifest_;
    std::shared_ptr<TableStore> store_;
};

}  // namespace branchlake::catalog
