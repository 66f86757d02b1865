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
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "branchlake/plan.hpp"

namespace branchlake::rel {

/// Where Scan and BranchUnion leaves get their data.
class TableSource {
public:
    virtual ~TableSource() = default;

    virtual Schema schema(const std::string& table) = 0;
    virtual TablePtr scan(const std::string& table) = 0;
    /// (branch, table) pairs in ascending branch order.
    virtual std::vector<std::pair<std::string, TablePtr>> variants(const std::string& table) = 0;
};

/// In-memory source keyed by table name.
class MapTableSource : public TableSource {
public:
    void add(std::string name, TablePtr table);
    void add_variant(const std::string& name, std::string branch, TablePtr table);

    Schema schema(const std::string& table) override;
    TablePtr scan(const std::string& table) override;
    std::vector<std::pair<std::string, TablePtr>> variants(const std::string& table) override;

private:
    std::map<std::string, TablePtr> tables_;
    std::map<std::string, std::map<std::string, TablePtr>> variants_;
};

/// Results of branch-independent subplans, keyed by structural hash. Lives
/// for one query.
class SubplanMemo {
public:
    std::optional<TablePtr> find(std::uint64_t key) const;
    void put(std::uint64_t key, TablePtr table);
    std::size_t hits() const { return hits_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::uint64_t, TablePtr> entries_;
    mutable std::size_t hits_ = 0;
};

/// Output schema of the plan, validating every operator bottom-up.
/// Raises TypeError (or UnknownTable from the source).
Schema infer_schema(const PlanNode& plan, TableSource& source);

/// Type-checks, then runs the plan. With a memo, subplans without a
/// BranchUnion below them are computed once per memo.
TablePtr execute(const PlanNode& plan, TableSource& source, SubplanMemo* memo = nullptr);

}  // namespace branchlake::rel
