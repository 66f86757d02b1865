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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace branchlake::rel {

/// Name of the column the multi-branch engines inject to tag rows with their
/// branch. User schemas may not contain it.
inline constexpr std::string_view kBranchColumn = "__branch_id";

// Variant indices of Value and Column follow this order.
enum class DataType { kInt64 = 0, kFloat64 = 1, kBool = 2, kString = 3 };

std::string_view type_name(DataType type);
DataType parse_type(std::string_view name);

using Value = std::variant<std::int64_t, double, bool, std::string>;

inline DataType type_of(const Value& v) { return static_cast<DataType>(v.index()); }
std::string value_to_string(const Value& v);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

using Int64Column = std::vector<std::int64_t>;
using Float64Column = std::vector<double>;
using BoolColumn = std::vector<std::uint8_t>;
using StringColumn = std::vector<std::string>;
using Column = std::variant<Int64Column, Float64Column, BoolColumn, StringColumn>;
using ColumnPtr = std::shared_ptr<const Column>;

inline DataType type_of(const Column& c) { return static_cast<DataType>(c.index()); }
std::size_t column_size(const Column& c);
Column make_column(DataType type);
Column gather(const Column& c, std::span<const std::size_t> rows);
Value value_at(const Column& c, std::size_t row);
void append_value(Column& c, const Value& v);

struct ColumnDef {
    std::string name;
    DataType type;

    bool operator==(const ColumnDef&) const = default;
};

class Schema {
public:
    Schema() = default;
    Schema(std::initializer_list<ColumnDef> columns) : columns_(columns) {}
    explicit Schema(std::vector<ColumnDef> columns) : columns_(std::move(columns)) {}

    const std::vector<ColumnDef>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }
    const ColumnDef& operator[](std::size_t i) const { return columns_[i]; }

    std::optional<std::size_t> index_of(std::string_view name) const;
    /// Like index_of but raises TypeError naming the missing column.
    std::size_t require(std::string_view name) const;
    bool contains(std::string_view name) const { return index_of(name).has_value(); }

    /// Raises SchemaError on empty or duplicate names.
    void validate() const;

    bool operator==(const Schema&) const = default;

private:
    std::vector<ColumnDef> columns_;
};

/// Immutable column-major table. All columns share row_count.
class ColumnarTable {
public:
    ColumnarTable() = default;
    ColumnarTable(Schema schema, std::vector<ColumnPtr> columns);
    ColumnarTable(Schema schema, std::vector<Column> columns);

    /// Row-wise construction, mostly for tests and small results.
    static ColumnarTable from_rows(Schema schema, const std::vector<std::vector<Value>>& rows);

    const Schema& schema() const { return schema_; }
    std::size_t row_count() const { return row_count_; }
    std::size_t num_columns() const { return columns_.size(); }

    const Column& column(std::size_t i) const { return *columns_[i]; }
    const Column& column(std::string_view name) const { return *columns_[schema_.require(name)]; }
    const ColumnPtr& column_ptr(std::size_t i) const { return columns_[i]; }

    Value value(std::size_t row, std::size_t col) const { return value_at(*columns_[col], row); }
    std::vector<Value> row(std::size_t r) const;

    /// Approximate in-memory payload: 8 bytes per numeric, 1 per bool, string lengths.
    std::size_t byte_size() const;

    /// Exact value equality, including schema and row order.
    bool operator==(const ColumnarTable& other) const;

private:
    Schema schema_;
    std::vector<ColumnPtr> columns_;
    std::size_t row_count_ = 0;
};

using TablePtr = std::shared_ptr<const ColumnarTable>;

/// Value equality with floats compared at an absolute-or-relative tolerance.
bool approx_equal(const ColumnarTable& a, const ColumnarTable& b, double tolerance);

/// Fixed-width text rendering, truncated to max_rows.
std::string format_table(const ColumnarTable& table, std::size_t max_rows = 20);

template <typename T>
const std::vector<T>& as(const Column& c) {
    return std::get<std::vector<T>>(c);
}

}  // namespace branchlake::rel
