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

#include "branchlake/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <set>

#include "branchlake/error.hpp"

namespace branchlake::rel {

std::string_view type_name(DataType type) {
    switch (type) {
    case DataType::kInt64: return "int64";
    case DataType::kFloat64: return "float64";
    case DataType::kBool: return "bool";
    case DataType::kString: return "string";
    }
    return "?";
}

DataType parse_type(std::string_view name) {
    if (name == "int64") return DataType::kInt64;
    if (name == "float64") return DataType::kFloat64;
    if (name == "bool") return DataType::kBool;
    if (name == "string") return DataType::kString;
    raise(ErrorCode::kSchemaError, fmt::format("unknown column type '{}'", name));
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::string value_to_string(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(x);
            } else if constexpr (std::is_same_v<T, double>) {
                return format_double(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else {
                return x;
            }
        },
        v);
}

std::size_t column_size(const Column& c) {
    return std::visit([](const auto& v) { return v.size(); }, c);
}

Column make_column(DataType type) {
    switch (type) {
    case DataType::kInt64: return Int64Column{};
    case DataType::kFloat64: return Float64Column{};
    case DataType::kBool: return BoolColumn{};
    case DataType::kString: return StringColumn{};
    }
    return Int64Column{};
}

Column gather(const Column& c, std::span<const std::size_t> rows) {
    return std::visit(
        [&](const auto& v) -> Column {
            std::decay_t<decltype(v)> out;
            out.reserve(rows.size());
            for (auto r : rows) out.push_back(v[r]);
            return out;
        },
        c);
}

Value value_at(const Column& c, std::size_t row) {
    switch (type_of(c)) {
    case DataType::kInt64: return std::get<Int64Column>(c)[row];
    case DataType::kFloat64: return std::get<Float64Column>(c)[row];
    case DataType::kBool: return std::get<BoolColumn>(c)[row] != 0;
    case DataType::kString: return std::get<StringColumn>(c)[row];
    }
    return std::int64_t{0};
}

void append_value(Column& c, const Value& v) {
    if (type_of(c) != type_of(v)) {
        raise(ErrorCode::kTypeError, fmt::format("cannot append {} value to {} column",
                                                 type_name(type_of(v)), type_name(type_of(c))));
    }
    switch (type_of(c)) {
    case DataType::kInt64: std::get<Int64Column>(c).push_back(std::get<std::int64_t>(v)); break;
    case DataType::kFloat64: std::get<Float64Column>(c).push_back(std::get<double>(v)); break;
    case DataType::kBool: std::get<BoolColumn>(c).push_back(std::get<bool>(v) ? 1 : 0); break;
    case DataType::kString: std::get<StringColumn>(c).push_back(std::get<std::string>(v)); break;
    }
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t Schema::require(std::string_view name) const {
    if (auto i = index_of(name)) return *i;
    raise(ErrorCode::kTypeError, fmt::format("unknown column '{}'", name));
}

void Schema::validate() const {
    std::set<std::string_view> seen;
    for (const auto& c : columns_) {
        if (c.name.empty()) raise(ErrorCode::kSchemaError, "empty column name");
        if (!seen.insert(c.name).second) {
            raise(ErrorCode::kSchemaError, fmt::format("duplicate column '{}'", c.name));
        }
    }
}

ColumnarTable::ColumnarTable(Schema schema, std::vector<ColumnPtr> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
    schema_.validate();
    if (columns_.size() != schema_.size()) {
        raise(ErrorCode::kSchemaError,
              fmt::format("schema has {} columns but {} were supplied", schema_.size(), columns_.size()));
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (type_of(*columns_[i]) != schema_[i].type) {
            raise(ErrorCode::kSchemaError,
                  fmt::format("column '{}' declared {} but holds {}", schema_[i].name,
                              type_name(schema_[i].type), type_name(type_of(*columns_[i]))));
        }
        auto n = column_size(*columns_[i]);
        if (i == 0) {
            row_count_ = n;
        } else if (n != row_count_) {
            raise(ErrorCode::kSchemaError,
                  fmt::format("column '{}' has {} rows, expected {}", schema_[i].name, n, row_count_));
        }
    }
}

namespace {

std::vector<ColumnPtr> share(std::vector<Column> columns) {
    std::vector<ColumnPtr> out;
    out.reserve(columns.size());
    for (auto& c : columns) out.push_back(std::make_shared<const Column>(std::move(c)));
    return out;
}

}  // namespace

ColumnarTable::ColumnarTable(Schema schema, std::vector<Column> columns)
    : ColumnarTable(std::move(schema), share(std::move(columns))) {}

ColumnarTable ColumnarTable::from_rows(Schema schema, const std::vector<std::vector<Value>>& rows) {
    std::vector<Column> cols;
    cols.reserve(schema.size());
    for (const auto& def : schema.columns()) cols.push_back(make_column(def.type));
    for (const auto& row : rows) {
        if (row.size() != schema.size()) {
            raise(ErrorCode::kSchemaError, fmt::format("row has {} values, schema has {} columns",
                                                       row.size(), schema.size()));
        }
        for (std::size_t i = 0; i < row.size(); ++i) append_value(cols[i], row[i]);
    }
    return ColumnarTable(std::move(schema), std::move(cols));
}

std::vector<Value> ColumnarTable::row(std::size_t r) const {
    std::vector<Value> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(value_at(*c, r));
    return out;
}

std::size_t ColumnarTable::byte_size() const {
    std::size_t total = 0;
    for (const auto& c : columns_) {
        std::visit(
            [&](const auto& v) {
                using T = typename std::decay_t<decltype(v)>::value_type;
                if constexpr (std::is_same_v<T, std::string>) {
                    for (const auto& s : v) total += s.size();
                } else {
                    total += v.size() * sizeof(T);
                }
            },
            *c);
    }
    return total;
}

bool ColumnarTable::operator==(const ColumnarTable& other) const {
    if (schema_ != other.schema_ || row_count_ != other.row_count_) return false;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i] != other.columns_[i] && *columns_[i] != *other.columns_[i]) return false;
    }
    return true;
}

bool approx_equal(const ColumnarTable& a, const ColumnarTable& b, double tolerance) {
    if (a.schema() != b.schema() || a.row_count() != b.row_count()) return false;
    for (std::size_t i = 0; i < a.num_columns(); ++i) {
        if (a.schema()[i].type != DataType::kFloat64) {
            if (a.column(i) != b.column(i)) return false;
            continue;
        }
        const auto& x = as<double>(a.column(i));
        const auto& y = as<double>(b.column(i));
        for (std::size_t r = 0; r < x.size(); ++r) {
            double scale = std::max({1.0, std::abs(x[r]), std::abs(y[r])});
            if (std::abs(x[r] - y[r]) > tolerance * scale) return false;
        }
    }
    return true;
}

std::string format_table(const ColumnarTable& table, std::size_t max_rows) {
    const auto& schema = table.schema();
    std::size_t shown = std::min(max_rows, table.row_count());
    std::vector<std::vector<std::string>> cells(shown + 1);
    std::vector<std::size_t> widths(schema.size(), 0);
    for (std::size_t c = 0; c < schema.size(); ++c) {
        cells[0].push_back(schema[c].name);
        widths[c] = schema[c].name.size();
    }
    for (std::size_t r = 0; r < shown; ++r) {
        for (std::size_t c = 0; c < schema.size(); ++c) {
            cells[r + 1].push_back(value_to_string(table.value(r, c)));
            widths[c] = std::max(widths[c], cells[r + 1].back().size());
        }
    }
    std::string out;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
            if (c) out += "  ";
            out += fmt::format("{:<{}}", cells[r][c], widths[c]);
        }
        out += '\n';
    }
    if (shown < table.row_count()) out += fmt::format("... {} more rows\n", table.row_count() - shown);
    return out;
}

}  // namespace branchlake::rel
