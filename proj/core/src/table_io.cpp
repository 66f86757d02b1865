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

#include "branchlake/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "branchlake/error.hpp"

namespace branchlake::io {

using rel::Column;
using rel::DataType;

namespace {

bool needs_quotes(std::string_view s) {
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view s) {
    if (!needs_quotes(s)) {
        out += s;
        return;
    }
    out += '"';
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void append_cell(std::string& out, const Column& c, std::size_t row) {
    switch (rel::type_of(c)) {
    case DataType::kInt64: {
        char buf[24];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), std::get<rel::Int64Column>(c)[row]);
        out.append(buf, end);
        break;
    }
    case DataType::kFloat64: {
        char buf[40];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), std::get<rel::Float64Column>(c)[row]);
        out.append(buf, end);
        break;
    }
    case DataType::kBool: out += std::get<rel::BoolColumn>(c)[row] ? "true" : "false"; break;
    case DataType::kString: append_field(out, std::get<rel::StringColumn>(c)[row]); break;
    }
}

// Splits the input into records. Quoted fields are unescaped into scratch
// storage; returned views stay valid until the next call.
class RecordReader {
public:
    explicit RecordReader(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    std::size_t line() const { return line_; }

    const std::vector<std::string_view>& next() {
        fields_.clear();
        spans_.clear();
        scratch_.clear();
        ++line_;
        while (true) {
            if (pos_ < text_.size() && text_[pos_] == '"') {
                std::size_t start = scratch_.size();
                ++pos_;
                while (true) {
                    if (pos_ >= text_.size()) {
                        raise(ErrorCode::kParseError, fmt::format("unterminated quoted field on line {}", line_));
                    }
                    char c = text_[pos_++];
                    if (c != '"') {
                        scratch_ += c;
                    } else if (pos_ < text_.size() && text_[pos_] == '"') {
                        scratch_ += '"';
                        ++pos_;
                    } else {
                        break;
                    }
                }
                spans_.push_back({true, start, scratch_.size() - start});
            } else {
                std::size_t start = pos_;
                while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\r' && text_[pos_] != '\n') {
                    if (text_[pos_] == '"') {
                        raise(ErrorCode::kParseError, fmt::format("stray quote on line {}", line_));
                    }
                    ++pos_;
                }
                spans_.push_back({false, start, pos_ - start});
            }
            if (pos_ < text_.size() && text_[pos_] == ',') {
                ++pos_;
                continue;
            }
            if (pos_ < text_.size() && text_[pos_] == '\r') ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '\n') {
                ++pos_;
            } else if (pos_ < text_.size()) {
                raise(ErrorCode::kParseError, fmt::format("malformed field on line {}", line_));
            }
            break;
        }
        for (const auto& sp : spans_) {
            fields_.push_back(sp.unescaped ? std::string_view(scratch_).substr(sp.offset, sp.length)
                                           : text_.substr(sp.offset, sp.length));
        }
        return fields_;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
    struct Span {
        bool unescaped;
        std::size_t offset;
        std::size_t length;
    };
    std::vector<Span> spans_;
    std::vector<std::string_view> fields_;
    std::string scratch_;
};

template <typename T>
T parse_number(std::string_view s, std::size_t line) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        raise(ErrorCode::kParseError, fmt::format("bad number '{}' on line {}", s, line));
    }
    return v;
}

}  // namespace

std::string encode_csv(const rel::ColumnarTable& table) {
    std::string out;
    const auto& schema = table.schema();
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (c) out += ',';
        append_field(out, schema[c].name);
    }
    out += "\r\n";
    out.reserve(out.size() + table.row_count() * (schema.size() * 10 + 2));
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        for (std::size_t c = 0; c < schema.size(); ++c) {
            if (c) out += ',';
            append_cell(out, table.column(c), r);
        }
        out += "\r\n";
    }
    return out;
}

rel::ColumnarTable decode_csv(std::string_view text, const rel::Schema& schema) {
    schema.validate();
    RecordReader reader(text);
    if (reader.done()) raise(ErrorCode::kParseError, "missing CSV header");
    const auto& header = reader.next();
    if (header.size() != schema.size()) {
        raise(ErrorCode::kSchemaError,
              fmt::format("CSV header has {} columns, schema has {}", header.size(), schema.size()));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (header[c] != schema[c].name) {
            raise(ErrorCode::kSchemaError,
                  fmt::format("CSV column {} is '{}', schema says '{}'", c, header[c], schema[c].name));
        }
    }
    std::vector<Column> cols;
    for (const auto& def : schema.columns()) cols.push_back(rel::make_column(def.type));
    while (!reader.done()) {
        const auto& f = reader.next();
        if (f.size() == 1 && f[0].empty() && schema.size() != 1) continue;  // blank line
        if (f.size() != schema.size()) {
            raise(ErrorCode::kParseError,
                  fmt::format("line {} has {} fields, expected {}", reader.line(), f.size(), schema.size()));
        }
        for (std::size_t c = 0; c < f.size(); ++c) {
            switch (schema[c].type) {
            case DataType::kInt64:
                std::get<rel::Int64Column>(cols[c]).push_back(parse_number<std::int64_t>(f[c], reader.line()));
                break;
            case DataType::kFloat64:
                std::get<rel::Float64Column>(cols[c]).push_back(parse_number<double>(f[c], reader.line()));
                break;
            case DataType::kBool:
                if (f[c] == "true") {
                    std::get<rel::BoolColumn>(cols[c]).push_back(1);
                } else if (f[c] == "false") {
                    std::get<rel::BoolColumn>(cols[c]).push_back(0);
                } else {
                    raise(ErrorCode::kParseError, fmt::format("bad bool '{}' on line {}", f[c], reader.line()));
                }
                break;
            case DataType::kString: std::get<rel::StringColumn>(cols[c]).emplace_back(f[c]); break;
            }
        }
    }
    return rel::ColumnarTable(schema, std::move(cols));
}

std::string encode_schema_json(const rel::Schema& schema) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : schema.columns()) {
        cols.push_back({{"name", c.name}, {"type", std::string(rel::type_name(c.type))}});
    }
    return nlohmann::json{{"columns", cols}}.dump() + "\n";
}

rel::Schema decode_schema_json(std::string_view text) {
    try {
        auto j = nlohmann::json::parse(text);
        std::vector<rel::ColumnDef> defs;
        for (const auto& c : j.at("columns")) {
            defs.push_back({c.at("name").get<std::string>(), rel::parse_type(c.at("type").get<std::string>())});
        }
        rel::Schema schema(std::move(defs));
        schema.validate();
        return schema;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::kSchemaError, fmt::format("bad schema file: {}", e.what()));
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::kIoError, fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) raise(ErrorCode::kIoError, fmt::format("cannot create '{}': {}", path.parent_path().string(), ec.message()));
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(ErrorCode::kIoError, fmt::format("cannot write '{}'", tmp.string()));
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) raise(ErrorCode::kIoError, fmt::format("short write to '{}'", tmp.string()));
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) raise(ErrorCode::kIoError, fmt::format("cannot rename into '{}': {}", path.string(), ec.message()));
}

}  // namespace branchlake::io
