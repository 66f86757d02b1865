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
#include <string>
#include <string_view>

#include "branchlake/table.hpp"

namespace branchlake::io {

/// RFC-4180 CSV with a header row and CRLF line breaks. Booleans are
/// `true`/`false`; floats use the shortest round-trip decimal form.
std::string encode_csv(const rel::ColumnarTable& table);

/// Parses CSV produced by encode_csv (or any RFC-4180 text whose header
/// matches the schema). Raises ParseError or SchemaError.
rel::ColumnarTable decode_csv(std::string_view text, const rel::Schema& schema);

/// `{"columns":[{"name":...,"type":...}]}`
std::string encode_schema_json(const rel::Schema& schema);
rel::Schema decode_schema_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames into place.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace branchlake::io
