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

#include "branchlake/error.hpp"

namespace branchlake {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kAlreadyExists: return "AlreadyExists";
    case ErrorCode::kNoCatalog: return "NoCatalog";
    case ErrorCode::kInvalidName: return "InvalidName";
    case ErrorCode::kUnknownBranch: return "UnknownBranch";
    case ErrorCode::kDuplicateBranch: return "DuplicateBranch";
    case ErrorCode::kUnknownTable: return "UnknownTable";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kHashMismatch: return "HashMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kTypeError: return "TypeError";
    case ErrorCode::kDivideByZero: return "DivideByZero";
    case ErrorCode::kEmptyAggregate: return "EmptyAggregate";
    case ErrorCode::kUnsupportedQuestion: return "UnsupportedQuestion";
    case ErrorCode::kUnrecognizedQuestion: return "UnrecognizedQuestion";
    case ErrorCode::kBadParameter: return "BadParameter";
    case ErrorCode::kEmptyBranchSet: return "EmptyBranchSet";
    case ErrorCode::kNotBooleanQuestion: return "NotBooleanQuestion";
    case ErrorCode::kUnknownKpi: return "UnknownKpi";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kBadRequest: return "BadRequest";
    case ErrorCode::kEngineMismatch: return "EngineMismatch";
    }
    return "Unknown";
}

void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace branchlake
