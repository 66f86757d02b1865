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

#include <nlohmann/json.hpp>

#include "branchlake/catalog.hpp"
#include "branchlake/datagen.hpp"
#include "branchlake/engine.hpp"
#include "branchlake/question.hpp"

// JSON wire format shared by the service, the CLI, and the bench output.
namespace branchlake::wire {

using nlohmann::json;

/// {"id": "Q4", "tau": 0.02}; parameters are omitted for Q1 and Q7.
json to_json(const question::QuerySpec& spec);
/// Missing parameters take their defaults, except Q5's user_id. Raises
/// BadRequest on malformed input, UnsupportedQuestion, BadParameter.
question::QuerySpec spec_from_json(const json& j);

json to_json(const engine::ExecutionReport& report);
json to_json(const superval::NumberSummary& s);
json to_json(const superval::ListDiff& d);

/// The full query response: result kind, per-branch payload, overlay, report.
json to_json(const engine::MultiBranchResult& result);

/// Templates with typed slot defaults, plus ids grouped by result kind.
json templates_json();

/// Branch graph: nodes with parent, commit and table hashes, edges to
/// parents, and the tables whose hash is the same on every branch holding them.
json branch_graph(const catalog::CatalogManifest& manifest);

json to_json(const datagen::GenConfig& config);
/// Fields override the defaults. `branch_count` expands to agent names when
/// `branches` is absent. Raises BadConfig.
datagen::GenConfig gen_config_from_json(const json& j);

}  // namespace branchlake::wire
