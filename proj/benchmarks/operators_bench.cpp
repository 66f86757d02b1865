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

#include <random>

#include <benchmark/benchmark.h>

#include "branchlake/executor.hpp"

namespace {

using namespace branchlake::rel;

TablePtr random_table(std::size_t rows, std::int64_t keys, std::uint64_t seed, const std::string& suffix) {
    std::mt19937_64 rng(seed);
    Int64Column k(rows), v(rows);
    BoolColumn f(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        k[i] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(keys));
        v[i] = static_cast<std::int64_t>(rng() % 1000);
        f[i] = rng() % 4 == 0;
    }
    Schema schema{{"k" + suffix, DataType::kInt64}, {"v" + suffix, DataType::kInt64}, {"f" + suffix, DataType::kBool}};
    return std::make_shared<const ColumnarTable>(std::move(schema),
                                                 std::vector<Column>{std::move(k), std::move(v), std::move(f)});
}

void BM_FilterCount(benchmark::State& state) {
    MapTableSource src;
    src.add("t", random_table(static_cast<std::size_t>(state.range(0)), 1000, 1, ""));
    auto plan = aggregate(filter(scan("t"), col("f")), {}, {count("n")});
    for (auto _ : state) benchmark::DoNotOptimize(execute(*plan, src));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FilterCount)->Range(1 << 12, 1 << 18);

void BM_GroupBy(benchmark::State& state) {
    MapTableSource src;
    src.add("t", random_table(static_cast<std::size_t>(state.range(0)), 1000, 2, ""));
    auto plan = aggregate(scan("t"), {"k"}, {count("n"), sum("v", "s")});
    for (auto _ : state) benchmark::DoNotOptimize(execute(*plan, src));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GroupBy)->Range(1 << 12, 1 << 18);

void BM_HashJoin(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    MapTableSource src;
    src.add("l", random_table(n, static_cast<std::int64_t>(n), 3, ""));
    src.add("r", random_table(n / 4, static_cast<std::int64_t>(n), 4, "2"));
    auto plan = hash_join(scan("l"), scan("r"), {"k"}, {"k2"});
    for (auto _ : state) benchmark::DoNotOptimize(execute(*plan, src));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HashJoin)->Range(1 << 12, 1 << 18);

void BM_WindowRank(benchmark::State& state) {
    MapTableSource src;
    src.add("t", random_table(static_cast<std::size_t>(state.range(0)), 3, 5, ""));
    auto plan = window_rank(scan("t"), {"k"}, "v", true, "f", "r");
    for (auto _ : state) benchmark::DoNotOptimize(execute(*plan, src));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WindowRank)->Range(1 << 12, 1 << 18);

}  // namespace
