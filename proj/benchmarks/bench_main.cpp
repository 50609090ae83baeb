// Copyright 2026 The cxbench Authors
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

#include <benchmark/benchmark.h>

#include <filesystem>
#include <map>
#include <unistd.h>

#include "cxbench/generator.hpp"
#include "cxbench/group_key.hpp"
#include "cxbench/pedersen.hpp"
#include "cxbench/random.hpp"
#include "cxbench/workload.hpp"
#include "cxbench/xmlio.hpp"

namespace fs = std::filesystem;
using namespace cxbench;

namespace {

// Generated warehouses shared by every benchmark in the process, keyed by
// (facts, incomplete, nonstrict).
class Datasets {
 public:
  ~Datasets() { fs::remove_all(root_); }

  const fs::path& get(std::uint64_t facts, int inc, int ns) {
    const auto key = std::make_tuple(facts, inc, ns);
    if (auto it = dirs_.find(key); it != dirs_.end()) return it->second;
    gen::GeneratorConfig cfg;
    cfg.fact_number = facts;
    cfg.incomplete_percentage = inc;
    cfg.nonstrict_percentage = ns;
    cfg.output_dir = root_ / ("f" + std::to_string(facts) + "-i" + std::to_string(inc) + "-n" + std::to_string(ns));
    gen::generate_warehouse(cfg, default_model());
    return dirs_.emplace(key, cfg.output_dir).first->second;
  }

  const fs::path& transformed(std::uint64_t facts, int inc, int ns) {
    const auto& raw = get(facts, inc, ns);
    const auto key = std::make_tuple(facts, inc, -ns - 1);
    if (auto it = dirs_.find(key); it != dirs_.end()) return it->second;
    auto out = raw;
    out += "-pedersen";
    pedersen::transform_warehouse(raw, out);
    return dirs_.emplace(key, out).first->second;
  }

 private:
  fs::path root_ = fs::temp_directory_path() / ("cxbench-bench-" + std::to_string(::getpid()));
  std::map<std::tuple<std::uint64_t, int, int>, fs::path> dirs_;
};

Datasets& datasets() {
  static Datasets d;
  return d;
}

std::vector<GroupKey> random_keys(std::size_t n, std::size_t distinct, std::size_t width) {
  Rng rng(9);
  std::vector<GroupKey> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = rng.below(distinct);
    GroupKey k;
    for (std::size_t c = 0; c < width; ++c) {
      k.components.push_back(GroupComponent::atomic("v" + std::to_string((id >> (4 * c)) & 0xfff)));
    }
    keys.push_back(std::move(k));
  }
  return keys;
}

void BM_GroupMatch(benchmark::State& state, workload::Matching m) {
  const auto keys = random_keys(20'000, static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) {
    workload::ResultCube cube;
    workload::GroupTable table(cube, m);
    for (const auto& k : keys) benchmark::DoNotOptimize(table.match(k));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(keys.size()));
}
BENCHMARK_CAPTURE(BM_GroupMatch, scan, workload::Matching::scan)->Arg(10)->Arg(100)->Arg(1000)->Arg(5000);
BENCHMARK_CAPTURE(BM_GroupMatch, hash, workload::Matching::hash)->Arg(10)->Arg(100)->Arg(1000)->Arg(5000);

void BM_BuildWarehouse(benchmark::State& state) {
  gen::GeneratorConfig cfg;
  cfg.fact_number = static_cast<std::uint64_t>(state.range(0));
  cfg.incomplete_percentage = static_cast<int>(state.range(1));
  cfg.nonstrict_percentage = static_cast<int>(state.range(1));
  const auto m = default_model();
  for (auto _ : state) benchmark::DoNotOptimize(gen::build_warehouse(cfg, m));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildWarehouse)->Args({10'000, 0})->Args({10'000, 50})->Unit(benchmark::kMillisecond);

void BM_StreamWarehouse(benchmark::State& state) {
  const auto& dir = datasets().get(static_cast<std::uint64_t>(state.range(0)), 50, 50);
  for (auto _ : state) {
    std::size_t n = 0;
    xmlio::stream_warehouse(dir, [&](const xmlio::JoinedFact&) { ++n; });
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StreamWarehouse)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_Transform(benchmark::State& state) {
  const auto& dir = datasets().get(5'000, 50, 50);
  const auto out = dir.parent_path() / "transform-bench";
  for (auto _ : state) {
    fs::remove_all(out);
    benchmark::DoNotOptimize(pedersen::transform_warehouse(dir, out));
  }
}
BENCHMARK(BM_Transform)->Unit(benchmark::kMillisecond);

void BM_Query(benchmark::State& state, const char* id, workload::Engine engine, workload::Matching m) {
  const auto w = workload::standard_workload();
  const auto& q = workload::find_query(w, id);
  const auto& dir = engine == workload::Engine::pedersen ? datasets().transformed(5'000, 50, 50)
                                                          : datasets().get(5'000, 50, 50);
  for (auto _ : state) benchmark::DoNotOptimize(workload::run_query(q, dir, engine, m));
}
BENCHMARK_CAPTURE(BM_Query, D1_qbs_hash, "D1", workload::Engine::qbs, workload::Matching::hash)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Query, D4_qbs_hash, "D4", workload::Engine::qbs, workload::Matching::hash)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Query, D4_qbs_scan, "D4", workload::Engine::qbs, workload::Matching::scan)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Query, D4_pedersen_hash, "D4", workload::Engine::pedersen, workload::Matching::hash)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
