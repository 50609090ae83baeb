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

// Benchmark queries and the streaming group-by that answers them.
//
// A query run reads the facts document once, joins each fact with the
// instances of the grouped dimensions, resolves the fact's group key with the
// chosen engine, locates the group (group matching) and folds the measures
// into it. Group matching is pluggable: `scan` compares the key component by
// component against every existing group, `hash` looks it up by digest.

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cxbench/group_key.hpp"
#include "cxbench/model.hpp"

namespace cxbench::workload {

enum class AggregateFn : std::uint8_t { sum, min, max, avg };

std::string_view to_string(AggregateFn fn);
std::optional<AggregateFn> parse_aggregate(std::string_view text);

struct Query {
  std::string id;
  AggregateFn aggregate = AggregateFn::sum;
  std::vector<MeasureId> measures;
  std::vector<GroupBy> grouping;

  /// Throws QueryError when a grouped dimension repeats or a level is not in
  /// the model.
  void validate(const DwModel& model) const;
};

/// Q21-Q24 followed by the 1D-4D group-by queries D1-D4.
std::vector<Query> standard_workload();

/// One query per line: `ID FN MEASURES GROUPING`, where MEASURES and
/// GROUPING are comma-separated, a grouping item is `dim.level` or a bare
/// `dim` for instance identity, and `-` stands for no grouping. `#` starts a
/// comment.
std::vector<Query> parse_workload(std::string_view text);
std::vector<Query> load_workload(const std::filesystem::path& file);

/// Looks a query up by id; throws QueryError when absent.
const Query& find_query(const std::vector<Query>& queries, std::string_view id);

struct Accumulator {
  std::int64_t sum = 0;
  std::int64_t min = std::numeric_limits<std::int64_t>::max();
  std::int64_t max = std::numeric_limits<std::int64_t>::min();
  std::int64_t count = 0;

  friend bool operator==(const Accumulator&, const Accumulator&) = default;
};

struct CubeEntry {
  GroupKey key;
  /// One per query measure.
  std::vector<Accumulator> acc;
  std::uint64_t support = 0;
};

/// Folds one measure instance per accumulator. Only the state `fn` needs is
/// maintained; AVG keeps (sum, count) and is finalized by ResultCube::value.
void aggregate_step(CubeEntry& entry, std::span<const std::int64_t> values, AggregateFn fn);

struct ResultCube {
  AggregateFn aggregate = AggregateFn::sum;
  std::vector<MeasureId> measures;
  std::vector<CubeEntry> entries;
  /// Sum of each measure over all facts, fixed point.
  std::vector<std::int64_t> grand_totals;
  std::uint64_t fact_count = 0;

  /// Final aggregate of measure `m` (index into `measures`) in natural units.
  double value(const CubeEntry& e, std::size_t m) const;
  const CubeEntry* find(const GroupKey& key) const;
};

/// Empty when equal. Otherwise a description of the first difference. AVG
/// values compare within `avg_rel_tol`, everything else exactly.
std::optional<std::string> cube_difference(const ResultCube& a, const ResultCube& b,
                                           double avg_rel_tol = 1e-9);

/// Renders the cube sorted by key, one group per line.
std::string format_cube(const ResultCube& cube);

enum class Matching : std::uint8_t { scan, hash };
std::string_view to_string(Matching m);
std::optional<Matching> parse_matching(std::string_view text);

/// Groups of one cube under construction, indexed per the matching strategy.
class GroupTable {
 public:
  GroupTable(ResultCube& cube, Matching strategy) : cube_(cube), strategy_(strategy) {}

  /// Index of the entry for `key`, creating it when new.
  std::size_t match(GroupKey key);

 private:
  ResultCube& cube_;
  Matching strategy_;
  std::unordered_map<GroupKey, std::size_t, GroupKeyHash> index_;
};

enum class Engine : std::uint8_t {
  qbs,       ///< query-time resolution on raw data
  pedersen,  ///< reads statically transformed data
  naive,     ///< negative control: every non-strict row counted on its own
};
std::string_view to_string(Engine e);
std::optional<Engine> parse_engine(std::string_view text);

struct QueryTiming {
  double total_ms = 0;
  /// Phase split, only measured in instrumented runs.
  bool instrumented = false;
  double read_ms = 0;
  double resolve_ms = 0;
  double match_ms = 0;
  double agg_ms = 0;
};

struct QueryResult {
  ResultCube cube;
  QueryTiming timing;
};

struct RunOptions {
  bool instrument = false;
};

/// Runs one query over the warehouse stored at `dir`. Throws ConfigError when
/// the pedersen engine meets untransformed data.
QueryResult run_query(const Query& q, const std::filesystem::path& dir, Engine engine,
                      Matching matching, RunOptions options = {});

}  // namespace cxbench::workload
