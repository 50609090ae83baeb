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

// Benchmark orchestration and the two metrics: response time (with the
// static preprocessing overhead reported on its own) and aggregation
// correctness. Also hosts the in-memory oracle used to verify the streaming
// query path.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cxbench/generator.hpp"
#include "cxbench/workload.hpp"
#include "cxbench/xmlio.hpp"

namespace cxbench::harness {

namespace fs = std::filesystem;

enum class CheckStatus : std::uint8_t { pass, fail, na };
std::string_view to_string(CheckStatus s);

struct CheckResult {
  CheckStatus status = CheckStatus::na;
  std::string detail;
};

struct CorrectnessReport {
  /// No two groups share a key.
  CheckResult duplicates;
  /// Support counts add up to the fact count, the cube's grand totals match a
  /// recount and, for SUM, the group values add up to the grand total.
  CheckResult grand_total;
  /// AVG values equal group sum over group count.
  CheckResult average;
  /// MIN/MAX values bound every contributing measure and are attained.
  CheckResult min_max;

  bool ok() const;
};

/// Visits every fact of a warehouse joined with its instances.
using FactSource = std::function<void(const std::function<void(const xmlio::JoinedFact&)>&)>;
FactSource facts_of(const fs::path& dir);
FactSource facts_of(const Warehouse& wh);

/// Checks `cube` against a recount over the warehouse the cube was computed
/// from. Group membership in the recount is resolved independently of the
/// engines: a level's values are read across rows (preferring an inserted
/// fused level), placeholder labels are dropped and fused labels split.
CorrectnessReport check_correctness(const workload::ResultCube& cube, const DwModel& model,
                                    const FactSource& facts, const workload::Query& q,
                                    double rel_tol = 1e-9);
CorrectnessReport check_correctness(const workload::ResultCube& cube, const fs::path& dir,
                                    const workload::Query& q);

inline constexpr std::size_t kOracleMaxFacts = 10'000;

/// Reference cube by full materialization: every fact's set-valued group key
/// is built, facts are bucketed in an ordered map and each bucket is
/// aggregated from its complete list of measure values. Throws
/// OracleScopeError above kOracleMaxFacts facts.
workload::ResultCube oracle_cube(const Warehouse& wh, const workload::Query& q);
workload::ResultCube oracle_cube(const fs::path& dir, const workload::Query& q);

/// Parameters of a generated dataset, read back from generator.json when
/// present.
struct DatasetInfo {
  std::string label;
  std::string regime;
  std::uint64_t facts = 0;
  int incomplete_pct = 0;
  int nonstrict_pct = 0;
  int nonstrict_num = 0;
};
DatasetInfo dataset_info(const fs::path& dir);

struct RunReport {
  DatasetInfo dataset;
  std::string engine;
  std::string matching;
  std::string query;
  double load_ms = 0;
  double overhead_ms = 0;
  double query_ms = 0;
  workload::QueryTiming phases;
  std::uint64_t groups = 0;
  CorrectnessReport correctness;
  /// Set when the cell failed; the other fields are then incomplete.
  std::string error;
};

inline constexpr std::string_view kCsvHeader =
    "dataset,regime,facts,incomplete_pct,nonstrict_pct,nonstrict_num,engine,matching,query,"
    "load_ms,overhead_ms,query_ms,read_ms,resolve_ms,match_ms,agg_ms,groups,chk_dup,chk_grand,"
    "chk_avg,chk_minmax";

void write_csv_row(std::ostream& out, const RunReport& r);

struct CellOptions {
  int warmup = 1;
  int repetitions = 3;
  bool instrument = false;
  bool check = true;
};

/// Runs one (dataset, engine, matching, query) cell: warm-up runs are
/// discarded, the reported times are those of the median run by query time,
/// and the cube of that run is checked for correctness.
RunReport run_cell(const fs::path& dir, const DatasetInfo& dataset, workload::Engine engine,
                   workload::Matching matching, const workload::Query& q, const CellOptions& options,
                   double overhead_ms = 0);

/// A campaign: every hierarchy setting at every fact count, crossed with
/// engines, matching strategies and queries.
struct HierarchySetting {
  std::string label;
  int incomplete = 0;
  int nonstrict = 0;
  int nonstrict_number = 4;
};

struct CampaignMatrix {
  fs::path workdir = "campaign-data";
  std::uint64_t seed = 42;
  std::vector<std::uint64_t> facts;
  std::vector<HierarchySetting> hierarchies;
  std::vector<workload::Engine> engines;
  std::vector<workload::Matching> matching;
  std::vector<std::string> queries;
  CellOptions cell;
  /// Runs the cells of a dataset concurrently; timings are then unreliable.
  bool parallel = false;
  std::optional<fs::path> workload_file;
};

/// Parses the JSON matrix format described in the README. Relative paths are
/// taken relative to `base`.
CampaignMatrix parse_matrix(std::string_view json, const fs::path& base = {});
CampaignMatrix load_matrix(const fs::path& file);

struct DatasetSize {
  DatasetInfo info;
  std::uintmax_t total_bytes = 0;
  std::vector<std::pair<std::string, std::uintmax_t>> documents;
};

std::vector<std::pair<std::string, std::uintmax_t>> document_sizes(const fs::path& dir);

struct CampaignResult {
  std::vector<RunReport> rows;
  std::vector<DatasetSize> sizes;
};

/// Generates (or reuses) each dataset, transforms it when the pedersen engine
/// is in the matrix, runs every cell and writes one CSV row per cell to
/// `report`. Dataset sizes go to `<report stem>.sizes.csv` as a table with
/// one row per hierarchy setting and one column per fact count, in KB.
CampaignResult run_campaign(const CampaignMatrix& matrix, const fs::path& report,
                            std::ostream* progress = nullptr);

}  // namespace cxbench::harness
