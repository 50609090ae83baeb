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

// Seeded warehouse generation in the four hierarchy regimes.
//
// Every fact gets four fresh dimension instances (part, customer, supplier,
// date). Non-strictness replaces an instance's single row by an array of
// rows; incompleteness removes level values from rows. Which instances are
// affected is decided by a stratified draw: the candidates are split into
// consecutive blocks of round(100 / percentage) and one uniformly chosen
// member of every full block is selected.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "cxbench/model.hpp"
#include "cxbench/random.hpp"

namespace cxbench::gen {

enum class Regime : std::uint8_t { simple, incomplete, nonstrict, complex };

std::string_view to_string(Regime r);

/// How many rows a non-strict instance receives.
enum class NonstrictRows : std::uint8_t {
  exact,    ///< exactly nonstrict_number rows
  uniform,  ///< uniform in [2, nonstrict_number]
};

struct GeneratorConfig {
  std::uint64_t fact_number = 0;
  int incomplete_percentage = 0;
  int nonstrict_percentage = 0;
  int nonstrict_number = 4;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir;
  NonstrictRows rows_mode = NonstrictRows::exact;
  /// Also let customer instances be multi-valued at nation level.
  bool customer_nonstrict = false;

  /// Throws ConfigError for combinations outside the four regimes.
  Regime regime() const;
};

/// Probability that one pass of incompleteness generation removes a given
/// level, and that complex generation picks a given row.
inline constexpr double kRemovalProbability = 0.5;

/// Stratified selection over [0, total): one uniform index per full block of
/// round(100 / percentage) consecutive indices. Sorted ascending.
std::vector<std::size_t> select_targets(std::size_t total, int percentage, Rng& rng);

/// Removes at least one present level value from the instance. Each pass
/// visits every present level and removes it with kRemovalProbability; passes
/// repeat until something was removed. On a multi-row instance a selected
/// level is removed from every row.
DimensionInstance gen_incomplete(DimensionInstance inst, const DimensionSchema& schema, Rng& rng);

/// Same removal procedure on a single row.
void remove_levels(LevelRow& row, const DimensionSchema& schema, Rng& rng);

/// Replaces the instance's rows by `rows` fresh uniform level assignments.
/// Throws EligibilityError on dimensions that cannot be multi-valued.
DimensionInstance gen_nonstrict(int rows, DimensionInstance inst, const DimensionSchema& schema,
                                Rng& rng, const ValuePools& pools = value_pools());

/// Passes a random non-empty subset of the rows through remove_levels.
DimensionInstance gen_complex(DimensionInstance ns, const DimensionSchema& schema, Rng& rng);

/// A fresh complete row for the dimension.
LevelRow draw_row(const DimensionSchema& schema, Rng& rng, const ValuePools& pools = value_pools());

/// Global instance index: fact-major, dimensions in model order.
struct SelectionLog {
  std::vector<std::size_t> nonstrict;
  std::vector<std::size_t> incomplete;
};

struct GenerationResult {
  Warehouse warehouse;
  SelectionLog selection;
};

/// Builds the warehouse in memory. Pure function of (cfg, model).
GenerationResult build_warehouse(const GeneratorConfig& cfg, const DwModel& model);

/// Builds the warehouse and writes its six documents into cfg.output_dir,
/// plus a `generator.json` record of the configuration.
GenerationResult generate_warehouse(const GeneratorConfig& cfg, const DwModel& model);

}  // namespace cxbench::gen
