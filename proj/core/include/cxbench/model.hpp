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

// Multidimensional schema of the sales warehouse and the value types every
// other module consumes: dimension instances (a row array whose extra rows
// encode non-strictness and whose missing cells encode incompleteness),
// facts, and the vocabularies values are drawn from.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cxbench {

inline constexpr std::string_view kPart = "part";
inline constexpr std::string_view kCustomer = "customer";
inline constexpr std::string_view kSupplier = "supplier";
inline constexpr std::string_view kDate = "date";

inline constexpr std::string_view kQuantity = "f_quantity";
inline constexpr std::string_view kTotalAmount = "f_totalamount";

/// Placeholder stored in cells that static preprocessing had to fill in.
inline constexpr std::string_view kOtherValue = "Other";
/// Separator between the members of a fused value ("FRANCE+GERMANY").
inline constexpr char kFuseSeparator = '+';
/// Suffix of levels inserted to carry fused values.
inline constexpr std::string_view kFusedSuffix = "_fused";

struct DimensionSchema {
  std::string id;
  std::string path;
  /// Finest first.
  std::vector<std::string> levels;
  /// The dimension as a whole may hold several instances per fact.
  bool nonstrict_eligible = false;
  /// Levels that may carry several values for one instance.
  std::vector<std::string> nonstrict_eligible_levels;

  bool has_level(std::string_view level) const;
  std::optional<std::size_t> level_index(std::string_view level) const;
  /// Inserted fused levels (suffix `_fused`) present in the chain.
  bool is_extended() const;

  friend bool operator==(const DimensionSchema&, const DimensionSchema&) = default;
};

struct DwModel {
  std::string fact_id;
  std::string fact_path;
  std::vector<DimensionSchema> dimensions;
  std::vector<std::string> measures;
  /// Set when the data was statically made covering and strict.
  bool pedersen_transformed = false;

  const DimensionSchema* find_dimension(std::string_view id) const;
  const DimensionSchema& dimension(std::string_view id) const;
  std::optional<std::size_t> dimension_index(std::string_view id) const;

  friend bool operator==(const DwModel&, const DwModel&) = default;
};

/// The fixed four-dimension, two-measure sales model.
DwModel default_model();

/// One present level value. Cells are kept in schema order.
struct Cell {
  std::string level;
  std::string value;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// One row of a dimension instance. Absent levels have no cell. A row may be
/// left without any cell only when incompleteness removed every level (the
/// anonymous-customer case).
class LevelRow {
 public:
  LevelRow() = default;
  explicit LevelRow(std::vector<Cell> cells) : cells_(std::move(cells)) {}

  const std::string* find(std::string_view level) const;
  /// Inserts or replaces, keeping `schema` order.
  void set(const DimensionSchema& schema, std::string_view level, std::string value);
  bool erase(std::string_view level);
  bool has(std::string_view level) const { return find(level) != nullptr; }

  std::span<const Cell> cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  friend bool operator==(const LevelRow&, const LevelRow&) = default;

 private:
  std::vector<Cell> cells_;
};

struct DimensionInstance {
  std::string instance_id;
  std::string dimension_id;
  /// The non-strict array: more than one row means the instance is non-strict.
  std::vector<LevelRow> rows;

  friend bool operator==(const DimensionInstance&, const DimensionInstance&) = default;
};

/// Measures are fixed point: quantity in units, amount in cents.
struct FactRecord {
  std::string fact_id;
  std::int64_t quantity = 0;
  std::int64_t amount_cents = 0;
  /// Instance ids, indexed like `DwModel::dimensions`.
  std::array<std::string, 4> dim_refs;

  friend bool operator==(const FactRecord&, const FactRecord&) = default;
};

enum class MeasureId : std::uint8_t { quantity, totalamount };

std::string_view measure_name(MeasureId m);
std::optional<MeasureId> parse_measure(std::string_view name);
/// Fixed-point value of a measure on a fact.
std::int64_t measure_value(const FactRecord& fact, MeasureId m);
/// Divisor turning the fixed-point value into the natural unit.
double measure_scale(MeasureId m);

/// Formats cents as "2800.00".
std::string format_cents(std::int64_t cents);
/// Strict inverse of format_cents: digits, a dot, exactly two digits.
std::optional<std::int64_t> parse_cents(std::string_view text);

struct Warehouse {
  DwModel model;
  std::vector<FactRecord> facts;
  /// Per dimension, in generation order; indexed like `model.dimensions`.
  std::array<std::vector<DimensionInstance>, 4> instances;

  std::size_t instance_count() const;
  friend bool operator==(const Warehouse&, const Warehouse&) = default;
};

enum class HierarchyKind : std::uint8_t { simple, incomplete, nonstrict, complex };

std::string_view to_string(HierarchyKind kind);

/// Throws StructuralError when a row holds a cell for an undeclared level.
HierarchyKind classify_instance(const DimensionInstance& inst, const DimensionSchema& schema);

struct Nation {
  std::string_view name;
  std::string_view region;
};

/// Level vocabularies. The nation list is the 25-nation/5-region TPC-H list.
struct ValuePools {
  std::array<std::string_view, 6> type3;
  std::array<std::string_view, 5> type2;
  std::array<std::string_view, 5> type1;
  std::array<Nation, 25> nations;
  std::array<std::string_view, 25> nation_names;
  std::array<std::string_view, 5> regions;
  /// Inclusive calendar range as days since 1970-01-01.
  std::int32_t first_day = 0;
  std::int32_t last_day = 0;

  std::optional<std::string_view> region_of(std::string_view nation) const;
  /// Empty for levels without a closed vocabulary (the date levels).
  std::span<const std::string_view> vocabulary(std::string_view dimension,
                                               std::string_view level) const;
};

const ValuePools& value_pools();

/// "1998-06-25" / "1998-06" / "1998" for a day number.
struct DateLevels {
  std::string day;
  std::string month;
  std::string year;
};
DateLevels date_levels(std::int32_t days_since_epoch);

}  // namespace cxbench
