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

// Static summarizability preprocessing. Before any query runs, every
// hierarchy is made covering (missing level values are filled with the
// shared "Other" placeholder) and strict (an instance with several values at
// a level gets one fused value instead, carried by a `<level>_fused` level
// inserted between that level and its parent).
//
// Representation after the transform: each instance has exactly one row. For
// a fused level L the row holds the strict value (atomic, fused label or
// "Other") in both L and L_fused, so L keeps its name for queries and the
// inserted level records where fusion happened.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cxbench/group_key.hpp"
#include "cxbench/model.hpp"

namespace cxbench::pedersen {

/// Fills every absent cell of every row with "Other".
DimensionInstance make_covering(DimensionInstance inst, const DimensionSchema& schema);

/// Levels of the original chain (no fused levels) holding more than one
/// distinct value across rows. "Other" only counts when it is the sole value.
std::vector<std::string> levels_needing_fusion(const DimensionInstance& inst,
                                               const DimensionSchema& schema);

/// `schema` with `<level>_fused` inserted after each listed level (existing
/// fused levels are kept).
DimensionSchema extend_schema(const DimensionSchema& schema, const std::vector<std::string>& fused);

struct StrictResult {
  DimensionInstance instance;
  /// Schema the instance conforms to.
  DimensionSchema schema;
  /// Levels this instance had to fuse.
  std::vector<std::string> fused_levels;
};

/// Collapses the (covering) rows into one. Levels with several values get the
/// canonical fused label. A single-row instance over a schema without fused
/// levels comes back unchanged.
StrictResult make_strict(const DimensionInstance& inst, const DimensionSchema& schema);

struct TransformReport {
  double overhead_ms = 0;
  std::uint64_t instances_covered = 0;
  std::uint64_t instances_fused = 0;
};

/// Sidecar the transform leaves next to its output: source directory,
/// overhead and instance counts.
inline constexpr const char* kTransformFile = "transform.json";

/// Writes the covering and strict copy of the warehouse at `in` to `out`
/// (facts document copied verbatim, metadata extended and marked).
TransformReport transform_warehouse(const std::filesystem::path& in, const std::filesystem::path& out);

/// Group component of a transformed instance at `level` (empty for instance
/// identity). Throws StructuralError on data that was not transformed.
GroupComponent resolve_component(const DimensionInstance& inst, const DimensionSchema& schema,
                                 std::string_view level);

}  // namespace cxbench::pedersen
