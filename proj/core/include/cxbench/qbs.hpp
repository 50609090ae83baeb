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

// Query-time summarizability: the data is left as is and every fact's group
// is resolved while the query runs. Several distinct values at the grouped
// level fuse into one set-valued component; no value at all sends the fact to
// the "Other" group of that component.

#pragma once

#include <functional>
#include <span>
#include <string_view>

#include "cxbench/group_key.hpp"
#include "cxbench/model.hpp"

namespace cxbench::qbs {

/// `level` empty groups by instance identity. Throws QueryError for a level
/// the schema does not declare.
GroupComponent resolve_component(const DimensionInstance& inst, const DimensionSchema& schema,
                                 std::string_view level);

/// Finds the instance a fact references in dimension `dim`, or null.
using InstanceLookup = std::function<const DimensionInstance*(std::size_t dim, const std::string& id)>;

/// Components follow the order of `grouping`. Throws ReferentialError when a
/// referenced instance cannot be found.
GroupKey resolve_group(const FactRecord& fact, std::span<const GroupBy> grouping,
                       const DwModel& model, const InstanceLookup& lookup);

}  // namespace cxbench::qbs
