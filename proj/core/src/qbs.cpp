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

#include "cxbench/qbs.hpp"

#include <algorithm>

#include "cxbench/error.hpp"

namespace cxbench::qbs {

GroupComponent resolve_component(const DimensionInstance& inst, const DimensionSchema& schema,
                                 std::string_view level) {
  if (level.empty()) return GroupComponent::atomic(inst.instance_id);
  if (!schema.has_level(level)) {
    throw QueryError("dimension '" + schema.id + "' has no level '" + std::string(level) + "'");
  }
  // Distinct values only: rows agreeing at this level do not fuse.
  std::vector<std::string> values;
  values.reserve(inst.rows.size());
  for (const auto& row : inst.rows) {
    const auto* v = row.find(level);
    if (v == nullptr) continue;
    if (std::find(values.begin(), values.end(), *v) == values.end()) values.push_back(*v);
  }
  switch (values.size()) {
    case 0: return GroupComponent::other();
    case 1: return GroupComponent::atomic(std::move(values.front()));
    default: return GroupComponent::fused(std::move(values));
  }
}

GroupKey resolve_group(const FactRecord& fact, std::span<const GroupBy> grouping,
                       const DwModel& model, const InstanceLookup& lookup) {
  GroupKey key;
  key.components.reserve(grouping.size());
  for (const auto& g : grouping) {
    const auto dim = model.dimension_index(g.dimension);
    if (!dim) throw QueryError("unknown dimension '" + g.dimension + "'");
    const auto& id = fact.dim_refs[*dim];
    const DimensionInstance* inst = lookup(*dim, id);
    if (inst == nullptr) {
      throw ReferentialError("fact '" + fact.fact_id + "' references missing " + g.dimension +
                             " instance '" + id + "'");
    }
    key.components.push_back(resolve_component(*inst, model.dimensions[*dim], g.level));
  }
  return key;
}

}  // namespace cxbench::qbs
