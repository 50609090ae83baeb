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

#include "cxbench/pedersen.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <set>

#include "cxbench/error.hpp"
#include "cxbench/xmlio.hpp"

namespace cxbench::pedersen {

namespace {

bool is_fused_level(std::string_view level) { return level.ends_with(kFusedSuffix); }

std::string fused_name(std::string_view level) {
  return std::string(level) + std::string(kFusedSuffix);
}

/// Distinct values at `level`; "Other" is dropped unless nothing else is there.
std::vector<std::string> strict_members(const DimensionInstance& inst, std::string_view level) {
  std::vector<std::string> values;
  bool saw_other = false;
  for (const auto& row : inst.rows) {
    const auto* v = row.find(level);
    if (v == nullptr) continue;
    if (*v == kOtherValue) {
      saw_other = true;
      continue;
    }
    if (std::find(values.begin(), values.end(), *v) == values.end()) values.push_back(*v);
  }
  if (values.empty() && saw_other) values.emplace_back(kOtherValue);
  return values;
}

}  // namespace

DimensionInstance make_covering(DimensionInstance inst, const DimensionSchema& schema) {
  for (auto& row : inst.rows) {
    if (row.size() == schema.levels.size()) continue;
    for (const auto& level : schema.levels) {
      if (!row.has(level)) row.set(schema, level, std::string(kOtherValue));
    }
  }
  return inst;
}

std::vector<std::string> levels_needing_fusion(const DimensionInstance& inst,
                                               const DimensionSchema& schema) {
  std::vector<std::string> out;
  if (inst.rows.size() < 2) return out;
  for (const auto& level : schema.levels) {
    if (is_fused_level(level)) continue;
    if (strict_members(inst, level).size() > 1) out.push_back(level);
  }
  return out;
}

DimensionSchema extend_schema(const DimensionSchema& schema, const std::vector<std::string>& fused) {
  DimensionSchema out = schema;
  out.levels.clear();
  for (const auto& level : schema.levels) {
    if (is_fused_level(level)) continue;
    out.levels.push_back(level);
    const auto name = fused_name(level);
    const bool wanted = std::find(fused.begin(), fused.end(), level) != fused.end() ||
                        schema.has_level(name);
    if (wanted) out.levels.push_back(name);
  }
  return out;
}

StrictResult make_strict(const DimensionInstance& inst, const DimensionSchema& schema) {
  StrictResult result;
  result.fused_levels = levels_needing_fusion(inst, schema);
  result.schema = extend_schema(schema, result.fused_levels);
  if (inst.rows.size() == 1 && result.schema == schema &&
      inst.rows.front().size() == schema.levels.size()) {
    result.instance = inst;
    return result;
  }
  LevelRow row;
  for (const auto& level : result.schema.levels) {
    if (is_fused_level(level)) continue;
    auto members = strict_members(inst, level);
    if (members.empty()) continue;
    auto value = fused_label(std::move(members));
    const auto fused = fused_name(level);
    if (result.schema.has_level(fused)) row.set(result.schema, fused, value);
    row.set(result.schema, level, std::move(value));
  }
  result.instance = DimensionInstance{inst.instance_id, inst.dimension_id, {std::move(row)}};
  return result;
}

GroupComponent resolve_component(const DimensionInstance& inst, const DimensionSchema& schema,
                                 std::string_view level) {
  if (level.empty()) return GroupComponent::atomic(inst.instance_id);
  if (!schema.has_level(level)) {
    throw QueryError("dimension '" + schema.id + "' has no level '" + std::string(level) + "'");
  }
  if (inst.rows.size() != 1) {
    throw StructuralError("instance '" + inst.instance_id + "' is not strict");
  }
  const auto fused = fused_name(level);
  const auto* v = schema.has_level(fused) ? inst.rows.front().find(fused)
                                          : inst.rows.front().find(level);
  if (v == nullptr) {
    throw StructuralError("instance '" + inst.instance_id + "' is not covering at '" +
                          std::string(level) + "'");
  }
  return component_from_label(*v);
}

TransformReport transform_warehouse(const std::filesystem::path& in,
                                    const std::filesystem::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  if (std::filesystem::equivalent(in, out, ec)) {
    throw ConfigError("transform input and output must differ");
  }
  const DwModel model = xmlio::read_metadata(in);
  DwModel extended = model;
  extended.pedersen_transformed = true;
  TransformReport report;

  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create '" + out.string() + "'");

  for (std::size_t d = 0; d < model.dimensions.size(); ++d) {
    const auto& schema = model.dimensions[d];
    // First pass: which levels need a fused companion anywhere.
    std::vector<std::string> fused;
    {
      xmlio::InstanceCursor cursor(in / schema.path, schema);
      while (auto inst = cursor.next()) {
        for (auto& level : levels_needing_fusion(make_covering(std::move(*inst), schema), schema)) {
          if (std::find(fused.begin(), fused.end(), level) == fused.end()) fused.push_back(level);
        }
      }
    }
    const DimensionSchema target = extend_schema(schema, fused);
    extended.dimensions[d] = target;

    xmlio::InstanceCursor cursor(in / schema.path, schema);
    auto writer = xmlio::DocumentWriter::dimension(out, target);
    while (auto inst = cursor.next()) {
      const bool incomplete = std::any_of(inst->rows.begin(), inst->rows.end(), [&](const LevelRow& r) {
        return r.size() < schema.levels.size();
      });
      if (incomplete) ++report.instances_covered;
      if (inst->rows.size() > 1) ++report.instances_fused;
      auto strict = make_strict(make_covering(std::move(*inst), schema), target);
      writer.write(strict.instance);
    }
    writer.close();
  }

  std::filesystem::copy_file(in / model.fact_path, out / model.fact_path,
                             std::filesystem::copy_options::overwrite_existing, ec);
  if (ec) throw IoError("cannot copy facts document: " + ec.message());
  xmlio::write_metadata(extended, out);
  report.overhead_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  // Provenance of the copy, outside the measured overhead.
  if (std::filesystem::exists(in / "generator.json")) {
    std::filesystem::copy_file(in / "generator.json", out / "generator.json",
                               std::filesystem::copy_options::overwrite_existing, ec);
  }
  nlohmann::ordered_json sidecar;
  sidecar["source"] = std::filesystem::absolute(in).lexically_normal().string();
  sidecar["overhead_ms"] = report.overhead_ms;
  sidecar["instances_covered"] = report.instances_covered;
  sidecar["instances_fused"] = report.instances_fused;
  std::ofstream(out / kTransformFile) << sidecar.dump(2) << '\n';
  return report;
}

}  // namespace cxbench::pedersen
