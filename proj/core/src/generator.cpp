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

#include "cxbench/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "cxbench/error.hpp"
#include "cxbench/xmlio.hpp"

namespace cxbench::gen {

static_assert(kRemovalProbability == 0.5, "removal draws use Rng::coin()");

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::simple: return "simple";
    case Regime::incomplete: return "incomplete";
    case Regime::nonstrict: return "nonstrict";
    case Regime::complex: return "complex";
  }
  return "?";
}

Regime GeneratorConfig::regime() const {
  const auto pct_ok = [](int p) { return p >= 0 && p <= 100; };
  if (!pct_ok(incomplete_percentage) || !pct_ok(nonstrict_percentage)) {
    throw ConfigError("percentages must lie in [0, 100]");
  }
  if (nonstrict_percentage > 0 && nonstrict_number < 2) {
    throw ConfigError("non-strictness needs nonstrict_number >= 2, got " +
                      std::to_string(nonstrict_number));
  }
  if (nonstrict_percentage == 0) {
    return incomplete_percentage == 0 ? Regime::simple : Regime::incomplete;
  }
  return incomplete_percentage == 0 ? Regime::nonstrict : Regime::complex;
}

std::vector<std::size_t> select_targets(std::size_t total, int percentage, Rng& rng) {
  if (percentage < 0 || percentage > 100) throw ConfigError("percentage outside [0, 100]");
  std::vector<std::size_t> out;
  if (percentage == 0 || total == 0) return out;
  const auto block = static_cast<std::size_t>(std::lround(100.0 / percentage));
  out.reserve(total / block);
  for (std::size_t start = 0; start + block <= total; start += block) {
    out.push_back(start + rng.below(block));
  }
  return out;
}

void remove_levels(LevelRow& row, const DimensionSchema& schema, Rng& rng) {
  if (row.empty()) return;
  bool removed = false;
  while (!removed) {
    for (const auto& level : schema.levels) {
      if (!row.has(level)) continue;
      if (rng.coin()) {
        row.erase(level);
        removed = true;
      }
    }
  }
}

DimensionInstance gen_incomplete(DimensionInstance inst, const DimensionSchema& schema, Rng& rng) {
  if (inst.rows.size() == 1) {
    remove_levels(inst.rows.front(), schema, rng);
    return inst;
  }
  const auto present = [&](const std::string& level) {
    return std::any_of(inst.rows.begin(), inst.rows.end(),
                       [&](const LevelRow& r) { return r.has(level); });
  };
  if (std::none_of(schema.levels.begin(), schema.levels.end(), present)) return inst;
  bool removed = false;
  while (!removed) {
    for (const auto& level : schema.levels) {
      if (!present(level)) continue;
      if (rng.coin()) {
        for (auto& r : inst.rows) r.erase(level);
        removed = true;
      }
    }
  }
  return inst;
}

LevelRow draw_row(const DimensionSchema& schema, Rng& rng, const ValuePools& pools) {
  LevelRow row;
  if (schema.id == kDate) {
    const auto day = static_cast<std::int32_t>(rng.between(pools.first_day, pools.last_day));
    auto d = date_levels(day);
    row.set(schema, "day", std::move(d.day));
    row.set(schema, "month", std::move(d.month));
    row.set(schema, "year", std::move(d.year));
    return row;
  }
  if (schema.id == kCustomer || schema.id == kSupplier) {
    const auto& n = pools.nations[rng.below(pools.nations.size())];
    row.set(schema, "nation", std::string(n.name));
    row.set(schema, "region", std::string(n.region));
    return row;
  }
  if (schema.id == kPart) {
    row.set(schema, "type3", std::string(pools.type3[rng.below(pools.type3.size())]));
    row.set(schema, "type2", std::string(pools.type2[rng.below(pools.type2.size())]));
    row.set(schema, "type1", std::string(pools.type1[rng.below(pools.type1.size())]));
    return row;
  }
  throw ConfigError("no value pool for dimension '" + schema.id + "'");
}

DimensionInstance gen_nonstrict(int rows, DimensionInstance inst, const DimensionSchema& schema,
                                Rng& rng, const ValuePools& pools) {
  if (schema.nonstrict_eligible_levels.empty()) {
    throw EligibilityError("dimension '" + schema.id + "' cannot be non-strict");
  }
  if (rows < 2) throw ConfigError("a non-strict instance needs at least 2 rows");
  inst.rows.clear();
  inst.rows.reserve(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) inst.rows.push_back(draw_row(schema, rng, pools));
  return inst;
}

DimensionInstance gen_complex(DimensionInstance ns, const DimensionSchema& schema, Rng& rng) {
  bool selected = false;
  std::vector<bool> chosen(ns.rows.size(), false);
  while (!selected) {
    for (std::size_t i = 0; i < ns.rows.size(); ++i) {
      if (chosen[i] || ns.rows[i].empty()) continue;
      if (rng.coin()) {
        chosen[i] = true;
        selected = true;
      }
    }
    if (std::all_of(ns.rows.begin(), ns.rows.end(), [](const LevelRow& r) { return r.empty(); })) {
      break;
    }
  }
  for (std::size_t i = 0; i < ns.rows.size(); ++i) {
    if (chosen[i]) remove_levels(ns.rows[i], schema, rng);
  }
  return ns;
}

namespace {

/// Uniform k-subset of `pool`, returned sorted.
std::vector<std::size_t> choose(std::vector<std::size_t> pool, std::size_t k, Rng& rng) {
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::size_t stratified_count(std::size_t total, int percentage) {
  if (percentage == 0) return 0;
  return total / static_cast<std::size_t>(std::lround(100.0 / percentage));
}

}  // namespace

GenerationResult build_warehouse(const GeneratorConfig& cfg, const DwModel& model) {
  const Regime regime = cfg.regime();
  if (model.dimensions.size() != 4) throw ConfigError("the generator needs the 4-dimension model");

  GenerationResult result;
  auto& wh = result.warehouse;
  wh.model = model;
  Rng rng(cfg.seed);
  const auto& pools = value_pools();
  const std::size_t ndims = model.dimensions.size();

  wh.facts.reserve(cfg.fact_number);
  for (auto& v : wh.instances) v.reserve(cfg.fact_number);
  for (std::uint64_t i = 1; i <= cfg.fact_number; ++i) {
    FactRecord f;
    const auto n = std::to_string(i);
    f.fact_id = model.fact_id + "#" + n;
    f.quantity = rng.between(1, 100);
    f.amount_cents = f.quantity * rng.between(100, 10000);
    for (std::size_t d = 0; d < ndims; ++d) {
      const auto& schema = model.dimensions[d];
      DimensionInstance inst{schema.id + "#" + n, schema.id, {draw_row(schema, rng, pools)}};
      f.dim_refs[d] = inst.instance_id;
      wh.instances[d].push_back(std::move(inst));
    }
    wh.facts.push_back(std::move(f));
  }

  const auto at = [&](std::size_t global) -> DimensionInstance& {
    return wh.instances[global % ndims][global / ndims];
  };
  const std::size_t total = cfg.fact_number * ndims;

  if (regime == Regime::nonstrict || regime == Regime::complex) {
    std::vector<std::size_t> eligible;
    for (std::size_t g = 0; g < total; ++g) {
      const auto& schema = model.dimensions[g % ndims];
      if (schema.nonstrict_eligible || (cfg.customer_nonstrict && schema.id == kCustomer)) {
        eligible.push_back(g);
      }
    }
    for (auto idx : select_targets(eligible.size(), cfg.nonstrict_percentage, rng)) {
      const auto g = eligible[idx];
      const auto& schema = model.dimensions[g % ndims];
      const int rows = cfg.rows_mode == NonstrictRows::exact
                           ? cfg.nonstrict_number
                           : static_cast<int>(rng.between(2, cfg.nonstrict_number));
      at(g) = gen_nonstrict(rows, std::move(at(g)), schema, rng, pools);
      result.selection.nonstrict.push_back(g);
    }
  }

  if (regime == Regime::incomplete) {
    for (auto g : select_targets(total, cfg.incomplete_percentage, rng)) {
      at(g) = gen_incomplete(std::move(at(g)), model.dimensions[g % ndims], rng);
      result.selection.incomplete.push_back(g);
    }
  } else if (regime == Regime::complex) {
    // Incompleteness goes to the non-strict instances first; any remaining
    // quota is spread uniformly over the strict ones.
    const auto& ns = result.selection.nonstrict;
    const std::size_t quota = stratified_count(total, cfg.incomplete_percentage);
    std::vector<std::size_t> targets = choose(ns, quota, rng);
    if (quota > ns.size()) {
      std::vector<std::size_t> strict;
      strict.reserve(total - ns.size());
      for (std::size_t g = 0, k = 0; g < total; ++g) {
        if (k < ns.size() && ns[k] == g) {
          ++k;
          continue;
        }
        strict.push_back(g);
      }
      auto extra = choose(std::move(strict), quota - ns.size(), rng);
      targets.insert(targets.end(), extra.begin(), extra.end());
      std::sort(targets.begin(), targets.end());
    }
    for (auto g : targets) {
      const auto& schema = model.dimensions[g % ndims];
      if (at(g).rows.size() > 1) {
        at(g) = gen_complex(std::move(at(g)), schema, rng);
      } else {
        at(g) = gen_incomplete(std::move(at(g)), schema, rng);
      }
    }
    result.selection.incomplete = std::move(targets);
  }
  return result;
}

GenerationResult generate_warehouse(const GeneratorConfig& cfg, const DwModel& model) {
  auto result = build_warehouse(cfg, model);
  if (cfg.output_dir.empty()) throw ConfigError("no output directory given");
  xmlio::write_warehouse(result.warehouse, cfg.output_dir);

  nlohmann::ordered_json j;
  j["fact_number"] = cfg.fact_number;
  j["incomplete_percentage"] = cfg.incomplete_percentage;
  j["nonstrict_percentage"] = cfg.nonstrict_percentage;
  j["nonstrict_number"] = cfg.nonstrict_number;
  j["seed"] = cfg.seed;
  j["rows_mode"] = cfg.rows_mode == NonstrictRows::exact ? "exact" : "uniform";
  j["customer_nonstrict"] = cfg.customer_nonstrict;
  j["regime"] = to_string(cfg.regime());
  j["rng"] = Rng::kAlgorithm;
  const auto file = cfg.output_dir / "generator.json";
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + file.string() + "'");
  return result;
}

}  // namespace cxbench::gen
