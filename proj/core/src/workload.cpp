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

#include "cxbench/workload.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cxbench/error.hpp"
#include "cxbench/pedersen.hpp"
#include "cxbench/qbs.hpp"
#include "cxbench/xmlio.hpp"

namespace cxbench::workload {

std::string_view to_string(AggregateFn fn) {
  switch (fn) {
    case AggregateFn::sum: return "SUM";
    case AggregateFn::min: return "MIN";
    case AggregateFn::max: return "MAX";
    case AggregateFn::avg: return "AVG";
  }
  return "?";
}

std::optional<AggregateFn> parse_aggregate(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto fn : {AggregateFn::sum, AggregateFn::min, AggregateFn::max, AggregateFn::avg}) {
    if (to_string(fn) == upper) return fn;
  }
  return std::nullopt;
}

void Query::validate(const DwModel& model) const {
  if (measures.empty()) throw QueryError("query " + id + " aggregates no measure");
  std::vector<std::string> seen;
  for (const auto& g : grouping) {
    const auto* dim = model.find_dimension(g.dimension);
    if (dim == nullptr) throw QueryError("query " + id + ": unknown dimension '" + g.dimension + "'");
    if (std::find(seen.begin(), seen.end(), g.dimension) != seen.end()) {
      throw QueryError("query " + id + ": dimension '" + g.dimension + "' grouped twice");
    }
    seen.push_back(g.dimension);
    if (!g.by_instance() && !dim->has_level(g.level)) {
      throw QueryError("query " + id + ": dimension '" + g.dimension + "' has no level '" +
                       g.level + "'");
    }
  }
}

std::vector<Query> standard_workload() {
  using M = MeasureId;
  using F = AggregateFn;
  const std::vector<M> both{M::quantity, M::totalamount};
  return {
      {"Q21", F::sum, both, {{"part", ""}, {"customer", ""}, {"supplier", ""}, {"date", ""}}},
      {"Q22", F::min, {M::quantity},
       {{"customer", "nation"}, {"part", "type3"}, {"supplier", "nation"}, {"date", "day"}}},
      {"Q23", F::max, {M::totalamount},
       {{"date", "month"}, {"part", "type2"}, {"supplier", "nation"}, {"customer", "region"}}},
      {"Q24", F::avg, {M::totalamount},
       {{"supplier", "region"}, {"part", "type1"}, {"customer", "region"}, {"date", "year"}}},
      {"D1", F::sum, both, {{"date", "day"}}},
      {"D2", F::sum, both, {{"part", "type3"}, {"date", "day"}}},
      {"D3", F::sum, both, {{"part", "type3"}, {"customer", "nation"}, {"date", "day"}}},
      {"D4", F::sum, both,
       {{"part", "type3"}, {"customer", "nation"}, {"supplier", "nation"}, {"date", "day"}}},
  };
}

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<Query> parse_workload(std::string_view text) {
  std::vector<Query> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string id, fn, measures, grouping, extra;
    if (!(fields >> id)) continue;
    const auto where = "workload line " + std::to_string(lineno) + ": ";
    if (!(fields >> fn >> measures >> grouping) || (fields >> extra)) {
      throw QueryError(where + "expected 'ID FN MEASURES GROUPING'");
    }
    Query q;
    q.id = id;
    auto agg = parse_aggregate(fn);
    if (!agg) throw QueryError(where + "unknown aggregate '" + fn + "'");
    q.aggregate = *agg;
    for (const auto& m : split(measures, ',')) {
      auto mid = parse_measure(m);
      if (!mid) throw QueryError(where + "unknown measure '" + m + "'");
      q.measures.push_back(*mid);
    }
    if (grouping != "-") {
      for (const auto& item : split(grouping, ',')) {
        const auto dot = item.find('.');
        GroupBy g;
        g.dimension = item.substr(0, dot);
        if (dot != std::string::npos) {
          g.level = item.substr(dot + 1);
          if (g.level.empty()) throw QueryError(where + "empty level in '" + item + "'");
        }
        if (g.dimension.empty()) throw QueryError(where + "empty dimension in '" + item + "'");
        q.grouping.push_back(std::move(g));
      }
    }
    for (const auto& prev : out) {
      if (prev.id == q.id) throw QueryError(where + "duplicate query id '" + q.id + "'");
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Query> load_workload(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open workload '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_workload(ss.str());
}

const Query& find_query(const std::vector<Query>& queries, std::string_view id) {
  for (const auto& q : queries) {
    if (q.id == id) return q;
  }
  throw QueryError("no query '" + std::string(id) + "' in the workload");
}

void aggregate_step(CubeEntry& entry, std::span<const std::int64_t> values, AggregateFn fn) {
  ++entry.support;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto& a = entry.acc[i];
    const auto v = values[i];
    switch (fn) {
      case AggregateFn::sum: a.sum += v; break;
      case AggregateFn::min: a.min = std::min(a.min, v); break;
      case AggregateFn::max: a.max = std::max(a.max, v); break;
      case AggregateFn::avg:
        a.sum += v;
        ++a.count;
        break;
    }
  }
}

double ResultCube::value(const CubeEntry& e, std::size_t m) const {
  const auto& a = e.acc[m];
  const double scale = measure_scale(measures[m]);
  switch (aggregate) {
    case AggregateFn::sum: return static_cast<double>(a.sum) / scale;
    case AggregateFn::min: return static_cast<double>(a.min) / scale;
    case AggregateFn::max: return static_cast<double>(a.max) / scale;
    case AggregateFn::avg:
      return a.count == 0 ? 0.0 : static_cast<double>(a.sum) / static_cast<double>(a.count) / scale;
  }
  return 0;
}

const CubeEntry* ResultCube::find(const GroupKey& key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

std::optional<std::string> cube_difference(const ResultCube& a, const ResultCube& b,
                                           double avg_rel_tol) {
  if (a.aggregate != b.aggregate || a.measures != b.measures) {
    return "cubes answer different aggregates";
  }
  if (a.fact_count != b.fact_count) {
    return "fact count " + std::to_string(a.fact_count) + " vs " + std::to_string(b.fact_count);
  }
  if (a.grand_totals != b.grand_totals) return "grand totals differ";
  const auto index = [](const ResultCube& c) -> std::optional<std::map<GroupKey, const CubeEntry*>> {
    std::map<GroupKey, const CubeEntry*> m;
    for (const auto& e : c.entries) {
      if (!m.emplace(e.key, &e).second) return std::nullopt;
    }
    return m;
  };
  auto ia = index(a);
  auto ib = index(b);
  if (!ia || !ib) return "duplicate group key";
  if (ia->size() != ib->size()) {
    return "group count " + std::to_string(ia->size()) + " vs " + std::to_string(ib->size());
  }
  for (auto ita = ia->begin(), itb = ib->begin(); ita != ia->end(); ++ita, ++itb) {
    if (ita->first != itb->first) {
      return "group " + ita->first.to_string() + " vs " + itb->first.to_string();
    }
    const auto& ea = *ita->second;
    const auto& eb = *itb->second;
    if (ea.support != eb.support) return "support differs for " + ita->first.to_string();
    for (std::size_t m = 0; m < a.measures.size(); ++m) {
      const double va = a.value(ea, m);
      const double vb = b.value(eb, m);
      const bool same = a.aggregate == AggregateFn::avg
                            ? std::abs(va - vb) <= avg_rel_tol * std::max(std::abs(va), std::abs(vb))
                            : va == vb;
      if (!same) {
        return "value of " + std::string(measure_name(a.measures[m])) + " differs for " +
               ita->first.to_string();
      }
    }
  }
  return std::nullopt;
}

std::string format_cube(const ResultCube& cube) {
  std::vector<const CubeEntry*> sorted;
  sorted.reserve(cube.entries.size());
  for (const auto& e : cube.entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const CubeEntry* x, const CubeEntry* y) { return x->key < y->key; });
  std::string out = "# " + std::string(to_string(cube.aggregate));
  for (auto m : cube.measures) out += " " + std::string(measure_name(m));
  out += "; groups=" + std::to_string(cube.entries.size()) +
         " facts=" + std::to_string(cube.fact_count) + "\n";
  char buf[64];
  for (const auto* e : sorted) {
    out += e->key.to_string();
    out += "\t" + std::to_string(e->support);
    for (std::size_t m = 0; m < cube.measures.size(); ++m) {
      std::snprintf(buf, sizeof buf, "\t%.6f", cube.value(*e, m));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string_view to_string(Matching m) { return m == Matching::scan ? "scan" : "hash"; }

std::optional<Matching> parse_matching(std::string_view text) {
  if (text == "scan") return Matching::scan;
  if (text == "hash") return Matching::hash;
  return std::nullopt;
}

std::size_t GroupTable::match(GroupKey key) {
  auto& entries = cube_.entries;
  if (strategy_ == Matching::scan) {
    // Every existing group is checked level instance by level instance.
    const auto n = key.components.size();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& other = entries[i].key.components;
      std::size_t c = 0;
      while (c < n && other[c] == key.components[c]) ++c;
      if (c == n) return i;
    }
  } else if (auto it = index_.find(key); it != index_.end()) {
    return it->second;
  }
  const std::size_t idx = entries.size();
  if (strategy_ == Matching::hash) index_.emplace(key, idx);
  entries.push_back(CubeEntry{std::move(key), std::vector<Accumulator>(cube_.measures.size()), 0});
  return idx;
}

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::qbs: return "qbs";
    case Engine::pedersen: return "pedersen";
    case Engine::naive: return "naive";
  }
  return "?";
}

std::optional<Engine> parse_engine(std::string_view text) {
  for (auto e : {Engine::qbs, Engine::pedersen, Engine::naive}) {
    if (to_string(e) == text) return e;
  }
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Accumulates a phase only when instrumented.
class PhaseTimer {
 public:
  explicit PhaseTimer(bool on) : on_(on) {}
  void start() {
    if (on_) t0_ = Clock::now();
  }
  void stop(double& into) {
    if (on_) into += ms_since(t0_);
  }

 private:
  bool on_;
  Clock::time_point t0_;
};

/// All row-level keys of a fact, one per combination of rows: deliberately
/// wrong on non-strict data.
std::vector<GroupKey> naive_keys(const xmlio::JoinedFact& jf, const Query& q, const DwModel& model) {
  std::vector<GroupKey> keys(1);
  for (const auto& g : q.grouping) {
    const auto dim = *model.dimension_index(g.dimension);
    const auto& inst = *jf.instances[dim];
    std::vector<GroupComponent> options;
    if (g.by_instance()) {
      options.push_back(GroupComponent::atomic(inst.instance_id));
    } else {
      for (const auto& row : inst.rows) {
        const auto* v = row.find(g.level);
        options.push_back(v ? GroupComponent::atomic(*v) : GroupComponent::other());
      }
    }
    std::vector<GroupKey> next;
    next.reserve(keys.size() * options.size());
    for (const auto& k : keys) {
      for (const auto& o : options) {
        GroupKey nk = k;
        nk.components.push_back(o);
        next.push_back(std::move(nk));
      }
    }
    keys = std::move(next);
  }
  return keys;
}

}  // namespace

QueryResult run_query(const Query& q, const std::filesystem::path& dir, Engine engine,
                      Matching matching, RunOptions options) {
  const auto t_total = Clock::now();
  const DwModel meta = xmlio::read_metadata(dir);
  q.validate(meta);
  if (engine == Engine::pedersen && !meta.pedersen_transformed) {
    throw ConfigError("the pedersen engine needs a transformed warehouse; '" + dir.string() +
                      "' has no fused levels");
  }

  std::array<bool, 4> wanted{};
  for (const auto& g : q.grouping) wanted[*meta.dimension_index(g.dimension)] = true;
  xmlio::WarehouseReader reader(dir, wanted);
  const DwModel& model = reader.model();

  QueryResult result;
  auto& cube = result.cube;
  cube.aggregate = q.aggregate;
  cube.measures = q.measures;
  cube.grand_totals.assign(q.measures.size(), 0);
  GroupTable table(cube, matching);
  auto& timing = result.timing;
  timing.instrumented = options.instrument;
  PhaseTimer phase(options.instrument);

  std::vector<std::int64_t> values(q.measures.size());
  const auto lookup_in = [](const xmlio::JoinedFact& jf) {
    return [&jf](std::size_t dim, const std::string& id) -> const DimensionInstance* {
      const auto& inst = jf.instances[dim];
      return inst && inst->instance_id == id ? &*inst : nullptr;
    };
  };

  while (true) {
    phase.start();
    const auto* jf = reader.next();
    phase.stop(timing.read_ms);
    if (jf == nullptr) break;

    ++cube.fact_count;
    for (std::size_t m = 0; m < q.measures.size(); ++m) {
      values[m] = measure_value(jf->fact, q.measures[m]);
      cube.grand_totals[m] += values[m];
    }

    if (engine == Engine::naive) {
      phase.start();
      auto keys = naive_keys(*jf, q, model);
      phase.stop(timing.resolve_ms);
      for (auto& k : keys) {
        phase.start();
        const auto e = table.match(std::move(k));
        phase.stop(timing.match_ms);
        phase.start();
        aggregate_step(cube.entries[e], values, q.aggregate);
        phase.stop(timing.agg_ms);
      }
      continue;
    }

    phase.start();
    GroupKey key;
    if (engine == Engine::qbs) {
      key = qbs::resolve_group(jf->fact, q.grouping, model, lookup_in(*jf));
    } else {
      key.components.reserve(q.grouping.size());
      for (const auto& g : q.grouping) {
        const auto dim = *model.dimension_index(g.dimension);
        const auto& inst = jf->instances[dim];
        key.components.push_back(pedersen::resolve_component(*inst, model.dimensions[dim], g.level));
      }
    }
    phase.stop(timing.resolve_ms);

    phase.start();
    const auto e = table.match(std::move(key));
    phase.stop(timing.match_ms);

    phase.start();
    aggregate_step(cube.entries[e], values, q.aggregate);
    phase.stop(timing.agg_ms);
  }
  timing.total_ms = ms_since(t_total);
  return result;
}

}  // namespace cxbench::workload
