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

#include "cxbench/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <json.hpp>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cxbench/error.hpp"
#include "cxbench/pedersen.hpp"

namespace cxbench::harness {

using workload::AggregateFn;
using workload::ResultCube;

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::na: return "na";
  }
  return "?";
}

bool CorrectnessReport::ok() const {
  return duplicates.status != CheckStatus::fail && grand_total.status != CheckStatus::fail &&
         average.status != CheckStatus::fail && min_max.status != CheckStatus::fail;
}

namespace {

/// Set-valued view of one grouping coordinate: empty means "Other".
using MemberSet = std::set<std::string>;

/// Engine-independent reading of a level: every row's value at the level (or
/// at its inserted fused level), placeholders dropped, fused labels split.
MemberSet members_at(const DimensionInstance& inst, const DimensionSchema& schema,
                     const GroupBy& g) {
  MemberSet out;
  if (g.by_instance()) {
    out.insert(inst.instance_id);
    return out;
  }
  if (!schema.has_level(g.level)) {
    throw QueryError("dimension '" + schema.id + "' has no level '" + g.level + "'");
  }
  const std::string fused = g.level + std::string(kFusedSuffix);
  const std::string& source = schema.has_level(fused) ? fused : g.level;
  for (const auto& row : inst.rows) {
    const auto* v = row.find(source);
    if (v == nullptr) continue;
    std::string_view label = *v;
    while (true) {
      const auto pos = label.find(kFuseSeparator);
      const auto piece = label.substr(0, pos);
      if (piece != kOtherValue) out.emplace(piece);
      if (pos == std::string_view::npos) break;
      label.remove_prefix(pos + 1);
    }
  }
  return out;
}

GroupKey to_group_key(const std::vector<MemberSet>& sets) {
  GroupKey key;
  for (const auto& s : sets) {
    key.components.push_back(GroupComponent::fused(std::vector<std::string>(s.begin(), s.end())));
  }
  return key;
}

std::vector<MemberSet> member_key(const xmlio::JoinedFact& jf, const DwModel& model,
                                  const workload::Query& q) {
  std::vector<MemberSet> key;
  key.reserve(q.grouping.size());
  for (const auto& g : q.grouping) {
    const auto dim = model.dimension_index(g.dimension);
    if (!dim) throw QueryError("unknown dimension '" + g.dimension + "'");
    const auto& inst = jf.instances[*dim];
    if (!inst || inst->instance_id != jf.fact.dim_refs[*dim]) {
      throw ReferentialError("fact '" + jf.fact.fact_id + "' has no " + g.dimension + " instance");
    }
    key.push_back(members_at(*inst, model.dimensions[*dim], g));
  }
  return key;
}

bool close(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

std::string fmt_ms(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

FactSource facts_of(const fs::path& dir) {
  return [dir](const std::function<void(const xmlio::JoinedFact&)>& visit) {
    xmlio::stream_warehouse(dir, visit);
  };
}

FactSource facts_of(const Warehouse& wh) {
  return [&wh](const std::function<void(const xmlio::JoinedFact&)>& visit) {
    std::array<std::unordered_map<std::string, const DimensionInstance*>, 4> index;
    for (std::size_t d = 0; d < wh.instances.size(); ++d) {
      for (const auto& inst : wh.instances[d]) index[d].emplace(inst.instance_id, &inst);
    }
    xmlio::JoinedFact jf;
    for (const auto& f : wh.facts) {
      jf.fact = f;
      for (std::size_t d = 0; d < index.size(); ++d) {
        auto it = index[d].find(f.dim_refs[d]);
        if (it == index[d].end()) {
          throw ReferentialError("fact '" + f.fact_id + "' references missing instance '" +
                                 f.dim_refs[d] + "'");
        }
        jf.instances[d] = *it->second;
      }
      visit(jf);
    }
  };
}

CorrectnessReport check_correctness(const ResultCube& cube, const DwModel& model,
                                    const FactSource& facts, const workload::Query& q,
                                    double rel_tol) {
  const std::size_t nm = q.measures.size();
  struct Recount {
    std::uint64_t support = 0;
    std::vector<std::int64_t> min, max;
  };
  std::map<GroupKey, Recount> groups;
  std::vector<std::int64_t> totals(nm, 0);
  std::uint64_t fact_count = 0;

  facts([&](const xmlio::JoinedFact& jf) {
    ++fact_count;
    auto& r = groups[to_group_key(member_key(jf, model, q))];
    if (r.support == 0) {
      r.min.assign(nm, std::numeric_limits<std::int64_t>::max());
      r.max.assign(nm, std::numeric_limits<std::int64_t>::min());
    }
    ++r.support;
    for (std::size_t m = 0; m < nm; ++m) {
      const auto v = measure_value(jf.fact, q.measures[m]);
      totals[m] += v;
      r.min[m] = std::min(r.min[m], v);
      r.max[m] = std::max(r.max[m], v);
    }
  });

  CorrectnessReport rep;

  std::set<GroupKey> seen;
  rep.duplicates.status = CheckStatus::pass;
  for (const auto& e : cube.entries) {
    if (!seen.insert(e.key).second) {
      rep.duplicates = {CheckStatus::fail, "group " + e.key.to_string() + " appears twice"};
      break;
    }
  }

  rep.grand_total.status = CheckStatus::pass;
  std::uint64_t support = 0;
  for (const auto& e : cube.entries) support += e.support;
  if (support != fact_count) {
    rep.grand_total = {CheckStatus::fail, "group supports add up to " + std::to_string(support) +
                                              ", warehouse has " + std::to_string(fact_count) +
                                              " facts"};
  } else if (cube.fact_count != fact_count || cube.grand_totals != totals) {
    rep.grand_total = {CheckStatus::fail, "cube grand totals disagree with the recount"};
  } else if (q.aggregate == AggregateFn::sum) {
    for (std::size_t m = 0; m < nm; ++m) {
      std::int64_t sum = 0;
      for (const auto& e : cube.entries) sum += e.acc[m].sum;
      if (sum != totals[m]) {
        rep.grand_total = {CheckStatus::fail,
                           std::string(measure_name(q.measures[m])) + ": groups add up to " +
                               std::to_string(sum) + ", grand total is " +
                               std::to_string(totals[m])};
        break;
      }
    }
  }

  if (q.aggregate == AggregateFn::avg) {
    rep.average.status = CheckStatus::pass;
    for (const auto& e : cube.entries) {
      for (std::size_t m = 0; m < nm && rep.average.status == CheckStatus::pass; ++m) {
        const double expected = e.support == 0 ? 0.0
                                               : static_cast<double>(e.acc[m].sum) /
                                                     static_cast<double>(e.support) /
                                                     measure_scale(q.measures[m]);
        if (static_cast<std::uint64_t>(e.acc[m].count) != e.support ||
            !close(cube.value(e, m), expected, rel_tol)) {
          rep.average = {CheckStatus::fail, "average of " + e.key.to_string() +
                                                " is not its total over its count"};
        }
      }
    }
  }

  if (q.aggregate == AggregateFn::min || q.aggregate == AggregateFn::max) {
    const bool is_min = q.aggregate == AggregateFn::min;
    rep.min_max.status = CheckStatus::pass;
    for (const auto& [key, r] : groups) {
      const auto* e = cube.find(key);
      if (e == nullptr) {
        rep.min_max = {CheckStatus::fail, "no group " + key.to_string() + " in the cube"};
        break;
      }
      for (std::size_t m = 0; m < nm; ++m) {
        const auto got = is_min ? e->acc[m].min : e->acc[m].max;
        const auto want = is_min ? r.min[m] : r.max[m];
        if (got != want) {
          rep.min_max = {CheckStatus::fail, std::string(is_min ? "min" : "max") + " of " +
                                                key.to_string() + " is " + std::to_string(got) +
                                                ", recount gives " + std::to_string(want)};
          break;
        }
      }
      if (rep.min_max.status == CheckStatus::fail) break;
    }
    if (rep.min_max.status == CheckStatus::pass && groups.size() != cube.entries.size()) {
      rep.min_max = {CheckStatus::fail, "cube has groups no fact belongs to"};
    }
  }
  return rep;
}

CorrectnessReport check_correctness(const ResultCube& cube, const fs::path& dir,
                                    const workload::Query& q) {
  const DwModel model = xmlio::read_metadata(dir);
  return check_correctness(cube, model, facts_of(dir), q);
}

ResultCube oracle_cube(const Warehouse& wh, const workload::Query& q) {
  if (wh.facts.size() > kOracleMaxFacts) {
    throw OracleScopeError("oracle limited to " + std::to_string(kOracleMaxFacts) +
                           " facts, warehouse has " + std::to_string(wh.facts.size()));
  }
  q.validate(wh.model);
  std::array<std::map<std::string, const DimensionInstance*>, 4> by_id;
  for (std::size_t d = 0; d < 4; ++d) {
    for (const auto& inst : wh.instances[d]) by_id[d][inst.instance_id] = &inst;
  }

  std::map<std::vector<MemberSet>, std::vector<const FactRecord*>> buckets;
  for (const auto& f : wh.facts) {
    std::vector<MemberSet> key;
    for (const auto& g : q.grouping) {
      const auto d = *wh.model.dimension_index(g.dimension);
      auto it = by_id[d].find(f.dim_refs[d]);
      if (it == by_id[d].end()) {
        throw ReferentialError("fact '" + f.fact_id + "' references missing instance '" +
                               f.dim_refs[d] + "'");
      }
      key.push_back(members_at(*it->second, wh.model.dimensions[d], g));
    }
    buckets[std::move(key)].push_back(&f);
  }

  ResultCube cube;
  cube.aggregate = q.aggregate;
  cube.measures = q.measures;
  cube.fact_count = wh.facts.size();
  for (auto m : q.measures) {
    cube.grand_totals.push_back(std::accumulate(
        wh.facts.begin(), wh.facts.end(), std::int64_t{0},
        [m](std::int64_t acc, const FactRecord& f) { return acc + measure_value(f, m); }));
  }
  for (const auto& [key, members] : buckets) {
    workload::CubeEntry e;
    e.key = to_group_key(key);
    e.support = members.size();
    for (auto m : q.measures) {
      std::vector<std::int64_t> values;
      for (const auto* f : members) values.push_back(measure_value(*f, m));
      workload::Accumulator a;
      a.sum = std::accumulate(values.begin(), values.end(), std::int64_t{0});
      a.min = *std::min_element(values.begin(), values.end());
      a.max = *std::max_element(values.begin(), values.end());
      a.count = static_cast<std::int64_t>(values.size());
      e.acc.push_back(a);
    }
    cube.entries.push_back(std::move(e));
  }
  return cube;
}

ResultCube oracle_cube(const fs::path& dir, const workload::Query& q) {
  return oracle_cube(xmlio::load_warehouse(dir), q);
}

DatasetInfo dataset_info(const fs::path& dir) {
  DatasetInfo info;
  info.label = dir.filename().string();
  std::ifstream in(dir / "generator.json");
  if (!in) return info;
  try {
    const auto j = nlohmann::json::parse(in);
    info.facts = j.value("fact_number", std::uint64_t{0});
    info.incomplete_pct = j.value("incomplete_percentage", 0);
    info.nonstrict_pct = j.value("nonstrict_percentage", 0);
    info.nonstrict_num = j.value("nonstrict_number", 0);
    info.regime = j.value("regime", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError((dir / "generator.json").string(), 1, e.what());
  }
  return info;
}

void write_csv_row(std::ostream& out, const RunReport& r) {
  const auto& d = r.dataset;
  out << d.label << ',' << d.regime << ',' << d.facts << ',' << d.incomplete_pct << ','
      << d.nonstrict_pct << ',' << d.nonstrict_num << ',' << r.engine << ',' << r.matching << ','
      << r.query << ',';
  if (!r.error.empty()) {
    out << fmt_ms(r.load_ms) << ',' << fmt_ms(r.overhead_ms) << ",,,,,,,error,error,error,error\n";
    return;
  }
  out << fmt_ms(r.load_ms) << ',' << fmt_ms(r.overhead_ms) << ',' << fmt_ms(r.query_ms) << ',';
  if (r.phases.instrumented) {
    out << fmt_ms(r.phases.read_ms) << ',' << fmt_ms(r.phases.resolve_ms) << ','
        << fmt_ms(r.phases.match_ms) << ',' << fmt_ms(r.phases.agg_ms) << ',';
  } else {
    out << ",,,,";
  }
  const auto& c = r.correctness;
  out << r.groups << ',' << to_string(c.duplicates.status) << ',' << to_string(c.grand_total.status)
      << ',' << to_string(c.average.status) << ',' << to_string(c.min_max.status) << '\n';
}

RunReport run_cell(const fs::path& dir, const DatasetInfo& dataset, workload::Engine engine,
                   workload::Matching matching, const workload::Query& q, const CellOptions& options,
                   double overhead_ms) {
  RunReport r;
  r.dataset = dataset;
  r.engine = std::string(workload::to_string(engine));
  r.matching = std::string(workload::to_string(matching));
  r.query = q.id;
  r.overhead_ms = engine == workload::Engine::pedersen ? overhead_ms : 0.0;
  try {
    for (int i = 0; i < options.warmup; ++i) {
      workload::run_query(q, dir, engine, matching, {options.instrument});
    }
    std::vector<workload::QueryResult> runs;
    for (int i = 0; i < std::max(1, options.repetitions); ++i) {
      runs.push_back(workload::run_query(q, dir, engine, matching, {options.instrument}));
    }
    std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) {
      return a.timing.total_ms < b.timing.total_ms;
    });
    const auto& median = runs[runs.size() / 2];
    r.query_ms = median.timing.total_ms;
    r.phases = median.timing;
    r.groups = median.cube.entries.size();
    if (options.check) {
      r.correctness = check_correctness(median.cube, dir, q);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

namespace {

std::string default_label(const HierarchySetting& h) {
  if (h.incomplete == 0 && h.nonstrict == 0) return "Simple";
  if (h.nonstrict == 0) return "Incomplete " + std::to_string(h.incomplete) + "%";
  if (h.incomplete == 0) return "Non-strict " + std::to_string(h.nonstrict) + "%";
  if (h.incomplete == h.nonstrict) return "Complex " + std::to_string(h.incomplete) + "%";
  return "Complex " + std::to_string(h.incomplete) + "%/" + std::to_string(h.nonstrict) + "%";
}

std::string slug(std::string_view label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '-') {
      out += '-';
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

template <typename T>
std::vector<T> json_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  if (!j.at(key).is_array()) throw ConfigError(std::string("matrix: '") + key + "' must be a list");
  return j.at(key).get<std::vector<T>>();
}

bool same_config(const fs::path& dir, const gen::GeneratorConfig& cfg) {
  std::ifstream in(dir / "generator.json");
  if (!in) return false;
  try {
    const auto j = nlohmann::json::parse(in);
    return j.value("fact_number", std::uint64_t{0}) == cfg.fact_number &&
           j.value("incomplete_percentage", -1) == cfg.incomplete_percentage &&
           j.value("nonstrict_percentage", -1) == cfg.nonstrict_percentage &&
           j.value("nonstrict_number", -1) == cfg.nonstrict_number &&
           j.value("seed", std::uint64_t{0}) == cfg.seed;
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

}  // namespace

CampaignMatrix parse_matrix(std::string_view text, const fs::path& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("matrix: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("matrix: expected a JSON object");
  CampaignMatrix m;
  try {
    if (j.contains("workdir")) m.workdir = base / j.at("workdir").get<std::string>();
    else m.workdir = base / m.workdir;
    m.seed = j.value("seed", m.seed);
    m.facts = json_list<std::uint64_t>(j, "facts");
    if (j.contains("hierarchies")) {
      for (const auto& h : j.at("hierarchies")) {
        HierarchySetting s;
        s.incomplete = h.value("incomplete", 0);
        s.nonstrict = h.value("nonstrict", 0);
        s.nonstrict_number = h.value("nonstrict_number", 4);
        s.label = h.value("label", default_label(s));
        m.hierarchies.push_back(std::move(s));
      }
    }
    for (const auto& e : json_list<std::string>(j, "engines")) {
      auto engine = workload::parse_engine(e);
      if (!engine || *engine == workload::Engine::naive) {
        throw ConfigError("matrix: unknown engine '" + e + "'");
      }
      m.engines.push_back(*engine);
    }
    for (const auto& s : json_list<std::string>(j, "matching")) {
      auto mm = workload::parse_matching(s);
      if (!mm) throw ConfigError("matrix: unknown matching '" + s + "'");
      m.matching.push_back(*mm);
    }
    if (j.contains("queries") && j.at("queries").is_string()) {
      m.queries = {j.at("queries").get<std::string>()};
    } else {
      m.queries = json_list<std::string>(j, "queries");
    }
    m.cell.warmup = j.value("warmup", m.cell.warmup);
    m.cell.repetitions = j.value("repetitions", m.cell.repetitions);
    m.cell.instrument = j.value("instrument", m.cell.instrument);
    m.cell.check = j.value("check", m.cell.check);
    m.parallel = j.value("parallel", false);
    if (j.contains("workload")) m.workload_file = base / j.at("workload").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("matrix: ") + e.what());
  }
  return m;
}

CampaignMatrix load_matrix(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open matrix '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str(), file.parent_path());
}

std::vector<std::pair<std::string, std::uintmax_t>> document_sizes(const fs::path& dir) {
  const DwModel model = xmlio::read_metadata(dir);
  std::vector<std::pair<std::string, std::uintmax_t>> out;
  out.emplace_back(xmlio::kMetadataFile, fs::file_size(dir / xmlio::kMetadataFile));
  out.emplace_back(model.fact_path, fs::file_size(dir / model.fact_path));
  for (const auto& d : model.dimensions) out.emplace_back(d.path, fs::file_size(dir / d.path));
  return out;
}

CampaignResult run_campaign(const CampaignMatrix& matrix, const fs::path& report,
                            std::ostream* progress) {
  using Clock = std::chrono::steady_clock;
  CampaignResult result;

  std::vector<workload::Query> queries;
  if (!matrix.queries.empty()) {
    const auto all = matrix.workload_file ? workload::load_workload(*matrix.workload_file)
                                          : workload::standard_workload();
    if (matrix.queries.size() == 1 && matrix.queries.front() == "all") {
      queries = all;
    } else {
      for (const auto& id : matrix.queries) queries.push_back(workload::find_query(all, id));
    }
  }

  if (report.has_parent_path()) fs::create_directories(report.parent_path());
  std::ofstream csv(report, std::ios::trunc);
  if (!csv) throw IoError("cannot write report '" + report.string() + "'");
  csv << kCsvHeader << '\n';

  const bool want_pedersen = std::find(matrix.engines.begin(), matrix.engines.end(),
                                       workload::Engine::pedersen) != matrix.engines.end();

  for (const auto& h : matrix.hierarchies) {
    for (const auto facts : matrix.facts) {
      gen::GeneratorConfig cfg;
      cfg.fact_number = facts;
      cfg.incomplete_percentage = h.incomplete;
      cfg.nonstrict_percentage = h.nonstrict;
      cfg.nonstrict_number = h.nonstrict_number;
      cfg.seed = matrix.seed;
      const std::string name = slug(h.label) + "-f" + std::to_string(facts);
      cfg.output_dir = matrix.workdir / name;

      double load_ms = 0;
      if (!same_config(cfg.output_dir, cfg)) {
        if (progress) *progress << "generating " << name << '\n';
        const auto t0 = Clock::now();
        gen::generate_warehouse(cfg, default_model());
        load_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      }
      DatasetInfo info = dataset_info(cfg.output_dir);
      info.label = name;

      DatasetSize size;
      size.info = info;
      size.info.label = h.label;
      size.documents = document_sizes(cfg.output_dir);
      for (const auto& [doc, bytes] : size.documents) size.total_bytes += bytes;
      result.sizes.push_back(std::move(size));

      double overhead_ms = 0;
      const fs::path transformed = matrix.workdir / (name + "-pedersen");
      if (want_pedersen && !queries.empty()) {
        if (progress) *progress << "transforming " << name << '\n';
        overhead_ms = pedersen::transform_warehouse(cfg.output_dir, transformed).overhead_ms;
      }

      struct Cell {
        workload::Engine engine;
        workload::Matching matching;
        const workload::Query* query;
      };
      std::vector<Cell> cells;
      for (const auto& q : queries) {
        for (auto e : matrix.engines) {
          for (auto mm : matrix.matching) cells.push_back({e, mm, &q});
        }
      }
      const auto run = [&](const Cell& c) {
        const auto& dir = c.engine == workload::Engine::pedersen ? transformed : cfg.output_dir;
        auto r = run_cell(dir, info, c.engine, c.matching, *c.query, matrix.cell, overhead_ms);
        r.load_ms = load_ms;
        return r;
      };
      std::vector<RunReport> rows;
      if (matrix.parallel) {
        std::vector<std::future<RunReport>> futures;
        for (const auto& c : cells) futures.push_back(std::async(std::launch::async, run, c));
        for (auto& f : futures) rows.push_back(f.get());
      } else {
        for (const auto& c : cells) {
          if (progress) {
            *progress << "  " << c.query->id << ' ' << workload::to_string(c.engine) << ' '
                      << workload::to_string(c.matching) << '\n';
          }
          rows.push_back(run(c));
        }
      }
      for (auto& r : rows) {
        write_csv_row(csv, r);
        result.rows.push_back(std::move(r));
      }
      csv.flush();
    }
  }

  // Dataset sizes pivoted like a size table: hierarchy rows, fact columns.
  auto sizes_path = report;
  sizes_path.replace_filename(report.stem().string() + ".sizes.csv");
  std::ofstream sizes(sizes_path, std::ios::trunc);
  if (!sizes) throw IoError("cannot write '" + sizes_path.string() + "'");
  sizes << "hierarchy";
  for (auto f : matrix.facts) sizes << ',' << f;
  sizes << '\n';
  std::size_t k = 0;
  for (const auto& h : matrix.hierarchies) {
    sizes << h.label;
    for (std::size_t i = 0; i < matrix.facts.size(); ++i, ++k) {
      sizes << ',' << (result.sizes[k].total_bytes + 512) / 1024;
    }
    sizes << '\n';
  }
  return result;
}

}  // namespace cxbench::harness
