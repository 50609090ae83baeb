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

// cxbench command line: generate, transform, run, oracle, campaign.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 correctness failure (only with
// --strict).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "cxbench/error.hpp"
#include "cxbench/generator.hpp"
#include "cxbench/harness.hpp"
#include "cxbench/pedersen.hpp"
#include "cxbench/workload.hpp"
#include "cxbench/xmlio.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cxbench;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIncorrect = 3;

struct GenerateArgs {
  gen::GeneratorConfig cfg;
  std::string rows = "exact";
};

struct RunArgs {
  fs::path in;
  std::string engine = "qbs";
  std::string matching = "hash";
  std::string query = "all";
  fs::path report;
  fs::path workload;
  harness::CellOptions cell;
  bool instrument = false;
  bool no_check = false;
  bool print_cube = false;
};

std::vector<workload::Query> load_queries(const fs::path& file) {
  return file.empty() ? workload::standard_workload() : workload::load_workload(file);
}

std::vector<workload::Query> select_queries(const std::vector<workload::Query>& all,
                                            const std::string& id) {
  if (id == "all") return all;
  return {workload::find_query(all, id)};
}

int cmd_generate(const GenerateArgs& a) {
  auto cfg = a.cfg;
  cfg.rows_mode = a.rows == "uniform" ? gen::NonstrictRows::uniform : gen::NonstrictRows::exact;
  const auto result = gen::generate_warehouse(cfg, default_model());
  const auto& wh = result.warehouse;
  std::cout << "wrote " << wh.facts.size() << " facts, " << wh.instance_count()
            << " instances to " << cfg.output_dir.string() << " (regime "
            << gen::to_string(cfg.regime()) << ", " << result.selection.nonstrict.size()
            << " non-strict, " << result.selection.incomplete.size() << " incomplete)\n";
  return kExitOk;
}

int cmd_transform(const fs::path& in, const fs::path& out) {
  const auto r = pedersen::transform_warehouse(in, out);
  std::cout << "transformed " << in.string() << " -> " << out.string() << ": "
            << r.instances_covered << " instances covered, " << r.instances_fused
            << " fused, overhead " << r.overhead_ms << " ms\n";
  return kExitOk;
}

double recorded_overhead(const fs::path& dir) {
  std::ifstream in(dir / pedersen::kTransformFile);
  if (!in) return 0;
  try {
    return nlohmann::json::parse(in).value("overhead_ms", 0.0);
  } catch (const nlohmann::json::exception&) {
    return 0;
  }
}

int cmd_run(const RunArgs& a, bool strict) {
  const auto engine = workload::parse_engine(a.engine);
  const auto matching = workload::parse_matching(a.matching);
  if (!engine) throw ConfigError("unknown engine '" + a.engine + "'");
  if (!matching) throw ConfigError("unknown matching '" + a.matching + "'");

  const DwModel model = xmlio::read_metadata(a.in);
  if (*engine == workload::Engine::pedersen && !model.pedersen_transformed) {
    throw ConfigError("engine pedersen needs a transformed warehouse (see 'cxbench transform')");
  }
  const auto all = load_queries(a.workload);
  const auto queries = select_queries(all, a.query);
  const auto info = harness::dataset_info(a.in);
  const double overhead = *engine == workload::Engine::pedersen ? recorded_overhead(a.in) : 0.0;

  auto cell = a.cell;
  cell.instrument = a.instrument;
  cell.check = !a.no_check;

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!a.report.empty()) {
    if (a.report.has_parent_path()) fs::create_directories(a.report.parent_path());
    file.open(a.report, std::ios::trunc);
    if (!file) throw IoError("cannot write report '" + a.report.string() + "'");
    out = &file;
  }
  *out << harness::kCsvHeader << '\n';

  int code = kExitOk;
  for (const auto& q : queries) {
    auto r = harness::run_cell(a.in, info, *engine, *matching, q, cell, overhead);
    harness::write_csv_row(*out, r);
    if (!r.error.empty()) {
      std::cerr << q.id << ": " << r.error << '\n';
      code = std::max(code, kExitData);
      continue;
    }
    if (a.print_cube) {
      std::cerr << "# " << q.id << '\n'
                << workload::format_cube(workload::run_query(q, a.in, *engine, *matching).cube);
    }
    if (strict && cell.check && !r.correctness.ok()) {
      for (const auto* c : {&r.correctness.duplicates, &r.correctness.grand_total,
                            &r.correctness.average, &r.correctness.min_max}) {
        if (c->status == harness::CheckStatus::fail) std::cerr << q.id << ": " << c->detail << '\n';
      }
      code = std::max(code, kExitIncorrect);
    }
  }
  return code;
}

int cmd_oracle(const fs::path& in, const std::string& id, const fs::path& workload_file,
               bool strict) {
  const auto all = load_queries(workload_file);
  const auto queries = select_queries(all, id);
  const Warehouse wh = xmlio::load_warehouse(in);
  int code = kExitOk;
  for (const auto& q : queries) {
    const auto cube = harness::oracle_cube(wh, q);
    std::cout << "# " << q.id << '\n' << workload::format_cube(cube);
    if (strict && !wh.model.pedersen_transformed) {
      const auto got = workload::run_query(q, in, workload::Engine::qbs, workload::Matching::hash);
      if (auto diff = workload::cube_difference(cube, got.cube)) {
        std::cerr << q.id << ": qbs differs from oracle: " << *diff << '\n';
        code = kExitIncorrect;
      }
    }
  }
  return code;
}

int cmd_campaign(const fs::path& matrix_file, const fs::path& report, bool strict, bool quiet) {
  const auto matrix = harness::load_matrix(matrix_file);
  const auto result = harness::run_campaign(matrix, report, quiet ? nullptr : &std::cerr);
  int code = kExitOk;
  for (const auto& r : result.rows) {
    if (!r.error.empty()) {
      std::cerr << r.dataset.label << ' ' << r.engine << ' ' << r.query << ": " << r.error << '\n';
      code = std::max(code, kExitData);
    } else if (strict && matrix.cell.check && !r.correctness.ok()) {
      code = std::max(code, kExitIncorrect);
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark for OLAP aggregation over complex dimension hierarchies"};
  app.require_subcommand(1);
  bool strict = false;
  app.add_flag("--strict", strict, "Exit with 3 when a correctness check fails");

  GenerateArgs gen_args;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic XML warehouse");
  generate->add_option("--facts", gen_args.cfg.fact_number, "Number of facts")->required();
  generate->add_option("--incomplete", gen_args.cfg.incomplete_percentage,
                       "Percentage of incomplete instances")
      ->check(CLI::Range(0, 100));
  generate->add_option("--nonstrict", gen_args.cfg.nonstrict_percentage,
                       "Percentage of non-strict instances")
      ->check(CLI::Range(0, 100));
  generate->add_option("--nonstrict-number", gen_args.cfg.nonstrict_number,
                       "Rows per non-strict instance")
      ->capture_default_str();
  generate->add_option("--seed", gen_args.cfg.seed, "Random seed")->capture_default_str();
  generate->add_option("--out", gen_args.cfg.output_dir, "Output directory")->required();
  generate->add_option("--nonstrict-rows", gen_args.rows, "Row count policy: exact or uniform")
      ->check(CLI::IsMember({"exact", "uniform"}))
      ->capture_default_str();
  generate->add_flag("--customer-nonstrict", gen_args.cfg.customer_nonstrict,
                     "Let customer instances be non-strict too");

  fs::path t_in, t_out;
  auto* transform = app.add_subcommand("transform", "Make every hierarchy covering and strict");
  transform->add_option("--in", t_in, "Input warehouse")->required()->check(CLI::ExistingDirectory);
  transform->add_option("--out", t_out, "Output directory")->required();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run workload queries and report timings as CSV");
  run->add_option("--in", run_args.in, "Warehouse directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  run->add_option("--engine", run_args.engine, "qbs or pedersen")
      ->check(CLI::IsMember({"qbs", "pedersen", "naive"}))
      ->capture_default_str();
  run->add_option("--query", run_args.query, "Query id or all")->capture_default_str();
  run->add_option("--matching", run_args.matching, "scan or hash")
      ->check(CLI::IsMember({"scan", "hash"}))
      ->capture_default_str();
  run->add_option("--report", run_args.report, "CSV file (stdout when omitted)");
  run->add_option("--workload", run_args.workload, "Workload file")->check(CLI::ExistingFile);
  run->add_option("--warmup", run_args.cell.warmup, "Discarded runs per cell")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  run->add_option("--repetitions", run_args.cell.repetitions, "Timed runs per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_flag("--instrument", run_args.instrument, "Time read, resolve, match and aggregate phases");
  run->add_flag("--no-check", run_args.no_check, "Skip the correctness checks");
  run->add_flag("--print-cube", run_args.print_cube, "Print each result cube to stderr");

  fs::path o_in, o_workload;
  std::string o_query;
  auto* oracle = app.add_subcommand("oracle", "Print the reference cube of a query");
  oracle->add_option("--in", o_in, "Warehouse directory")->required()->check(CLI::ExistingDirectory);
  oracle->add_option("--query", o_query, "Query id or all")->required();
  oracle->add_option("--workload", o_workload, "Workload file")->check(CLI::ExistingFile);

  fs::path c_matrix, c_report;
  bool c_quiet = false;
  auto* campaign = app.add_subcommand("campaign", "Run a benchmark matrix");
  campaign->add_option("--matrix", c_matrix, "Matrix JSON")->required()->check(CLI::ExistingFile);
  campaign->add_option("--report", c_report, "CSV report")->required();
  campaign->add_flag("--quiet", c_quiet, "No progress output");

  for (auto* sub : {generate, transform, run, oracle, campaign}) {
    sub->add_flag("--strict", strict, "Exit with 3 when a correctness check fails");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen_args);
    if (*transform) return cmd_transform(t_in, t_out);
    if (*run) return cmd_run(run_args, strict);
    if (*oracle) return cmd_oracle(o_in, o_query, o_workload, strict);
    if (*campaign) return cmd_campaign(c_matrix, c_report, strict, c_quiet);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const QueryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EligibilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
