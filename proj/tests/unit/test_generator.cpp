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

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <json.hpp>
#include <map>
#include <set>

#include "cxbench/error.hpp"
#include "cxbench/generator.hpp"
#include "test_support.hpp"

namespace cxbench::gen {
namespace {

using testing::config;
using testing::TempDir;

bool has_absent_cell(const DimensionInstance& inst, const DimensionSchema& schema) {
  for (const auto& r : inst.rows) {
    for (const auto& level : schema.levels) {
      if (!r.has(level)) return true;
    }
  }
  return false;
}

TEST(Regime, FromParameters) {
  EXPECT_EQ(config(1, 0, 0).regime(), Regime::simple);
  EXPECT_EQ(config(1, 5, 0).regime(), Regime::incomplete);
  EXPECT_EQ(config(1, 0, 5).regime(), Regime::nonstrict);
  EXPECT_EQ(config(1, 5, 5).regime(), Regime::complex);
}

TEST(Regime, RejectsBadParameters) {
  EXPECT_THROW(config(1, -1, 0).regime(), ConfigError);
  EXPECT_THROW(config(1, 0, 101).regime(), ConfigError);
  auto cfg = config(1, 0, 10);
  cfg.nonstrict_number = 1;
  EXPECT_THROW(cfg.regime(), ConfigError);
  cfg.nonstrict_percentage = 0;
  EXPECT_NO_THROW(cfg.regime());
}

TEST(SelectTargets, OnePickPerFullBlock) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto total = static_cast<std::size_t>(rng.below(5000));
    const int pct = static_cast<int>(1 + rng.below(100));
    const auto block = static_cast<std::size_t>(std::lround(100.0 / pct));
    const auto picks = select_targets(total, pct, rng);
    ASSERT_EQ(picks.size(), total / block) << total << " " << pct;
    for (std::size_t i = 0; i < picks.size(); ++i) {
      ASSERT_EQ(picks[i] / block, i);
      ASSERT_LT(picks[i], total);
    }
  }
}

TEST(SelectTargets, EdgeCases) {
  Rng rng(1);
  EXPECT_TRUE(select_targets(100, 0, rng).empty());
  EXPECT_TRUE(select_targets(0, 50, rng).empty());
  auto all = select_targets(7, 100, rng);
  EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6}));
  EXPECT_THROW(select_targets(10, 120, rng), ConfigError);
}

TEST(RemoveLevels, AlwaysRemovesSomething) {
  const auto& s = testing::model().dimension("part");
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto r = draw_row(s, rng);
    remove_levels(r, s, rng);
    ASSERT_LT(r.size(), 3u);
  }
  LevelRow empty;
  remove_levels(empty, s, rng);
  EXPECT_TRUE(empty.empty());
}

TEST(RemoveLevels, TruncatedBinomialFrequencies) {
  // Each of the 3 levels goes with probability 1/2, redrawn until at least
  // one went: P(k | k >= 1) = C(3, k) / 7.
  const auto& s = testing::model().dimension("part");
  Rng rng(12345);
  constexpr int kTrials = 10000;
  std::array<int, 4> removed{};
  std::array<int, 3> per_level{};
  for (int i = 0; i < kTrials; ++i) {
    auto r = draw_row(s, rng);
    remove_levels(r, s, rng);
    ++removed[3 - r.size()];
    for (std::size_t l = 0; l < 3; ++l) per_level[l] += !r.has(s.levels[l]);
  }
  ASSERT_EQ(removed[0], 0);
  const std::array<double, 4> expected = {0, 3.0 / 7, 3.0 / 7, 1.0 / 7};
  double chi2 = 0;
  for (int k = 1; k <= 3; ++k) {
    const double e = expected[k] * kTrials;
    chi2 += (removed[k] - e) * (removed[k] - e) / e;
  }
  EXPECT_LT(chi2, 13.8);  // 0.999 quantile, 2 degrees of freedom
  for (int l = 0; l < 3; ++l) {
    EXPECT_NEAR(per_level[l] / double(kTrials), 4.0 / 7, 0.02);
  }
}

TEST(RemoveLevels, TwoLevelFrequencies) {
  const auto& s = testing::model().dimension("customer");
  Rng rng(777);
  constexpr int kTrials = 10000;
  int both = 0;
  for (int i = 0; i < kTrials; ++i) {
    auto r = draw_row(s, rng);
    remove_levels(r, s, rng);
    both += r.empty();
  }
  EXPECT_NEAR(both / double(kTrials), 1.0 / 3, 0.02);
}

TEST(GenIncomplete, MultiRowLosesALevelEverywhere) {
  const auto& s = testing::model().dimension("supplier");
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    auto inst = gen_nonstrict(4, {"supplier#1", "supplier", {}}, s, rng);
    inst = gen_incomplete(std::move(inst), s, rng);
    ASSERT_EQ(classify_instance(inst, s), HierarchyKind::complex);
    bool level_gone = false;
    for (const auto& level : s.levels) {
      level_gone |= std::none_of(inst.rows.begin(), inst.rows.end(),
                                 [&](const LevelRow& r) { return r.has(level); });
    }
    ASSERT_TRUE(level_gone);
  }
}

TEST(GenNonstrict, ExactRowCount) {
  const auto& s = testing::model().dimension("part");
  Rng rng(8);
  for (int k = 2; k <= 6; ++k) {
    const auto inst = gen_nonstrict(k, {"part#1", "part", {}}, s, rng);
    EXPECT_EQ(inst.rows.size(), static_cast<std::size_t>(k));
    EXPECT_EQ(classify_instance(inst, s), HierarchyKind::nonstrict);
  }
}

TEST(GenNonstrict, Eligibility) {
  const auto m = default_model();
  Rng rng(8);
  EXPECT_THROW(gen_nonstrict(4, {"date#1", "date", {}}, m.dimension("date"), rng), EligibilityError);
  EXPECT_THROW(gen_nonstrict(1, {"part#1", "part", {}}, m.dimension("part"), rng), ConfigError);
  EXPECT_NO_THROW(gen_nonstrict(2, {"customer#1", "customer", {}}, m.dimension("customer"), rng));
}

TEST(GenComplex, AlwaysComplex) {
  const auto m = default_model();
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto& s = m.dimension(i % 2 ? "part" : "supplier");
    auto ns = gen_nonstrict(2 + static_cast<int>(rng.below(4)), {"x#1", s.id, {}}, s, rng);
    const auto c = gen_complex(ns, s, rng);
    ASSERT_EQ(c.rows.size(), ns.rows.size());
    ASSERT_EQ(classify_instance(c, s), HierarchyKind::complex);
  }
}

TEST(BuildWarehouse, InstanceArithmetic) {
  const auto m = default_model();
  const auto wh = build_warehouse(config(10, 50, 0), m).warehouse;
  EXPECT_EQ(wh.facts.size(), 10u);
  EXPECT_EQ(wh.instance_count(), 40u);
  int incomplete = 0;
  for (std::size_t d = 0; d < 4; ++d) {
    for (const auto& inst : wh.instances[d]) incomplete += has_absent_cell(inst, m.dimensions[d]);
  }
  EXPECT_EQ(incomplete, 20);
}

TEST(BuildWarehouse, FactsAreWellFormed) {
  const auto m = default_model();
  const auto& pools = value_pools();
  const auto wh = build_warehouse(config(2000, 0, 0), m).warehouse;
  for (std::size_t i = 0; i < wh.facts.size(); ++i) {
    const auto& f = wh.facts[i];
    const auto n = std::to_string(i + 1);
    ASSERT_EQ(f.fact_id, "sale#" + n);
    ASSERT_GE(f.quantity, 1);
    ASSERT_LE(f.quantity, 100);
    ASSERT_EQ(f.amount_cents % f.quantity, 0);
    const auto price = f.amount_cents / f.quantity;
    ASSERT_GE(price, 100);
    ASSERT_LE(price, 10000);
    for (std::size_t d = 0; d < 4; ++d) {
      ASSERT_EQ(f.dim_refs[d], m.dimensions[d].id + "#" + n);
      ASSERT_EQ(wh.instances[d][i].instance_id, f.dim_refs[d]);
    }
    const auto& date = wh.instances[3][i].rows.front();
    ASSERT_GE(*date.find("day"), "1992-01-01");
    ASSERT_LE(*date.find("day"), "1998-12-31");
    ASSERT_EQ(date.find("day")->substr(0, 7), *date.find("month"));
    ASSERT_EQ(date.find("day")->substr(0, 4), *date.find("year"));
  }
}

TEST(BuildWarehouse, NationRegionStaysStrict) {
  const auto m = default_model();
  const auto& pools = value_pools();
  const auto wh = build_warehouse(config(1000, 50, 50), m).warehouse;
  for (std::size_t d : {1u, 2u}) {
    for (const auto& inst : wh.instances[d]) {
      for (const auto& r : inst.rows) {
        if (r.has("nation") && r.has("region")) {
          ASSERT_EQ(pools.region_of(*r.find("nation")), *r.find("region"));
        }
      }
    }
  }
}

TEST(BuildWarehouse, Deterministic) {
  const auto m = default_model();
  const auto a = build_warehouse(config(500, 50, 50), m);
  const auto b = build_warehouse(config(500, 50, 50), m);
  EXPECT_EQ(a.warehouse, b.warehouse);
  EXPECT_EQ(a.selection.nonstrict, b.selection.nonstrict);
  const auto c = build_warehouse(config(500, 50, 50, {}, 43), m);
  EXPECT_NE(a.warehouse, c.warehouse);
}

TEST(BuildWarehouse, NonstrictSelection) {
  const auto m = default_model();
  auto cfg = config(1000, 0, 10);
  cfg.nonstrict_number = 3;
  const auto r = build_warehouse(cfg, m);
  // 2000 eligible part and supplier instances, one in ten.
  EXPECT_EQ(r.selection.nonstrict.size(), 200u);
  std::map<std::string, int> per_dim;
  for (auto g : r.selection.nonstrict) {
    const auto& inst = r.warehouse.instances[g % 4][g / 4];
    ASSERT_EQ(inst.rows.size(), 3u);
    ++per_dim[inst.dimension_id];
  }
  EXPECT_EQ(per_dim.count("customer") + per_dim.count("date"), 0u);
  EXPECT_GT(per_dim["part"], 0);
  EXPECT_GT(per_dim["supplier"], 0);
}

TEST(BuildWarehouse, UniformRowsAndCustomerOption) {
  const auto m = default_model();
  auto cfg = config(1000, 0, 50);
  cfg.nonstrict_number = 5;
  cfg.rows_mode = NonstrictRows::uniform;
  cfg.customer_nonstrict = true;
  const auto r = build_warehouse(cfg, m);
  EXPECT_EQ(r.selection.nonstrict.size(), 1500u);
  std::set<std::size_t> sizes;
  bool customer = false;
  for (auto g : r.selection.nonstrict) {
    const auto& inst = r.warehouse.instances[g % 4][g / 4];
    sizes.insert(inst.rows.size());
    customer |= inst.dimension_id == "customer";
  }
  EXPECT_EQ(sizes, (std::set<std::size_t>{2, 3, 4, 5}));
  EXPECT_TRUE(customer);
}

TEST(BuildWarehouse, RegimePurity) {
  const auto m = default_model();
  for (const auto& c : testing::regime_matrix()) {
    SCOPED_TRACE(c.name);
    const auto r = build_warehouse(config(1000, c.incomplete, c.nonstrict), m);
    std::map<HierarchyKind, int> kinds;
    for (std::size_t d = 0; d < 4; ++d) {
      for (const auto& inst : r.warehouse.instances[d]) {
        ++kinds[classify_instance(inst, m.dimensions[d])];
      }
    }
    const auto& sel = r.selection;
    if (c.incomplete == 0 && c.nonstrict == 0) {
      EXPECT_EQ(kinds[HierarchyKind::simple], 4000);
    } else if (c.nonstrict == 0) {
      EXPECT_EQ(kinds[HierarchyKind::incomplete], static_cast<int>(sel.incomplete.size()));
      EXPECT_EQ(kinds[HierarchyKind::nonstrict] + kinds[HierarchyKind::complex], 0);
    } else if (c.incomplete == 0) {
      EXPECT_EQ(kinds[HierarchyKind::nonstrict], static_cast<int>(sel.nonstrict.size()));
      EXPECT_EQ(kinds[HierarchyKind::incomplete] + kinds[HierarchyKind::complex], 0);
    } else {
      for (auto g : sel.nonstrict) {
        ASSERT_EQ(classify_instance(r.warehouse.instances[g % 4][g / 4], m.dimensions[g % 4]),
                  HierarchyKind::complex);
      }
      EXPECT_EQ(kinds[HierarchyKind::complex], static_cast<int>(sel.nonstrict.size()));
      EXPECT_EQ(kinds[HierarchyKind::nonstrict], 0);
      EXPECT_EQ(static_cast<std::size_t>(kinds[HierarchyKind::complex] +
                                         kinds[HierarchyKind::incomplete]),
                sel.incomplete.size());
    }
  }
}

TEST(GenerateWarehouse, ByteIdenticalReruns) {
  TempDir a("gen-a"), b("gen-b");
  const auto m = default_model();
  generate_warehouse(config(300, 50, 50, a.path()), m);
  generate_warehouse(config(300, 50, 50, b.path()), m);
  for (const char* doc :
       {"dw-model.xml", "f_sale.xml", "d_part.xml", "d_customer.xml", "d_supplier.xml", "d_date.xml",
        "generator.json"}) {
    EXPECT_EQ(testing::read_file(a / doc), testing::read_file(b / doc)) << doc;
  }
}

TEST(GenerateWarehouse, Sidecar) {
  TempDir dir("gen-json");
  generate_warehouse(config(20, 5, 5, dir.path(), 7), default_model());
  const auto j = nlohmann::json::parse(testing::read_file(dir / "generator.json"));
  EXPECT_EQ(j["fact_number"], 20);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["regime"], "complex");
  EXPECT_EQ(j["rng"], Rng::kAlgorithm);
}

TEST(GenerateWarehouse, ZeroFacts) {
  TempDir dir("gen-empty");
  const auto r = generate_warehouse(config(0, 50, 50, dir.path()), default_model());
  EXPECT_TRUE(r.warehouse.facts.empty());
  EXPECT_NE(testing::read_file(dir / "f_sale.xml").find("<facts id='sale'/>"), std::string::npos);
  EXPECT_THROW(generate_warehouse(config(1, 0, 0), default_model()), ConfigError);
}

}  // namespace
}  // namespace cxbench::gen
