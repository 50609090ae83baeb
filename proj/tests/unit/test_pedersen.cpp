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

#include <json.hpp>

#include "cxbench/error.hpp"
#include "cxbench/generator.hpp"
#include "cxbench/pedersen.hpp"
#include "cxbench/qbs.hpp"
#include "cxbench/workload.hpp"
#include "cxbench/xmlio.hpp"
#include "test_support.hpp"

namespace cxbench::pedersen {
namespace {

using testing::instance;
using testing::model;
using testing::read_file;
using testing::row;
using testing::TempDir;

TEST(MakeCovering, FillsAbsentCells) {
  const auto& s = model().dimension("part");
  const auto inst = make_covering(instance("part#1", s, {row(s, {{"type2", "BRUSHED"}}), LevelRow{}}), s);
  ASSERT_EQ(inst.rows.size(), 2u);
  EXPECT_EQ(*inst.rows[0].find("type3"), "Other");
  EXPECT_EQ(*inst.rows[0].find("type2"), "BRUSHED");
  EXPECT_EQ(*inst.rows[0].find("type1"), "Other");
  EXPECT_EQ(inst.rows[1].size(), 3u);
}

TEST(MakeStrict, FusesSeveralValues) {
  const auto& s = model().dimension("supplier");
  const auto in = instance("supplier#1", s,
                           {row(s, {{"nation", "GERMANY"}, {"region", "EUROPE"}}),
                            row(s, {{"nation", "FRANCE"}, {"region", "EUROPE"}})});
  const auto r = make_strict(in, s);
  EXPECT_EQ(r.fused_levels, std::vector<std::string>{"nation"});
  EXPECT_EQ(r.schema.levels, (std::vector<std::string>{"nation", "nation_fused", "region"}));
  ASSERT_EQ(r.instance.rows.size(), 1u);
  const auto& only = r.instance.rows.front();
  EXPECT_EQ(*only.find("nation"), "FRANCE+GERMANY");
  EXPECT_EQ(*only.find("nation_fused"), "FRANCE+GERMANY");
  EXPECT_EQ(*only.find("region"), "EUROPE");
}

TEST(MakeStrict, PlaceholderOnlyWhenNothingElse) {
  const auto& s = model().dimension("supplier");
  const auto covered = make_covering(
      instance("supplier#1", s, {row(s, {{"nation", "FRANCE"}}), row(s, {{"region", "ASIA"}})}), s);
  const auto r = make_strict(covered, s);
  const auto& only = r.instance.rows.front();
  EXPECT_EQ(*only.find("nation"), "FRANCE");
  EXPECT_EQ(*only.find("region"), "ASIA");
  EXPECT_TRUE(r.fused_levels.empty());

  const auto none = make_strict(make_covering(instance("s", s, {LevelRow{}, LevelRow{}}), s), s);
  EXPECT_EQ(*none.instance.rows.front().find("nation"), "Other");
}

TEST(MakeStrict, StrictCoveringInstanceUnchanged) {
  const auto& s = model().dimension("customer");
  const auto in = instance("customer#1", s, {row(s, {{"nation", "CHINA"}, {"region", "ASIA"}})});
  const auto r = make_strict(in, s);
  EXPECT_EQ(r.instance, in);
  EXPECT_EQ(r.schema, s);
}

TEST(MakeStrict, ExtendedSchemaFillsFusedLevelForAtomicValues) {
  const auto& s = model().dimension("supplier");
  const auto ext = extend_schema(s, {"nation"});
  const auto in = instance("supplier#3", s, {row(s, {{"nation", "CHINA"}, {"region", "ASIA"}})});
  const auto r = make_strict(in, ext);
  EXPECT_EQ(*r.instance.rows.front().find("nation_fused"), "CHINA");
  EXPECT_EQ(classify_instance(r.instance, ext), HierarchyKind::simple);
}

TEST(MakeStrict, PropertyAlwaysSimpleAndAgreesWithQbs) {
  // After covering and strictness every instance is simple over its schema,
  // and reading a level back gives the query-time component, with "Other"
  // standing for an empty member set.
  Rng rng(17);
  const auto& s = model().dimension("part");
  for (int i = 0; i < 2000; ++i) {
    const auto raw = testing::random_instance(rng, s, "part#" + std::to_string(i));
    const auto r = make_strict(make_covering(raw, s), s);
    ASSERT_EQ(r.instance.rows.size(), 1u);
    ASSERT_EQ(classify_instance(r.instance, r.schema), HierarchyKind::simple);
    for (const auto& level : s.levels) {
      ASSERT_EQ(resolve_component(r.instance, r.schema, level), qbs::resolve_component(raw, s, level))
          << level;
    }
  }
}

TEST(ResolveComponent, RejectsUntransformedData) {
  const auto& s = model().dimension("supplier");
  const auto two = instance("s", s, {row(s, {{"nation", "CHINA"}}), row(s, {{"nation", "PERU"}})});
  EXPECT_THROW(resolve_component(two, s, "nation"), StructuralError);
  EXPECT_THROW(resolve_component(instance("s", s, {LevelRow{}}), s, "nation"), StructuralError);
  EXPECT_THROW(resolve_component(instance("s", s, {LevelRow{}}), s, "city"), QueryError);
}

class Transformed : public ::testing::TestWithParam<testing::RegimeCase> {};

TEST_P(Transformed, CoveringAndStrict) {
  TempDir raw("ped-raw"), out("ped-out");
  const auto c = GetParam();
  gen::generate_warehouse(testing::config(1000, c.incomplete, c.nonstrict, raw.path()), default_model());
  const auto report = transform_warehouse(raw.path(), out.path());
  EXPECT_GT(report.overhead_ms, 0.0);

  const auto wh = xmlio::load_warehouse(out.path());
  EXPECT_TRUE(wh.model.pedersen_transformed);
  for (std::size_t d = 0; d < 4; ++d) {
    const auto& schema = wh.model.dimensions[d];
    for (const auto& inst : wh.instances[d]) {
      ASSERT_EQ(classify_instance(inst, schema), HierarchyKind::simple) << inst.instance_id;
      for (const auto& level : schema.levels) {
        const auto comp = qbs::resolve_component(inst, schema, level);
        ASSERT_EQ(comp.kind(), GroupComponent::Kind::atomic);
      }
    }
  }
  EXPECT_EQ(read_file(raw / "f_sale.xml"), read_file(out / "f_sale.xml"));
  EXPECT_EQ(report.instances_fused == 0, c.nonstrict == 0);
  EXPECT_EQ(report.instances_covered == 0, c.incomplete == 0);
}

TEST_P(Transformed, EnginesAgree) {
  TempDir raw("ped-raw"), out("ped-out");
  const auto c = GetParam();
  gen::generate_warehouse(testing::config(400, c.incomplete, c.nonstrict, raw.path()), default_model());
  transform_warehouse(raw.path(), out.path());
  for (const auto& q : workload::standard_workload()) {
    const auto a = workload::run_query(q, raw.path(), workload::Engine::qbs, workload::Matching::hash);
    const auto b = workload::run_query(q, out.path(), workload::Engine::pedersen, workload::Matching::hash);
    const auto diff = workload::cube_difference(a.cube, b.cube);
    EXPECT_FALSE(diff.has_value()) << q.id << ": " << diff.value_or("");
  }
}

INSTANTIATE_TEST_SUITE_P(Regimes, Transformed, ::testing::ValuesIn(testing::regime_matrix()),
                         [](const auto& info) {
                           std::string n = info.param.name;
                           std::replace(n.begin(), n.end(), '-', '_');
                           return n;
                         });

TEST(TransformWarehouse, Idempotent) {
  TempDir raw("ped-raw"), once("ped-1"), twice("ped-2");
  gen::generate_warehouse(testing::config(300, 50, 50, raw.path()), default_model());
  transform_warehouse(raw.path(), once.path());
  transform_warehouse(once.path(), twice.path());
  for (const char* doc : {"dw-model.xml", "f_sale.xml", "d_part.xml", "d_customer.xml",
                          "d_supplier.xml", "d_date.xml"}) {
    EXPECT_EQ(read_file(once / doc), read_file(twice / doc)) << doc;
  }
}

TEST(TransformWarehouse, MetadataAndSidecar) {
  TempDir raw("ped-raw"), out("ped-out");
  gen::generate_warehouse(testing::config(200, 0, 50, raw.path()), default_model());
  transform_warehouse(raw.path(), out.path());
  const auto m = xmlio::read_metadata(out.path());
  EXPECT_TRUE(m.dimension("supplier").has_level("nation_fused"));
  EXPECT_TRUE(m.dimension("part").has_level("type3_fused"));
  EXPECT_FALSE(m.dimension("date").is_extended());
  EXPECT_FALSE(m.dimension("customer").is_extended());
  const auto j = nlohmann::json::parse(read_file(out / kTransformFile));
  EXPECT_GT(j["overhead_ms"].get<double>(), 0.0);
  EXPECT_TRUE(std::filesystem::exists(out / "generator.json"));
}

TEST(TransformWarehouse, SameDirectoryRejected) {
  TempDir raw("ped-raw");
  gen::generate_warehouse(testing::config(10, 0, 0, raw.path()), default_model());
  EXPECT_THROW(transform_warehouse(raw.path(), raw.path()), ConfigError);
}

}  // namespace
}  // namespace cxbench::pedersen
