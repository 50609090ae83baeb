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

#include <map>
#include <set>

#include "cxbench/error.hpp"
#include "cxbench/qbs.hpp"
#include "test_support.hpp"

namespace cxbench::qbs {
namespace {

using testing::instance;
using testing::model;
using testing::row;

// A sale supplied by two suppliers with two branches each, four nations in
// all; in the complex variant two cells went missing.
DimensionInstance four_branches() {
  const auto& s = model().dimension("supplier");
  return instance("supplier#1", s,
                  {row(s, {{"nation", "FRANCE"}, {"region", "EUROPE"}}),
                   row(s, {{"nation", "GERMANY"}, {"region", "EUROPE"}}),
                   row(s, {{"nation", "INDIA"}, {"region", "ASIA"}}),
                   row(s, {{"nation", "JAPAN"}, {"region", "ASIA"}})});
}

DimensionInstance four_branches_incomplete() {
  const auto& s = model().dimension("supplier");
  return instance("supplier#1", s,
                  {row(s, {{"nation", "FRANCE"}}), row(s, {{"nation", "GERMANY"}, {"region", "EUROPE"}}),
                   row(s, {{"region", "ASIA"}}), row(s, {{"nation", "JAPAN"}, {"region", "ASIA"}})});
}

TEST(ResolveComponent, AtomicOnSimpleData) {
  const auto& s = model().dimension("customer");
  const auto inst = instance("customer#1", s, {row(s, {{"nation", "UNITED STATES"}, {"region", "AMERICA"}})});
  EXPECT_EQ(resolve_component(inst, s, "nation"), GroupComponent::atomic("UNITED STATES"));
  EXPECT_EQ(resolve_component(inst, s, "region"), GroupComponent::atomic("AMERICA"));
  EXPECT_EQ(resolve_component(inst, s, ""), GroupComponent::atomic("customer#1"));
}

TEST(ResolveComponent, FusesDistinctValues) {
  const auto& s = model().dimension("supplier");
  const auto inst = four_branches();
  EXPECT_EQ(resolve_component(inst, s, "nation").to_string(), "{FRANCE+GERMANY+INDIA+JAPAN}");
  EXPECT_EQ(resolve_component(inst, s, "region").to_string(), "{ASIA+EUROPE}");
}

TEST(ResolveComponent, IncompleteRowsContributeWhatTheyHave) {
  const auto& s = model().dimension("supplier");
  const auto inst = four_branches_incomplete();
  EXPECT_EQ(resolve_component(inst, s, "nation").to_string(), "{FRANCE+GERMANY+JAPAN}");
  EXPECT_EQ(resolve_component(inst, s, "region").to_string(), "{ASIA+EUROPE}");
}

TEST(ResolveComponent, AgreeingRowsDoNotFuse) {
  const auto& s = model().dimension("supplier");
  const auto inst = instance("supplier#2", s, {row(s, {{"nation", "FRANCE"}, {"region", "EUROPE"}}),
                                               row(s, {{"nation", "GERMANY"}, {"region", "EUROPE"}})});
  EXPECT_EQ(resolve_component(inst, s, "region"), GroupComponent::atomic("EUROPE"));
}

TEST(ResolveComponent, MissingValueGoesToOther) {
  const auto& s = model().dimension("customer");
  EXPECT_EQ(resolve_component(instance("c", s, {LevelRow{}}), s, "nation"), GroupComponent::other());
  EXPECT_EQ(resolve_component(instance("c", s, {row(s, {{"region", "ASIA"}})}), s, "nation"),
            GroupComponent::other());
}

TEST(ResolveComponent, UnknownLevel) {
  const auto& s = model().dimension("customer");
  EXPECT_THROW(resolve_component(instance("c", s, {LevelRow{}}), s, "city"), QueryError);
}

TEST(ResolveComponent, MembersAreTheDistinctPresentValues) {
  // Property: the component's members are exactly the set of values present
  // at the level, whatever the row layout.
  Rng rng(21);
  const auto& s = model().dimension("part");
  for (int i = 0; i < 2000; ++i) {
    const auto inst = testing::random_instance(rng, s, "part#" + std::to_string(i));
    for (const auto& level : s.levels) {
      std::set<std::string> expected;
      for (const auto& r : inst.rows) {
        if (const auto* v = r.find(level)) expected.insert(*v);
      }
      const auto c = resolve_component(inst, s, level);
      ASSERT_EQ(std::set<std::string>(c.members().begin(), c.members().end()), expected);
      ASSERT_EQ(c.kind(), expected.empty()       ? GroupComponent::Kind::other
                          : expected.size() == 1 ? GroupComponent::Kind::atomic
                                                 : GroupComponent::Kind::fused);
    }
  }
}

TEST(ResolveGroup, FollowsGroupingOrder) {
  const auto& m = model();
  const auto supplier = four_branches();
  const auto& ds = m.dimension("date");
  const auto date = instance("date#1", ds, {row(ds, {{"day", "1998-06-25"}, {"month", "1998-06"}, {"year", "1998"}})});
  const FactRecord fact{"sale#1", 100, 280000, {"part#1", "customer#1", "supplier#1", "date#1"}};
  const InstanceLookup lookup = [&](std::size_t dim, const std::string& id) -> const DimensionInstance* {
    if (dim == 2 && id == "supplier#1") return &supplier;
    if (dim == 3 && id == "date#1") return &date;
    return nullptr;
  };
  const std::vector<GroupBy> g = {{"date", "year"}, {"supplier", "region"}};
  EXPECT_EQ(resolve_group(fact, g, m, lookup).to_string(), "1998|{ASIA+EUROPE}");
  EXPECT_TRUE(resolve_group(fact, {}, m, lookup).components.empty());
  const std::vector<GroupBy> missing = {{"part", "type3"}};
  EXPECT_THROW(resolve_group(fact, missing, m, lookup), ReferentialError);
  const std::vector<GroupBy> unknown = {{"store", "city"}};
  EXPECT_THROW(resolve_group(fact, unknown, m, lookup), QueryError);
}

}  // namespace
}  // namespace cxbench::qbs
