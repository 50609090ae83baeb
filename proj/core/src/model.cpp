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

#include "cxbench/model.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "cxbench/error.hpp"

namespace cxbench {

bool DimensionSchema::has_level(std::string_view level) const {
  return level_index(level).has_value();
}

std::optional<std::size_t> DimensionSchema::level_index(std::string_view level) const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == level) return i;
  }
  return std::nullopt;
}

bool DimensionSchema::is_extended() const {
  return std::any_of(levels.begin(), levels.end(),
                     [](const std::string& l) { return l.ends_with(kFusedSuffix); });
}

const DimensionSchema* DwModel::find_dimension(std::string_view id) const {
  for (const auto& d : dimensions) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

const DimensionSchema& DwModel::dimension(std::string_view id) const {
  const auto* d = find_dimension(id);
  if (d == nullptr) throw QueryError("unknown dimension '" + std::string(id) + "'");
  return *d;
}

std::optional<std::size_t> DwModel::dimension_index(std::string_view id) const {
  for (std::size_t i = 0; i < dimensions.size(); ++i) {
    if (dimensions[i].id == id) return i;
  }
  return std::nullopt;
}

DwModel default_model() {
  DwModel m;
  m.fact_id = "sale";
  m.fact_path = "f_sale.xml";
  m.dimensions = {
      {"part", "d_part.xml", {"type3", "type2", "type1"}, true, {"type3", "type2", "type1"}},
      {"customer", "d_customer.xml", {"nation", "region"}, false, {"nation"}},
      {"supplier", "d_supplier.xml", {"nation", "region"}, true, {"nation"}},
      {"date", "d_date.xml", {"day", "month", "year"}, false, {}},
  };
  m.measures = {std::string(kQuantity), std::string(kTotalAmount)};
  return m;
}

const std::string* LevelRow::find(std::string_view level) const {
  for (const auto& c : cells_) {
    if (c.level == level) return &c.value;
  }
  return nullptr;
}

void LevelRow::set(const DimensionSchema& schema, std::string_view level, std::string value) {
  for (auto& c : cells_) {
    if (c.level == level) {
      c.value = std::move(value);
      return;
    }
  }
  const auto rank = [&](std::string_view l) {
    return schema.level_index(l).value_or(schema.levels.size());
  };
  const auto target = rank(level);
  auto pos = std::find_if(cells_.begin(), cells_.end(),
                          [&](const Cell& c) { return rank(c.level) > target; });
  cells_.insert(pos, Cell{std::string(level), std::move(value)});
}

bool LevelRow::erase(std::string_view level) {
  auto it = std::find_if(cells_.begin(), cells_.end(),
                         [&](const Cell& c) { return c.level == level; });
  if (it == cells_.end()) return false;
  cells_.erase(it);
  return true;
}

std::string_view measure_name(MeasureId m) {
  return m == MeasureId::quantity ? kQuantity : kTotalAmount;
}

std::optional<MeasureId> parse_measure(std::string_view name) {
  if (name == kQuantity) return MeasureId::quantity;
  if (name == kTotalAmount) return MeasureId::totalamount;
  return std::nullopt;
}

std::int64_t measure_value(const FactRecord& fact, MeasureId m) {
  return m == MeasureId::quantity ? fact.quantity : fact.amount_cents;
}

double measure_scale(MeasureId m) { return m == MeasureId::quantity ? 1.0 : 100.0; }

std::string format_cents(std::int64_t cents) {
  const bool negative = cents < 0;
  const std::uint64_t abs = negative ? 0 - static_cast<std::uint64_t>(cents)
                                     : static_cast<std::uint64_t>(cents);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%llu.%02llu", negative ? "-" : "",
                static_cast<unsigned long long>(abs / 100),
                static_cast<unsigned long long>(abs % 100));
  return buf;
}

std::optional<std::int64_t> parse_cents(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || dot == 0 || text.size() - dot != 3) return std::nullopt;
  const auto all_digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  const auto whole = text.substr(0, dot);
  const auto frac = text.substr(dot + 1);
  if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
  std::int64_t units = 0;
  if (auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), units);
      ec != std::errc{}) {
    return std::nullopt;
  }
  return units * 100 + (frac[0] - '0') * 10 + (frac[1] - '0');
}

std::size_t Warehouse::instance_count() const {
  std::size_t n = 0;
  for (const auto& v : instances) n += v.size();
  return n;
}

std::string_view to_string(HierarchyKind kind) {
  switch (kind) {
    case HierarchyKind::simple: return "simple";
    case HierarchyKind::incomplete: return "incomplete";
    case HierarchyKind::nonstrict: return "nonstrict";
    case HierarchyKind::complex: return "complex";
  }
  return "?";
}

HierarchyKind classify_instance(const DimensionInstance& inst, const DimensionSchema& schema) {
  if (inst.rows.empty()) {
    throw StructuralError("instance '" + inst.instance_id + "' has no rows");
  }
  bool absent = false;
  for (const auto& row : inst.rows) {
    for (const auto& cell : row.cells()) {
      if (!schema.has_level(cell.level)) {
        throw StructuralError("instance '" + inst.instance_id + "' has a cell for level '" +
                              cell.level + "' undeclared in dimension '" + schema.id + "'");
      }
    }
    if (row.size() < schema.levels.size()) absent = true;
  }
  const bool multi = inst.rows.size() > 1;
  if (multi) return absent ? HierarchyKind::complex : HierarchyKind::nonstrict;
  return absent ? HierarchyKind::incomplete : HierarchyKind::simple;
}

namespace {

std::int32_t day_number(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  return sys_days{year{y} / month{m} / day{d}}.time_since_epoch().count();
}

ValuePools make_pools() {
  ValuePools p{};
  p.type3 = {"ECONOMY", "LARGE", "STANDARD", "PROMO", "MEDIUM", "SMALL"};
  p.type2 = {"ANODIZED", "BURNISHED", "BRUSHED", "POLISHED", "PLATED"};
  p.type1 = {"COPPER", "NICKEL", "STEEL", "TIN", "BRASS"};
  p.nations = {{
      {"ALGERIA", "AFRICA"},       {"ARGENTINA", "AMERICA"},   {"BRAZIL", "AMERICA"},
      {"CANADA", "AMERICA"},       {"EGYPT", "MIDDLE EAST"},   {"ETHIOPIA", "AFRICA"},
      {"FRANCE", "EUROPE"},        {"GERMANY", "EUROPE"},      {"INDIA", "ASIA"},
      {"INDONESIA", "ASIA"},       {"IRAN", "MIDDLE EAST"},    {"IRAQ", "MIDDLE EAST"},
      {"JAPAN", "ASIA"},           {"JORDAN", "MIDDLE EAST"},  {"KENYA", "AFRICA"},
      {"MOROCCO", "AFRICA"},       {"MOZAMBIQUE", "AFRICA"},   {"PERU", "AMERICA"},
      {"CHINA", "ASIA"},           {"ROMANIA", "EUROPE"},      {"SAUDI ARABIA", "MIDDLE EAST"},
      {"VIETNAM", "ASIA"},         {"RUSSIA", "EUROPE"},       {"UNITED KINGDOM", "EUROPE"},
      {"UNITED STATES", "AMERICA"},
  }};
  for (std::size_t i = 0; i < p.nations.size(); ++i) p.nation_names[i] = p.nations[i].name;
  p.regions = {"AFRICA", "AMERICA", "ASIA", "EUROPE", "MIDDLE EAST"};
  p.first_day = day_number(1992, 1, 1);
  p.last_day = day_number(1998, 12, 31);
  return p;
}

}  // namespace

std::optional<std::string_view> ValuePools::region_of(std::string_view nation) const {
  for (const auto& n : nations) {
    if (n.name == nation) return n.region;
  }
  return std::nullopt;
}

std::span<const std::string_view> ValuePools::vocabulary(std::string_view dimension,
                                                         std::string_view level) const {
  if (dimension == kPart) {
    if (level == "type3") return type3;
    if (level == "type2") return type2;
    if (level == "type1") return type1;
  } else if (dimension == kCustomer || dimension == kSupplier) {
    if (level == "nation") return nation_names;
    if (level == "region") return regions;
  }
  return {};
}

const ValuePools& value_pools() {
  static const ValuePools pools = make_pools();
  return pools;
}

DateLevels date_levels(std::int32_t days_since_epoch) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{days_since_epoch}}};
  char buf[16];
  DateLevels out;
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  out.day = buf;
  out.month = out.day.substr(0, 7);
  out.year = out.day.substr(0, 4);
  return out;
}

}  // namespace cxbench
