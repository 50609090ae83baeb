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

#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cxbench {

/// One coordinate of a group: a single value, a fused set of values, or the
/// artificial "Other" group for facts lacking a value.
class GroupComponent {
 public:
  enum class Kind : std::uint8_t { other, atomic, fused };

  static GroupComponent other() { return GroupComponent(Kind::other, {}); }
  static GroupComponent atomic(std::string value);
  /// Canonicalizes: sorts and deduplicates. A set that collapses to one
  /// member becomes atomic, an empty one becomes other.
  static GroupComponent fused(std::vector<std::string> members);

  Kind kind() const { return kind_; }
  /// Empty for other; one value for atomic; at least two, sorted, for fused.
  std::span<const std::string> members() const { return members_; }
  const std::string& value() const { return members_.front(); }

  /// "FRANCE", "{FRANCE+GERMANY}", "OTHER".
  std::string to_string() const;

  friend bool operator==(const GroupComponent&, const GroupComponent&) = default;
  friend auto operator<=>(const GroupComponent&, const GroupComponent&) = default;

 private:
  GroupComponent(Kind kind, std::vector<std::string> members)
      : kind_(kind), members_(std::move(members)) {}

  Kind kind_ = Kind::other;
  std::vector<std::string> members_;
};

struct GroupKey {
  std::vector<GroupComponent> components;

  std::string to_string() const;
  std::size_t digest() const;

  friend bool operator==(const GroupKey&, const GroupKey&) = default;
  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

struct GroupKeyHash {
  std::size_t operator()(const GroupKey& k) const { return k.digest(); }
};

/// One grouping criterion: a dimension rolled up to a level, or grouped by
/// instance identity when `level` is empty.
struct GroupBy {
  std::string dimension;
  std::string level;

  bool by_instance() const { return level.empty(); }
  std::string to_string() const { return by_instance() ? dimension : dimension + "." + level; }

  friend bool operator==(const GroupBy&, const GroupBy&) = default;
};

/// Reads a label produced by static preprocessing back into a component:
/// "Other" is the other group, a '+'-joined label is a fused set.
GroupComponent component_from_label(std::string_view label);

/// Canonical label of a set of distinct values: sorted, '+'-joined.
std::string fused_label(std::vector<std::string> members);

}  // namespace cxbench
