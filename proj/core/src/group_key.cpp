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

#include "cxbench/group_key.hpp"

#include <algorithm>
#include <functional>

#include "cxbench/model.hpp"

namespace cxbench {

GroupComponent GroupComponent::atomic(std::string value) {
  std::vector<std::string> m;
  m.push_back(std::move(value));
  return GroupComponent(Kind::atomic, std::move(m));
}

GroupComponent GroupComponent::fused(std::vector<std::string> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty()) return other();
  if (members.size() == 1) return atomic(std::move(members.front()));
  return GroupComponent(Kind::fused, std::move(members));
}

std::string GroupComponent::to_string() const {
  switch (kind_) {
    case Kind::other: return "OTHER";
    case Kind::atomic: return members_.front();
    case Kind::fused: {
      std::string out = "{";
      for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i > 0) out += kFuseSeparator;
        out += members_[i];
      }
      return out + "}";
    }
  }
  return "?";
}

std::string GroupKey::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i > 0) out += '|';
    out += components[i].to_string();
  }
  return out;
}

std::size_t GroupKey::digest() const {
  std::size_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& c : components) {
    mix(static_cast<std::size_t>(c.kind()));
    for (const auto& m : c.members()) mix(std::hash<std::string>{}(m));
  }
  return h;
}

GroupComponent component_from_label(std::string_view label) {
  if (label == kOtherValue) return GroupComponent::other();
  if (label.find(kFuseSeparator) == std::string_view::npos) {
    return GroupComponent::atomic(std::string(label));
  }
  std::vector<std::string> members;
  std::size_t start = 0;
  while (true) {
    const auto pos = label.find(kFuseSeparator, start);
    members.emplace_back(label.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return GroupComponent::fused(std::move(members));
}

std::string fused_label(std::vector<std::string> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::string out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i > 0) out += kFuseSeparator;
    out += members[i];
  }
  return out;
}

}  // namespace cxbench
