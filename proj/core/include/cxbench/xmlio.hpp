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

// Physical layout of a warehouse: one metadata document (dw-model.xml), one
// facts document and one document per dimension. The element grammar is in
// docs/warehouse.rnc. Writers are byte-deterministic (fixed indentation,
// attribute order and quoting). Readers are event based and never build a
// document tree; memory stays bounded by the distance between a fact and the
// instances it references.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "cxbench/model.hpp"

namespace cxbench::xmlio {

namespace fs = std::filesystem;

inline constexpr std::string_view kMetadataFile = "dw-model.xml";

/// Serializers. Each appends complete lines including the trailing newline.
std::string metadata_document(const DwModel& model);
void append_fact(std::string& out, const FactRecord& fact, const DwModel& model);
void append_instance(std::string& out, const DimensionInstance& inst);

void write_metadata(const DwModel& model, const fs::path& dir);
DwModel read_metadata(const fs::path& dir);
DwModel parse_metadata(std::string_view document, const std::string& name = "dw-model.xml");

/// Incremental writer for a facts or dimension document. The document is
/// complete once close() returns; destroying an unclosed writer leaves a
/// truncated file behind.
class DocumentWriter {
 public:
  static DocumentWriter facts(const fs::path& dir, const DwModel& model);
  static DocumentWriter dimension(const fs::path& dir, const DimensionSchema& schema);

  DocumentWriter(DocumentWriter&&) noexcept = default;
  DocumentWriter& operator=(DocumentWriter&&) noexcept = default;
  ~DocumentWriter() = default;

  void write(const FactRecord& fact);
  void write(const DimensionInstance& inst);
  void close();

 private:
  DocumentWriter(fs::path file, std::string root_open, std::string root_name, const DwModel* model);
  void flush_if_large();

  fs::path file_;
  std::ofstream out_;
  std::string buffer_;
  std::string root_open_;
  std::string root_name_;
  const DwModel* model_ = nullptr;
  bool empty_ = true;
};

void write_facts(std::span<const FactRecord> facts, const DwModel& model, const fs::path& dir);
void write_dimension(std::span<const DimensionInstance> instances, const DimensionSchema& schema,
                     const fs::path& dir);
/// Writes all six documents.
void write_warehouse(const Warehouse& wh, const fs::path& dir);

/// Pull cursor over the records of one facts or dimension document.
class FactCursor {
 public:
  FactCursor(const fs::path& file, const DwModel& model);
  ~FactCursor();
  FactCursor(FactCursor&&) noexcept;
  FactCursor& operator=(FactCursor&&) noexcept;

  /// Next record in document order, or nullopt at end of document.
  std::optional<FactRecord> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class InstanceCursor {
 public:
  InstanceCursor(const fs::path& file, const DimensionSchema& schema);
  ~InstanceCursor();
  InstanceCursor(InstanceCursor&&) noexcept;
  InstanceCursor& operator=(InstanceCursor&&) noexcept;

  std::optional<DimensionInstance> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// A fact together with the instances it references. Instances of dimensions
/// the reader was not asked for are left empty.
struct JoinedFact {
  FactRecord fact;
  std::array<std::optional<DimensionInstance>, 4> instances;
};

struct StreamStats {
  std::uint64_t facts = 0;
  std::uint64_t instances = 0;
  /// Instances read ahead of the fact that references them, worst case over
  /// the whole stream.
  std::uint64_t peak_buffered = 0;
  /// Instances never referenced by any fact.
  std::uint64_t orphans = 0;
};

/// Streams facts and joins each one with its dimension instances by id.
class WarehouseReader {
 public:
  /// `dimensions[i]` selects whether dimension i of the model is read.
  WarehouseReader(const fs::path& dir, std::array<bool, 4> dimensions = {true, true, true, true});
  ~WarehouseReader();
  WarehouseReader(WarehouseReader&&) noexcept;
  WarehouseReader& operator=(WarehouseReader&&) noexcept;

  const DwModel& model() const;
  /// Throws ReferentialError for a reference that no instance satisfies.
  const JoinedFact* next();
  const StreamStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Visits every fact, joined with all four instances, in document order.
StreamStats stream_warehouse(const fs::path& dir, const std::function<void(const JoinedFact&)>& visit);

/// Full in-memory load. Instance order within each dimension document is kept.
Warehouse load_warehouse(const fs::path& dir);

}  // namespace cxbench::xmlio
