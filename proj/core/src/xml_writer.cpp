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

#include <string>

#include "cxbench/error.hpp"
#include "cxbench/xmlio.hpp"

namespace cxbench::xmlio {

namespace {

constexpr std::string_view kProlog = "<?xml version='1.0' encoding='UTF-8'?>\n";
constexpr std::size_t kFlushThreshold = 1 << 16;

void append_escaped(std::string& out, std::string_view text) {
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\'': out += "&apos;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
}

void append_attr(std::string& out, std::string_view name, std::string_view value) {
  out += ' ';
  out += name;
  out += "='";
  append_escaped(out, value);
  out += '\'';
}

void append_leaf(std::string& out, std::string_view name, std::string_view text) {
  out += '<';
  out += name;
  out += '>';
  append_escaped(out, text);
  out += "</";
  out += name;
  out += '>';
}

void write_file(const fs::path& file, std::string_view content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + file.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

}  // namespace

std::string metadata_document(const DwModel& model) {
  std::string out(kProlog);
  out += model.pedersen_transformed ? "<dw-model transform='pedersen'>\n" : "<dw-model>\n";
  out += "  <fact";
  append_attr(out, "id", model.fact_id);
  append_attr(out, "path", model.fact_path);
  out += ">\n";
  for (const auto& dim : model.dimensions) {
    out += "    <dimension";
    append_attr(out, "idref", dim.id);
    append_attr(out, "path", dim.path);
    out += '>';
    for (std::size_t i = 0; i < dim.levels.size(); ++i) {
      out += '<';
      out += dim.levels[i];
      out += i + 1 == dim.levels.size() ? "/>" : ">";
    }
    for (std::size_t i = dim.levels.size(); i-- > 1;) {
      out += "</";
      out += dim.levels[i - 1];
      out += '>';
    }
    out += "</dimension>\n";
  }
  for (const auto& m : model.measures) {
    out += "    <measure";
    append_attr(out, "id", m);
    out += "/>\n";
  }
  out += "  </fact>\n</dw-model>\n";
  return out;
}

void append_fact(std::string& out, const FactRecord& fact, const DwModel& model) {
  out += "  <";
  out += model.fact_id;
  append_attr(out, "id", fact.fact_id);
  out += ">\n    ";
  append_leaf(out, kQuantity, std::to_string(fact.quantity));
  out += "\n    ";
  append_leaf(out, kTotalAmount, format_cents(fact.amount_cents));
  out += '\n';
  for (std::size_t i = 0; i < model.dimensions.size(); ++i) {
    out += "    <dimref";
    append_attr(out, "dim", model.dimensions[i].id);
    append_attr(out, "idref", fact.dim_refs[i]);
    out += "/>\n";
  }
  out += "  </";
  out += model.fact_id;
  out += ">\n";
}

void append_instance(std::string& out, const DimensionInstance& inst) {
  out += "  <instance";
  append_attr(out, "id", inst.instance_id);
  out += ">\n";
  for (const auto& row : inst.rows) {
    if (row.empty()) {
      out += "    <row/>\n";
      continue;
    }
    out += "    <row>";
    for (const auto& cell : row.cells()) append_leaf(out, cell.level, cell.value);
    out += "</row>\n";
  }
  out += "  </instance>\n";
}

void write_metadata(const DwModel& model, const fs::path& dir) {
  ensure_dir(dir);
  write_file(dir / kMetadataFile, metadata_document(model));
}

DocumentWriter::DocumentWriter(fs::path file, std::string root_open, std::string root_name,
                               const DwModel* model)
    : file_(std::move(file)),
      root_open_(std::move(root_open)),
      root_name_(std::move(root_name)),
      model_(model) {
  out_.open(file_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open '" + file_.string() + "' for writing");
  buffer_ = kProlog;
}

DocumentWriter DocumentWriter::facts(const fs::path& dir, const DwModel& model) {
  ensure_dir(dir);
  std::string open = "<facts";
  append_attr(open, "id", model.fact_id);
  return DocumentWriter(dir / model.fact_path, std::move(open), "facts", &model);
}

DocumentWriter DocumentWriter::dimension(const fs::path& dir, const DimensionSchema& schema) {
  ensure_dir(dir);
  std::string open = "<dimension";
  append_attr(open, "id", schema.id);
  return DocumentWriter(dir / schema.path, std::move(open), "dimension", nullptr);
}

void DocumentWriter::write(const FactRecord& fact) {
  if (empty_) {
    buffer_ += root_open_ + ">\n";
    empty_ = false;
  }
  append_fact(buffer_, fact, *model_);
  flush_if_large();
}

void DocumentWriter::write(const DimensionInstance& inst) {
  if (empty_) {
    buffer_ += root_open_ + ">\n";
    empty_ = false;
  }
  append_instance(buffer_, inst);
  flush_if_large();
}

void DocumentWriter::flush_if_large() {
  if (buffer_.size() < kFlushThreshold) return;
  out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  buffer_.clear();
  if (!out_) throw IoError("failed writing '" + file_.string() + "'");
}

void DocumentWriter::close() {
  if (!out_.is_open()) return;
  if (empty_) {
    buffer_ += root_open_ + "/>\n";
  } else {
    buffer_ += "</" + root_name_ + ">\n";
  }
  out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  buffer_.clear();
  out_.close();
  if (!out_) throw IoError("failed writing '" + file_.string() + "'");
}

void write_facts(std::span<const FactRecord> facts, const DwModel& model, const fs::path& dir) {
  auto w = DocumentWriter::facts(dir, model);
  for (const auto& f : facts) w.write(f);
  w.close();
}

void write_dimension(std::span<const DimensionInstance> instances, const DimensionSchema& schema,
                     const fs::path& dir) {
  auto w = DocumentWriter::dimension(dir, schema);
  for (const auto& inst : instances) w.write(inst);
  w.close();
}

void write_warehouse(const Warehouse& wh, const fs::path& dir) {
  write_metadata(wh.model, dir);
  write_facts(wh.facts, wh.model, dir);
  for (std::size_t i = 0; i < wh.model.dimensions.size(); ++i) {
    write_dimension(wh.instances[i], wh.model.dimensions[i], dir);
  }
}

}  // namespace cxbench::xmlio
