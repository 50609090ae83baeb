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

// Event-based readers on top of expat. Handlers never throw through the C
// parser: they record the first error, stop the parser, and the error is
// raised once control is back on the C++ side.

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "cxbench/error.hpp"
#include "cxbench/xmlio.hpp"

namespace cxbench::xmlio {

namespace {

constexpr std::size_t kChunk = 1 << 16;

using Attrs = const XML_Char**;

struct ParserDeleter {
  void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
};
using ParserPtr = std::unique_ptr<XML_ParserStruct, ParserDeleter>;

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

/// Shared driver: feeds a byte source to expat in chunks and dispatches
/// element events to a grammar implemented by the subclass.
class SaxDocument {
 public:
  SaxDocument(std::string name, std::unique_ptr<std::istream> in)
      : name_(std::move(name)), in_(std::move(in)), parser_(XML_ParserCreate("UTF-8")) {
    if (!parser_) throw Error("out of memory creating XML parser");
    XML_SetUserData(parser_.get(), this);
    XML_SetElementHandler(parser_.get(), &SaxDocument::on_start, &SaxDocument::on_end);
    XML_SetCharacterDataHandler(parser_.get(), &SaxDocument::on_text);
  }
  virtual ~SaxDocument() = default;
  SaxDocument(const SaxDocument&) = delete;
  SaxDocument& operator=(const SaxDocument&) = delete;

  /// Parses one more chunk. Returns false once the whole document was consumed.
  bool feed() {
    if (finished_) return false;
    std::vector<char> buf(kChunk);
    in_->read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto n = static_cast<int>(in_->gcount());
    const bool last = n == 0 || in_->eof();
    if (XML_Parse(parser_.get(), buf.data(), n, last ? XML_TRUE : XML_FALSE) == XML_STATUS_ERROR) {
      if (!error_.empty()) throw ParseError(name_, error_line_, error_);
      throw ParseError(name_, XML_GetCurrentLineNumber(parser_.get()),
                       XML_ErrorString(XML_GetErrorCode(parser_.get())));
    }
    if (!error_.empty()) throw ParseError(name_, error_line_, error_);
    if (in_->bad()) throw IoError("read failure on '" + name_ + "'");
    if (last) {
      finished_ = true;
      if (!root_closed_) throw ParseError(name_, line(), "document ended before root element");
    }
    return !finished_;
  }

  const std::string& name() const { return name_; }

 protected:
  virtual void start(std::string_view element, Attrs attrs) = 0;
  virtual void end(std::string_view element, std::string text) = 0;

  std::size_t depth() const { return stack_.size(); }
  std::size_t line() const { return XML_GetCurrentLineNumber(parser_.get()); }

  void fail(std::string message) {
    if (!error_.empty()) return;
    error_ = std::move(message);
    error_line_ = line();
    XML_StopParser(parser_.get(), XML_FALSE);
  }

  void unknown(std::string_view element) {
    fail("unknown element <" + std::string(element) + "> in <" +
         (stack_.size() > 1 ? stack_[stack_.size() - 2] : std::string("document")) + ">");
  }

  /// Collects the attributes, failing on any outside `allowed`.
  std::optional<std::unordered_map<std::string, std::string>> attributes(
      std::string_view element, Attrs attrs, std::initializer_list<std::string_view> required) {
    std::unordered_map<std::string, std::string> out;
    for (auto a = attrs; *a != nullptr; a += 2) {
      std::string_view key = a[0];
      if (std::find(required.begin(), required.end(), key) == required.end()) {
        fail("unexpected attribute '" + std::string(key) + "' on <" + std::string(element) + ">");
        return std::nullopt;
      }
      out.emplace(key, a[1]);
    }
    for (auto key : required) {
      if (!out.contains(std::string(key))) {
        fail("missing attribute '" + std::string(key) + "' on <" + std::string(element) + ">");
        return std::nullopt;
      }
    }
    return out;
  }

  void expect_leaf(bool leaf) { leaf_ = leaf; }

 private:
  static void XMLCALL on_start(void* self, const XML_Char* name, Attrs attrs) {
    auto& doc = *static_cast<SaxDocument*>(self);
    if (!doc.error_.empty()) return;
    if (doc.leaf_) {
      doc.fail("element <" + std::string(name) + "> inside leaf <" + doc.stack_.back() + ">");
      return;
    }
    if (!is_blank(doc.text_)) {
      doc.fail("unexpected text in <" + doc.stack_.back() + ">");
      return;
    }
    doc.text_.clear();
    doc.stack_.emplace_back(name);
    doc.start(name, attrs);
  }

  static void XMLCALL on_end(void* self, const XML_Char* name) {
    auto& doc = *static_cast<SaxDocument*>(self);
    if (!doc.error_.empty()) return;
    if (!doc.leaf_ && !is_blank(doc.text_)) {
      doc.fail("unexpected text in <" + doc.stack_.back() + ">");
      return;
    }
    std::string text = doc.leaf_ ? std::move(doc.text_) : std::string();
    doc.text_.clear();
    doc.leaf_ = false;
    doc.end(name, std::move(text));
    doc.stack_.pop_back();
    if (doc.stack_.empty()) doc.root_closed_ = true;
  }

  static void XMLCALL on_text(void* self, const XML_Char* s, int len) {
    auto& doc = *static_cast<SaxDocument*>(self);
    if (!doc.error_.empty()) return;
    doc.text_.append(s, static_cast<std::size_t>(len));
  }

  std::string name_;
  std::unique_ptr<std::istream> in_;
  ParserPtr parser_;
  std::vector<std::string> stack_;
  std::string text_;
  bool leaf_ = false;
  bool finished_ = false;
  bool root_closed_ = false;
  std::string error_;
  std::size_t error_line_ = 0;
};

std::unique_ptr<std::istream> open_file(const fs::path& file) {
  auto in = std::make_unique<std::ifstream>(file, std::ios::binary);
  if (!*in) throw IoError("cannot open '" + file.string() + "'");
  return in;
}

class FactGrammar final : public SaxDocument {
 public:
  FactGrammar(const fs::path& file, const DwModel& model)
      : SaxDocument(file.filename().string(), open_file(file)), model_(model) {}

  std::deque<FactRecord> ready;

 protected:
  void start(std::string_view element, Attrs attrs) override {
    switch (depth()) {
      case 1: {
        if (element != "facts") return unknown(element);
        auto a = attributes(element, attrs, {"id"});
        if (a && a->at("id") != model_.fact_id) {
          fail("facts document is for fact '" + a->at("id") + "', expected '" + model_.fact_id + "'");
        }
        return;
      }
      case 2: {
        if (element != model_.fact_id) return unknown(element);
        auto a = attributes(element, attrs, {"id"});
        if (!a) return;
        current_ = FactRecord{};
        current_.fact_id = a->at("id");
        seen_quantity_ = seen_amount_ = false;
        seen_dims_.fill(false);
        return;
      }
      case 3: {
        if (element == kQuantity || element == kTotalAmount) {
          attributes(element, attrs, {});
          return expect_leaf(true);
        }
        if (element != "dimref") return unknown(element);
        auto a = attributes(element, attrs, {"dim", "idref"});
        if (!a) return;
        auto idx = model_.dimension_index(a->at("dim"));
        if (!idx) return fail("dimref to unknown dimension '" + a->at("dim") + "'");
        if (seen_dims_[*idx]) return fail("duplicate dimref for '" + a->at("dim") + "'");
        seen_dims_[*idx] = true;
        current_.dim_refs[*idx] = a->at("idref");
        return;
      }
      default:
        unknown(element);
    }
  }

  void end(std::string_view element, std::string text) override {
    if (depth() == 3 && element == kQuantity) {
      if (seen_quantity_) return fail("duplicate <f_quantity>");
      seen_quantity_ = true;
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size() || v < 0) {
        return fail("bad f_quantity '" + text + "'");
      }
      current_.quantity = v;
    } else if (depth() == 3 && element == kTotalAmount) {
      if (seen_amount_) return fail("duplicate <f_totalamount>");
      seen_amount_ = true;
      auto v = parse_cents(text);
      if (!v || *v < 0) return fail("bad f_totalamount '" + text + "'");
      current_.amount_cents = *v;
    } else if (depth() == 2) {
      if (!seen_quantity_ || !seen_amount_) {
        return fail("fact '" + current_.fact_id + "' lacks a measure");
      }
      for (std::size_t i = 0; i < model_.dimensions.size(); ++i) {
        if (!seen_dims_[i]) {
          return fail("fact '" + current_.fact_id + "' lacks a dimref for '" +
                      model_.dimensions[i].id + "'");
        }
      }
      ready.push_back(std::move(current_));
    }
  }

 private:
  const DwModel& model_;
  FactRecord current_;
  bool seen_quantity_ = false;
  bool seen_amount_ = false;
  std::array<bool, 4> seen_dims_{};
};

class InstanceGrammar final : public SaxDocument {
 public:
  InstanceGrammar(const fs::path& file, const DimensionSchema& schema)
      : SaxDocument(file.filename().string(), open_file(file)), schema_(schema) {}

  std::deque<DimensionInstance> ready;

 protected:
  void start(std::string_view element, Attrs attrs) override {
    switch (depth()) {
      case 1: {
        if (element != "dimension") return unknown(element);
        auto a = attributes(element, attrs, {"id"});
        if (a && a->at("id") != schema_.id) {
          fail("document holds dimension '" + a->at("id") + "', expected '" + schema_.id + "'");
        }
        return;
      }
      case 2: {
        if (element != "instance") return unknown(element);
        auto a = attributes(element, attrs, {"id"});
        if (!a) return;
        current_ = DimensionInstance{a->at("id"), schema_.id, {}};
        return;
      }
      case 3:
        if (element != "row") return unknown(element);
        attributes(element, attrs, {});
        current_.rows.emplace_back();
        return;
      case 4:
        if (!schema_.has_level(element)) return unknown(element);
        if (current_.rows.back().has(element)) {
          return fail("duplicate level <" + std::string(element) + "> in row");
        }
        attributes(element, attrs, {});
        return expect_leaf(true);
      default:
        unknown(element);
    }
  }

  void end(std::string_view element, std::string text) override {
    if (depth() == 4) {
      current_.rows.back().set(schema_, element, std::move(text));
    } else if (depth() == 2) {
      if (current_.rows.empty()) return fail("instance '" + current_.instance_id + "' has no rows");
      ready.push_back(std::move(current_));
    }
  }

 private:
  const DimensionSchema& schema_;
  DimensionInstance current_;
};

/// Expat grammar for dw-model.xml.
class MetadataGrammar final : public SaxDocument {
 public:
  MetadataGrammar(std::string name, std::string_view doc)
      : SaxDocument(std::move(name), std::make_unique<std::istringstream>(std::string(doc))) {}

  DwModel model;

 protected:
  void start(std::string_view element, Attrs attrs) override {
    switch (depth()) {
      case 1: {
        if (element != "dw-model") return unknown(element);
        std::string transform;
        for (auto a = attrs; *a != nullptr; a += 2) {
          if (std::string_view(a[0]) != "transform") {
            return fail("unexpected attribute '" + std::string(a[0]) + "' on <dw-model>");
          }
          transform = a[1];
        }
        if (!transform.empty() && transform != "pedersen") {
          return fail("unknown transform '" + transform + "'");
        }
        model.pedersen_transformed = transform == "pedersen";
        return;
      }
      case 2: {
        if (element != "fact") return unknown(element);
        if (seen_fact_) return fail("more than one <fact>");
        seen_fact_ = true;
        auto a = attributes(element, attrs, {"id", "path"});
        if (!a) return;
        model.fact_id = a->at("id");
        model.fact_path = a->at("path");
        return;
      }
      case 3: {
        if (element == "measure") {
          in_measure_ = true;
          auto a = attributes(element, attrs, {"id"});
          if (a) model.measures.push_back(a->at("id"));
          return;
        }
        if (element != "dimension") return unknown(element);
        auto a = attributes(element, attrs, {"idref", "path"});
        if (!a) return;
        DimensionSchema dim;
        dim.id = a->at("idref");
        dim.path = a->at("path");
        model.dimensions.push_back(std::move(dim));
        return;
      }
      default: {
        if (model.dimensions.empty() || in_measure_) return unknown(element);
        auto& levels = model.dimensions.back().levels;
        if (levels.size() + 4 != depth()) return unknown(element);
        attributes(element, attrs, {});
        levels.emplace_back(element);
      }
    }
  }

  void end(std::string_view element, std::string) override {
    if (depth() == 3 && element == "measure") in_measure_ = false;
  }

 private:
  bool seen_fact_ = false;
  bool in_measure_ = false;
};

void validate_model(DwModel& model, const std::string& name) {
  const DwModel reference = default_model();
  if (model.fact_id.empty()) throw ParseError(name, 1, "missing <fact>");
  if (model.dimensions.size() != reference.dimensions.size()) {
    throw ParseError(name, 1, "expected 4 dimensions, found " +
                                  std::to_string(model.dimensions.size()));
  }
  for (auto& dim : model.dimensions) {
    const auto* ref = reference.find_dimension(dim.id);
    if (ref == nullptr) throw ParseError(name, 1, "unknown dimension '" + dim.id + "'");
    if (dim.levels.empty()) throw ParseError(name, 1, "dimension '" + dim.id + "' has no levels");
    dim.nonstrict_eligible = ref->nonstrict_eligible;
    dim.nonstrict_eligible_levels = ref->nonstrict_eligible_levels;
  }
  for (std::size_t i = 0; i < reference.dimensions.size(); ++i) {
    if (model.dimensions[i].id != reference.dimensions[i].id) {
      throw ParseError(name, 1, "dimension order differs from the sales model");
    }
  }
  if (model.measures != reference.measures) {
    throw ParseError(name, 1, "measures must be f_quantity and f_totalamount");
  }
}

}  // namespace

DwModel parse_metadata(std::string_view document, const std::string& name) {
  MetadataGrammar g(name, document);
  while (g.feed()) {
  }
  validate_model(g.model, name);
  return std::move(g.model);
}

DwModel read_metadata(const fs::path& dir) {
  const auto file = dir / kMetadataFile;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_metadata(ss.str(), file.filename().string());
}

struct FactCursor::Impl {
  FactGrammar grammar;
  Impl(const fs::path& file, const DwModel& model) : grammar(file, model) {}
};

FactCursor::FactCursor(const fs::path& file, const DwModel& model)
    : impl_(std::make_unique<Impl>(file, model)) {}
FactCursor::~FactCursor() = default;
FactCursor::FactCursor(FactCursor&&) noexcept = default;
FactCursor& FactCursor::operator=(FactCursor&&) noexcept = default;

std::optional<FactRecord> FactCursor::next() {
  auto& g = impl_->grammar;
  while (g.ready.empty() && g.feed()) {
  }
  if (g.ready.empty()) return std::nullopt;
  FactRecord f = std::move(g.ready.front());
  g.ready.pop_front();
  return f;
}

struct InstanceCursor::Impl {
  InstanceGrammar grammar;
  Impl(const fs::path& file, const DimensionSchema& schema) : grammar(file, schema) {}
};

InstanceCursor::InstanceCursor(const fs::path& file, const DimensionSchema& schema)
    : impl_(std::make_unique<Impl>(file, schema)) {}
InstanceCursor::~InstanceCursor() = default;
InstanceCursor::InstanceCursor(InstanceCursor&&) noexcept = default;
InstanceCursor& InstanceCursor::operator=(InstanceCursor&&) noexcept = default;

std::optional<DimensionInstance> InstanceCursor::next() {
  auto& g = impl_->grammar;
  while (g.ready.empty() && g.feed()) {
  }
  if (g.ready.empty()) return std::nullopt;
  DimensionInstance inst = std::move(g.ready.front());
  g.ready.pop_front();
  return inst;
}

struct WarehouseReader::Impl {
  struct Source {
    std::size_t dim;
    InstanceCursor cursor;
    std::unordered_map<std::string, DimensionInstance> pending;
  };

  DwModel model;
  std::optional<FactCursor> facts;
  std::vector<Source> sources;
  JoinedFact current;
  StreamStats stats;
  bool done = false;

  DimensionInstance take(Source& src, const std::string& id, const std::string& fact_id) {
    if (auto it = src.pending.find(id); it != src.pending.end()) {
      DimensionInstance inst = std::move(it->second);
      src.pending.erase(it);
      return inst;
    }
    while (auto inst = src.cursor.next()) {
      ++stats.instances;
      if (inst->instance_id == id) return std::move(*inst);
      const std::string key = inst->instance_id;
      if (!src.pending.emplace(key, std::move(*inst)).second) {
        throw ReferentialError("duplicate instance id '" + key + "' in " +
                               model.dimensions[src.dim].path);
      }
      stats.peak_buffered = std::max<std::uint64_t>(stats.peak_buffered, src.pending.size());
    }
    throw ReferentialError("fact '" + fact_id + "' references " + model.dimensions[src.dim].id +
                           " instance '" + id + "', which does not exist or is already used");
  }

  void drain() {
    for (auto& src : sources) {
      while (src.cursor.next()) {
        ++stats.instances;
        ++stats.orphans;
      }
      stats.orphans += src.pending.size();
      src.pending.clear();
    }
  }
};

WarehouseReader::WarehouseReader(const fs::path& dir, std::array<bool, 4> dimensions)
    : impl_(std::make_unique<Impl>()) {
  impl_->model = read_metadata(dir);
  impl_->facts.emplace(dir / impl_->model.fact_path, impl_->model);
  for (std::size_t i = 0; i < impl_->model.dimensions.size(); ++i) {
    if (!dimensions[i]) continue;
    const auto& schema = impl_->model.dimensions[i];
    impl_->sources.push_back({i, InstanceCursor(dir / schema.path, schema), {}});
  }
}

WarehouseReader::~WarehouseReader() = default;
WarehouseReader::WarehouseReader(WarehouseReader&&) noexcept = default;
WarehouseReader& WarehouseReader::operator=(WarehouseReader&&) noexcept = default;

const DwModel& WarehouseReader::model() const { return impl_->model; }
const StreamStats& WarehouseReader::stats() const { return impl_->stats; }

const JoinedFact* WarehouseReader::next() {
  auto& s = *impl_;
  if (s.done) return nullptr;
  auto fact = s.facts->next();
  if (!fact) {
    s.done = true;
    s.drain();
    return nullptr;
  }
  ++s.stats.facts;
  s.current.fact = std::move(*fact);
  for (auto& inst : s.current.instances) inst.reset();
  for (auto& src : s.sources) {
    s.current.instances[src.dim] =
        s.take(src, s.current.fact.dim_refs[src.dim], s.current.fact.fact_id);
  }
  return &s.current;
}

StreamStats stream_warehouse(const fs::path& dir,
                             const std::function<void(const JoinedFact&)>& visit) {
  WarehouseReader reader(dir);
  while (const auto* jf = reader.next()) visit(*jf);
  return reader.stats();
}

Warehouse load_warehouse(const fs::path& dir) {
  Warehouse wh;
  wh.model = read_metadata(dir);
  FactCursor facts(dir / wh.model.fact_path, wh.model);
  while (auto f = facts.next()) wh.facts.push_back(std::move(*f));
  for (std::size_t i = 0; i < wh.model.dimensions.size(); ++i) {
    const auto& schema = wh.model.dimensions[i];
    InstanceCursor cursor(dir / schema.path, schema);
    while (auto inst = cursor.next()) wh.instances[i].push_back(std::move(*inst));
  }
  return wh;
}

}  // namespace cxbench::xmlio
