#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ttedepth/error.hpp"

namespace ttedepth {

enum class CorpusFormat { kJsonl, kCsv };

inline std::string_view to_string(CorpusFormat f) {
  return f == CorpusFormat::kJsonl ? "jsonl" : "csv";
}

inline CorpusFormat parse_corpus_format(std::string_view s) {
  if (s == "jsonl") return CorpusFormat::kJsonl;
  if (s == "csv") return CorpusFormat::kCsv;
  throw_invalid("unknown corpus format '" + std::string(s) +
                "' (expected jsonl or csv)");
}

struct EmbeddingRecord {
  std::string id;
  std::vector<double> vector;
  std::optional<std::string> label;
  std::optional<std::string> text;

  bool operator==(const EmbeddingRecord&) const = default;
};

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/// Returns vector / ||vector||.
///
/// The input is first rescaled by a power of two so that its largest
/// magnitude lies in [0.5, 1); this cannot overflow and is exact, so inputs
/// that differ by a power-of-two factor normalize to identical bits. A vector
/// whose norm is already 1 within kUnitTolerance is returned unchanged, which
/// makes normalization idempotent.
inline constexpr double kUnitTolerance = 1e-13;

inline std::vector<double> normalize(std::span<const double> vector) {
  double max_abs = 0.0;
  for (double v : vector) {
    if (!std::isfinite(v)) throw_invalid("non-finite vector component");
    max_abs = std::max(max_abs, std::fabs(v));
  }
  if (max_abs == 0.0) throw_invalid("zero-norm vector");

  int exponent = 0;
  std::frexp(max_abs, &exponent);
  std::vector<double> out(vector.begin(), vector.end());
  for (double& v : out) v = std::ldexp(v, -exponent);

  const double norm = std::sqrt(dot(out, out));
  if (std::fabs(std::ldexp(norm, exponent) - 1.0) <= kUnitTolerance) {
    return std::vector<double>(vector.begin(), vector.end());
  }
  for (double& v : out) v /= norm;
  // A few refinement passes usually bring the computed norm to exactly 1.
  for (int pass = 0; pass < 3; ++pass) {
    const double n = std::sqrt(dot(out, out));
    if (n == 1.0) break;
    for (double& v : out) v /= n;
  }
  return out;
}

/// Ordered, validated collection of unit-normalized embedding records.
/// Immutable after construction.
class Corpus {
 public:
  Corpus() = default;

  /// Validates raw records and normalizes every vector. Record order is kept.
  static Corpus from_records(std::string name,
                             std::vector<EmbeddingRecord> records) {
    if (records.empty()) throw_data("corpus '" + name + "' is empty");
    const std::size_t dim = records.front().vector.size();
    std::unordered_set<std::string_view> seen;
    for (auto& r : records) {
      if (r.id.empty()) throw_data("record with empty id");
      if (r.vector.empty()) throw_data("empty vector at id " + r.id);
      if (r.vector.size() != dim) {
        throw_data("dimension mismatch at id " + r.id + " (expected " +
                   std::to_string(dim) + ", got " +
                   std::to_string(r.vector.size()) + ")");
      }
      if (!seen.insert(r.id).second) throw_data("duplicate id " + r.id);
      try {
        r.vector = normalize(r.vector);
      } catch (const Error& e) {
        throw_data(std::string(e.what()) + " at id " + r.id);
      }
    }
    Corpus c;
    c.name_ = std::move(name);
    c.dim_ = dim;
    c.records_ = std::move(records);
    return c;
  }

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  std::span<const EmbeddingRecord> records() const { return records_; }
  const EmbeddingRecord& operator[](std::size_t i) const { return records_[i]; }
  std::span<const double> vector(std::size_t i) const {
    return records_[i].vector;
  }

  /// Raw `_meta` records carried through from a JSONL file.
  const std::vector<std::string>& metadata() const { return metadata_; }
  void set_metadata(std::vector<std::string> m) { metadata_ = std::move(m); }

  /// Records at `indices` (in that order), vectors copied bit-for-bit.
  Corpus subset(std::span<const std::size_t> indices, std::string name) const {
    Corpus c;
    c.name_ = std::move(name);
    c.dim_ = dim_;
    c.records_.reserve(indices.size());
    for (std::size_t i : indices) {
      if (i >= records_.size()) throw_invalid("subset index out of range");
      c.records_.push_back(records_[i]);
    }
    if (c.records_.empty()) throw_invalid("subset is empty");
    std::unordered_set<std::size_t> unique(indices.begin(), indices.end());
    if (unique.size() != indices.size()) throw_invalid("subset repeats a record");
    return c;
  }

  /// First record without a label, if any.
  const EmbeddingRecord* first_unlabeled() const {
    for (const auto& r : records_) {
      if (!r.label) return &r;
    }
    return nullptr;
  }

  bool operator==(const Corpus& o) const {
    return name_ == o.name_ && dim_ == o.dim_ && records_ == o.records_;
  }

 private:
  std::string name_;
  std::size_t dim_ = 0;
  std::vector<EmbeddingRecord> records_;
  std::vector<std::string> metadata_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

inline double parse_double(std::string_view cell, std::size_t line_no) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() ||
      !std::isfinite(value)) {
    throw_data("malformed number '" + std::string(cell) + "' at line " +
               std::to_string(line_no));
  }
  return value;
}

inline std::vector<EmbeddingRecord> read_jsonl(std::istream& in,
                                               std::vector<std::string>& meta) {
  std::vector<EmbeddingRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw_data("malformed JSON at line " + std::to_string(line_no));
    }
    if (!obj.is_object()) {
      throw_data("record at line " + std::to_string(line_no) +
                 " is not a JSON object");
    }
    if (!obj.contains("id") && obj.contains("_meta")) {
      meta.push_back(obj.dump());
      continue;
    }
    const auto where = " at line " + std::to_string(line_no);
    if (!obj.contains("id") || !obj["id"].is_string())
      throw_data("missing string field 'id'" + where);
    EmbeddingRecord r;
    r.id = obj["id"].get<std::string>();
    if (!obj.contains("vector") || !obj["vector"].is_array())
      throw_data("missing array field 'vector' at id " + r.id);
    r.vector.reserve(obj["vector"].size());
    for (const auto& v : obj["vector"]) {
      if (!v.is_number()) throw_data("non-numeric vector entry at id " + r.id);
      r.vector.push_back(v.get<double>());
    }
    if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw_data("non-string label at id " + r.id);
      r.label = it->get<std::string>();
    }
    if (auto it = obj.find("text"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw_data("non-string text at id " + r.id);
      r.text = it->get<std::string>();
    }
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<EmbeddingRecord> read_csv(std::istream& in) {
  std::vector<EmbeddingRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (!have_header) {
      if (cells.size() < 3 || cells[0] != "id" || cells[1] != "label")
        throw_data("CSV header must be id,label,v0,...");
      for (std::size_t i = 2; i < cells.size(); ++i) {
        if (cells[i] != "v" + std::to_string(i - 2))
          throw_data("unexpected CSV header column '" + std::string(cells[i]) + "'");
      }
      dim = cells.size() - 2;
      have_header = true;
      continue;
    }
    EmbeddingRecord r;
    r.id = std::string(cells[0]);
    if (r.id.empty()) throw_data("empty id at line " + std::to_string(line_no));
    if (cells.size() != dim + 2) {
      throw_data("dimension mismatch at id " + r.id + " (expected " +
                 std::to_string(dim) + ", got " +
                 std::to_string(cells.size() < 2 ? 0 : cells.size() - 2) + ")");
    }
    if (cells.size() > 1 && !cells[1].empty()) r.label = std::string(cells[1]);
    r.vector.reserve(dim);
    for (std::size_t i = 2; i < cells.size(); ++i)
      r.vector.push_back(parse_double(cells[i], line_no));
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace detail

inline Corpus read_corpus(std::istream& in, CorpusFormat format,
                          std::string name) {
  std::vector<std::string> meta;
  auto records = format == CorpusFormat::kJsonl ? detail::read_jsonl(in, meta)
                                                : detail::read_csv(in);
  if (records.empty()) throw_data("empty corpus '" + name + "'");
  Corpus c = Corpus::from_records(std::move(name), std::move(records));
  c.set_metadata(std::move(meta));
  return c;
}

/// Loads a corpus file; the corpus is named after the file stem.
inline Corpus load_corpus(const std::filesystem::path& path,
                          CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw_data("cannot open " + path.string());
  try {
    return read_corpus(in, format, path.stem().string());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

inline void write_corpus(std::ostream& out, const Corpus& corpus,
                         CorpusFormat format) {
  if (format == CorpusFormat::kJsonl) {
    for (const auto& m : corpus.metadata()) out << m << '\n';
    for (const auto& r : corpus.records()) {
      nlohmann::ordered_json obj;
      obj["id"] = r.id;
      obj["vector"] = r.vector;
      if (r.label) obj["label"] = *r.label;
      if (r.text) obj["text"] = *r.text;
      out << obj.dump() << '\n';
    }
    return;
  }
  out << "id,label";
  for (std::size_t i = 0; i < corpus.dim(); ++i) out << ",v" << i;
  out << '\n';
  for (const auto& r : corpus.records()) {
    auto has_separator = [](std::string_view s) {
      return s.find_first_of(",\n\r") != std::string_view::npos;
    };
    if (has_separator(r.id) || (r.label && has_separator(*r.label)))
      throw_invalid("id or label of " + r.id + " cannot be written as CSV");
    out << r.id << ',' << r.label.value_or("");
    for (double v : r.vector) out << ',' << nlohmann::json(v).dump();
    out << '\n';
  }
}

}  // namespace ttedepth
