#include "rulekit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "rulekit/error.hpp"

namespace rulekit {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::categorical_eq: return "categorical-eq";
    case FeatureKind::categorical_neq: return "categorical-neq";
    case FeatureKind::numeric_le: return "numeric-le";
    case FeatureKind::numeric_gt: return "numeric-gt";
    case FeatureKind::raw_binary: return "raw-binary";
  }
  return "?";
}

FeatureKind feature_kind_from_string(std::string_view text) {
  for (auto k : {FeatureKind::categorical_eq, FeatureKind::categorical_neq, FeatureKind::numeric_le,
                 FeatureKind::numeric_gt, FeatureKind::raw_binary})
    if (to_string(k) == text) return k;
  throw DataError("unknown feature kind '" + std::string(text) + "'");
}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

// ---------------------------------------------------------------------------

bool FeatureDescriptor::matches(std::string_view cell) const {
  switch (kind) {
    case FeatureKind::categorical_eq:
    case FeatureKind::raw_binary:
      return cell == std::get<std::string>(operand);
    case FeatureKind::categorical_neq:
      return cell != std::get<std::string>(operand);
    case FeatureKind::numeric_le:
    case FeatureKind::numeric_gt: {
      auto v = parse_number(cell);
      if (!v) throw DataError("non-numeric value '" + std::string(cell) + "' in column '" + source_name + "'");
      const double z = std::get<double>(operand);
      return kind == FeatureKind::numeric_le ? *v <= z : *v > z;
    }
  }
  return false;
}

FeatureDescriptor FeatureDescriptor::categorical(std::string source, std::size_t column, std::string value,
                                                 bool equal) {
  FeatureDescriptor f;
  f.name = source + (equal ? " = " : " != ") + value;
  f.source_column = column;
  f.source_name = std::move(source);
  f.kind = equal ? FeatureKind::categorical_eq : FeatureKind::categorical_neq;
  f.operand = std::move(value);
  return f;
}

FeatureDescriptor FeatureDescriptor::numeric(std::string source, std::size_t column, double threshold,
                                             bool less_equal) {
  FeatureDescriptor f;
  f.name = source + (less_equal ? " <= " : " > ") + format_number(threshold);
  f.source_column = column;
  f.source_name = std::move(source);
  f.kind = less_equal ? FeatureKind::numeric_le : FeatureKind::numeric_gt;
  f.operand = threshold;
  return f;
}

FeatureDescriptor FeatureDescriptor::raw_binary(std::string source, std::size_t column) {
  FeatureDescriptor f;
  f.name = source;
  f.source_column = column;
  f.source_name = std::move(source);
  f.kind = FeatureKind::raw_binary;
  f.operand = std::string("1");
  return f;
}

// ---------------------------------------------------------------------------

BinaryDataset::BinaryDataset(std::vector<BitVector> columns, BitVector labels,
                             std::vector<FeatureDescriptor> descriptors)
    : columns_(std::move(columns)), labels_(std::move(labels)), descriptors_(std::move(descriptors)) {
  if (columns_.size() != descriptors_.size())
    throw DataError("descriptor count " + std::to_string(descriptors_.size()) + " != column count " +
                    std::to_string(columns_.size()));
  const std::size_t n = labels_.size();
  std::set<std::string_view> names;
  exclusions_.reserve(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != n) throw DataError("column " + std::to_string(j) + " has wrong length");
    if (!names.insert(descriptors_[j].name).second)
      throw DataError("duplicate feature name '" + descriptors_[j].name + "'");
    exclusions_.push_back(~columns_[j]);
  }
  negatives_ = ~labels_;
}

BinaryDataset BinaryDataset::from_rows(const std::vector<std::vector<std::uint8_t>>& rows,
                                       const std::vector<std::uint8_t>& labels, std::vector<std::string> names) {
  if (rows.size() != labels.size()) throw DataError("row count differs from label count");
  const std::size_t n = rows.size();
  const std::size_t d = rows.empty() ? names.size() : rows.front().size();
  if (names.empty())
    for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  if (names.size() != d) throw DataError("name count differs from feature count");
  std::vector<BitVector> cols(d, BitVector(n));
  BitVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != d) throw DataError("ragged rows");
    for (std::size_t j = 0; j < d; ++j)
      if (rows[i][j]) cols[j].set(i);
    if (labels[i]) y.set(i);
  }
  std::vector<FeatureDescriptor> desc;
  desc.reserve(d);
  for (std::size_t j = 0; j < d; ++j) desc.push_back(FeatureDescriptor::raw_binary(names[j], j));
  return BinaryDataset(std::move(cols), std::move(y), std::move(desc));
}

std::vector<std::uint8_t> BinaryDataset::row(std::size_t sample) const {
  std::vector<std::uint8_t> out(feature_count());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = columns_[j].test(sample) ? 1 : 0;
  return out;
}

BitVector BinaryDataset::cover(std::span<const FeatureIndex> features) const {
  BitVector c = BitVector::ones(sample_count());
  for (FeatureIndex j : features) c &= columns_[j];
  return c;
}

BinaryDataset BinaryDataset::subset(std::span<const std::size_t> samples) const {
  const std::size_t m = samples.size();
  std::vector<BitVector> cols(feature_count(), BitVector(m));
  BitVector y(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = samples[k];
    if (i >= sample_count()) throw DataError("subset index out of range");
    if (labels_.test(i)) y.set(k);
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (columns_[j].test(i)) cols[j].set(k);
  }
  return BinaryDataset(std::move(cols), std::move(y), descriptors_);
}

std::optional<FeatureIndex> BinaryDataset::find_feature(std::string_view name) const {
  for (std::size_t j = 0; j < descriptors_.size(); ++j)
    if (descriptors_[j].name == name) return static_cast<FeatureIndex>(j);
  return std::nullopt;
}

// ---------------------------------------------------------------------------

ColumnKind column_kind_from_string(std::string_view text) {
  if (text == "categorical") return ColumnKind::categorical;
  if (text == "numeric") return ColumnKind::numeric;
  if (text == "binary") return ColumnKind::binary;
  if (text == "ignore") return ColumnKind::ignore;
  throw DataError("unknown column kind '" + std::string(text) + "'");
}

ColumnSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed schema '" + path.string() + "': " + e.what());
  }
  ColumnSchema schema;
  try {
    schema.label_column = doc.at("label").get<std::string>();
    if (doc.contains("positive")) schema.positive_label = doc.at("positive").get<std::string>();
    if (doc.contains("columns"))
      for (const auto& [name, kind] : doc.at("columns").items())
        schema.kinds[name] = column_kind_from_string(kind.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed schema '" + path.string() + "': " + e.what());
  }
  return schema;
}

std::vector<double> decile_boundaries(std::vector<double> values) {
  std::vector<double> out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  for (std::size_t k = 1; k <= 9; ++k) {
    const std::size_t rank = (k * n + 9) / 10;  // ceil(k n / 10)
    const double z = values[rank == 0 ? 0 : rank - 1];
    if (out.empty() || out.back() != z) out.push_back(z);
  }
  return out;
}

namespace {

bool is_missing(std::string_view cell) { return cell.empty() || cell == "?" || cell == "NA"; }

ColumnKind infer_kind(const Table& table, std::size_t col) {
  bool numeric = true, binary = true;
  for (const auto& row : table.rows) {
    const std::string& cell = row[col];
    if (cell != "0" && cell != "1") binary = false;
    if (!parse_number(cell)) numeric = false;
  }
  if (binary) return ColumnKind::binary;
  return numeric ? ColumnKind::numeric : ColumnKind::categorical;
}

BitVector read_labels(const Table& table, const ColumnSchema& schema) {
  const std::size_t col = table.column_index(schema.label_column);
  std::set<std::string> values;
  for (const auto& row : table.rows) {
    if (is_missing(row[col])) throw DataError("missing label value");
    values.insert(row[col]);
  }
  if (values.size() > 2)
    throw DataError("non-binary label column '" + schema.label_column + "' (" + std::to_string(values.size()) +
                    " distinct values)");
  BitVector y(table.row_count());
  for (std::size_t i = 0; i < table.row_count(); ++i) {
    const std::string& cell = table.rows[i][col];
    if (schema.positive_label) {
      if (cell == *schema.positive_label) y.set(i);
    } else {
      auto v = parse_number(cell);
      if (!v || (*v != 0.0 && *v != 1.0))
        throw DataError("non-binary label value '" + cell + "'; declare the positive label");
      if (*v == 1.0) y.set(i);
    }
  }
  return y;
}

}  // namespace

BinarizeResult binarize(const Table& table, const ColumnSchema& schema) {
  if (table.row_count() == 0) throw DataError("empty table");
  const std::size_t n = table.row_count();
  const std::size_t label_col = table.column_index(schema.label_column);
  for (const auto& [name, kind] : schema.kinds)
    if (!table.find_column(name)) throw DataError("schema names unknown column '" + name + "'");

  BinarizeResult result;
  BitVector labels = read_labels(table, schema);
  std::vector<BitVector> columns;
  std::vector<FeatureDescriptor> descriptors;

  auto emit = [&](FeatureDescriptor desc) {
    BitVector bits(n);
    for (std::size_t i = 0; i < n; ++i)
      if (desc.matches(table.rows[i][desc.source_column])) bits.set(i);
    columns.push_back(std::move(bits));
    descriptors.push_back(std::move(desc));
  };

  for (std::size_t col = 0; col < table.column_count(); ++col) {
    if (col == label_col) continue;
    const std::string& name = table.header[col];
    auto it = schema.kinds.find(name);
    ColumnKind kind = it != schema.kinds.end() ? it->second : ColumnKind::ignore;
    if (kind == ColumnKind::ignore && it != schema.kinds.end()) continue;
    for (std::size_t i = 0; i < n; ++i)
      if (is_missing(table.rows[i][col]))
        throw DataError("missing value in column '" + name + "' at row " + std::to_string(i + 1));
    if (it == schema.kinds.end()) kind = infer_kind(table, col);

    std::set<std::string> distinct;
    for (const auto& row : table.rows) distinct.insert(row[col]);
    if (distinct.size() < 2) {
      result.warnings.push_back("column '" + name + "' has a single distinct value; skipped");
      continue;
    }

    switch (kind) {
      case ColumnKind::categorical:
        for (const auto& z : distinct) {
          emit(FeatureDescriptor::categorical(name, col, z, true));
          emit(FeatureDescriptor::categorical(name, col, z, false));
        }
        break;
      case ColumnKind::binary: {
        for (const auto& z : distinct)
          if (z != "0" && z != "1") throw DataError("binary column '" + name + "' has value '" + z + "'");
        emit(FeatureDescriptor::raw_binary(name, col));
        emit(FeatureDescriptor::categorical(name, col, "1", false));
        break;
      }
      case ColumnKind::numeric: {
        std::vector<double> values;
        values.reserve(n);
        for (const auto& row : table.rows) {
          auto v = parse_number(row[col]);
          if (!v) throw DataError("non-numeric value '" + row[col] + "' in numeric column '" + name + "'");
          values.push_back(*v);
        }
        for (double z : decile_boundaries(std::move(values))) {
          emit(FeatureDescriptor::numeric(name, col, z, true));
          emit(FeatureDescriptor::numeric(name, col, z, false));
        }
        break;
      }
      case ColumnKind::ignore:
        break;
    }
  }

  // Bit-identical columns are kept (indices follow the protocol) but reported.
  std::vector<std::size_t> order(columns.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  auto words_less = [&](std::size_t a, std::size_t b) {
    auto wa = columns[a].words(), wb = columns[b].words();
    return std::lexicographical_compare(wa.begin(), wa.end(), wb.begin(), wb.end());
  };
  std::stable_sort(order.begin(), order.end(), words_less);
  for (std::size_t k = 1; k < order.size(); ++k)
    if (columns[order[k]] == columns[order[k - 1]])
      result.warnings.push_back("features '" + descriptors[order[k - 1]].name + "' and '" +
                                descriptors[order[k]].name + "' are identical");

  result.data = BinaryDataset(std::move(columns), std::move(labels), std::move(descriptors));
  return result;
}

BinaryDataset encode(const Table& table, std::span<const FeatureDescriptor> descriptors,
                     const std::optional<ColumnSchema>& schema) {
  const std::size_t n = table.row_count();
  std::vector<BitVector> columns;
  std::vector<FeatureDescriptor> remapped;
  for (const auto& desc : descriptors) {
    FeatureDescriptor d = desc;
    d.source_column = table.column_index(desc.source_name);
    BitVector bits(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& cell = table.rows[i][d.source_column];
      if (is_missing(cell))
        throw DataError("missing value in column '" + d.source_name + "' at row " + std::to_string(i + 1));
      if (d.matches(cell)) bits.set(i);
    }
    columns.push_back(std::move(bits));
    remapped.push_back(std::move(d));
  }
  BitVector labels(n);
  if (schema && table.find_column(schema->label_column)) labels = read_labels(table, *schema);
  return BinaryDataset(std::move(columns), std::move(labels), std::move(remapped));
}

}  // namespace rulekit
