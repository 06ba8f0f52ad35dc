#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rulekit/bitvector.hpp"
#include "rulekit/table.hpp"

namespace rulekit {

using FeatureIndex = std::uint32_t;

enum class FeatureKind { categorical_eq, categorical_neq, numeric_le, numeric_gt, raw_binary };

std::string_view to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(std::string_view text);

/// One binarized feature: a test on a single source column.
struct FeatureDescriptor {
  std::string name;
  std::size_t source_column = 0;
  std::string source_name;
  FeatureKind kind = FeatureKind::categorical_eq;
  /// Category value for categorical/raw-binary kinds, threshold for numeric kinds.
  std::variant<std::string, double> operand;

  /// Evaluates the test on a raw cell value. Throws DataError when a numeric
  /// test sees a non-numeric cell.
  bool matches(std::string_view cell) const;

  static FeatureDescriptor categorical(std::string source, std::size_t column, std::string value, bool equal);
  static FeatureDescriptor numeric(std::string source, std::size_t column, double threshold, bool less_equal);
  static FeatureDescriptor raw_binary(std::string source, std::size_t column);

  bool operator==(const FeatureDescriptor&) const = default;
};

/// n x d binary design matrix stored column-wise, plus the label vector.
/// Immutable once built.
class BinaryDataset {
 public:
  BinaryDataset() = default;
  BinaryDataset(std::vector<BitVector> columns, BitVector labels, std::vector<FeatureDescriptor> descriptors);

  /// Dense 0/1 rows, mostly for tests and small hand-built instances.
  static BinaryDataset from_rows(const std::vector<std::vector<std::uint8_t>>& rows,
                                 const std::vector<std::uint8_t>& labels,
                                 std::vector<std::string> names = {});

  std::size_t sample_count() const { return labels_.size(); }
  std::size_t feature_count() const { return columns_.size(); }

  const BitVector& column(FeatureIndex j) const { return columns_[j]; }
  const BitVector& exclusion(FeatureIndex j) const { return exclusions_[j]; }
  std::span<const BitVector> columns() const { return columns_; }
  std::span<const BitVector> exclusions() const { return exclusions_; }
  const BitVector& labels() const { return labels_; }
  const BitVector& positives() const { return labels_; }
  const BitVector& negatives() const { return negatives_; }
  std::span<const FeatureDescriptor> descriptors() const { return descriptors_; }
  const FeatureDescriptor& descriptor(FeatureIndex j) const { return descriptors_[j]; }

  bool value(std::size_t sample, FeatureIndex j) const { return columns_[j].test(sample); }
  bool label(std::size_t sample) const { return labels_.test(sample); }
  std::vector<std::uint8_t> row(std::size_t sample) const;

  /// Samples satisfying every feature of the conjunction; all-ones when empty.
  BitVector cover(std::span<const FeatureIndex> features) const;

  /// Restriction to the given sample indices (in that order).
  BinaryDataset subset(std::span<const std::size_t> samples) const;

  std::optional<FeatureIndex> find_feature(std::string_view name) const;

 private:
  std::vector<BitVector> columns_;
  std::vector<BitVector> exclusions_;
  BitVector labels_;
  BitVector negatives_;
  std::vector<FeatureDescriptor> descriptors_;
};

enum class ColumnKind { categorical, numeric, binary, ignore };

/// Declares how each raw column is binarized. Columns absent from `kinds`
/// are inferred: {0,1}-valued -> binary, all numeric -> numeric, else categorical.
struct ColumnSchema {
  std::string label_column;
  /// Cell value mapped to label 1. When unset the label column must be {0,1}.
  std::optional<std::string> positive_label;
  std::map<std::string, ColumnKind> kinds;
};

ColumnSchema load_schema(const std::filesystem::path& path);
ColumnKind column_kind_from_string(std::string_view text);

struct BinarizeResult {
  BinaryDataset data;
  std::vector<std::string> warnings;
};

/// Categorical columns get `x = z` / `x != z` per category, numeric columns
/// get `x <= z` / `x > z` per distinct decile boundary, binary columns get
/// the raw feature and its complement. Constant columns are skipped.
BinarizeResult binarize(const Table& table, const ColumnSchema& schema);

/// Applies existing descriptors to a raw table (matched by source column
/// name). Labels are read when `schema` names a label column present in the
/// table, otherwise all labels are 0.
BinaryDataset encode(const Table& table, std::span<const FeatureDescriptor> descriptors,
                     const std::optional<ColumnSchema>& schema = std::nullopt);

/// Decile boundaries with the inclusive-lower order statistic at index
/// ceil(q n) - 1, deduplicated and ascending.
std::vector<double> decile_boundaries(std::vector<double> values);

std::string format_number(double value);
std::optional<double> parse_number(std::string_view text);

}  // namespace rulekit
