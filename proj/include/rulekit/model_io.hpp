#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rulekit/dataset.hpp"
#include "rulekit/objective.hpp"

namespace rulekit {

inline constexpr int kModelFormatVersion = 1;

/// A trained rule set together with the features it was trained on.
/// Rules hold feature indices into `features`.
struct Model {
  std::vector<FeatureDescriptor> features;
  Hyperparams hyperparams;
  std::vector<std::vector<FeatureIndex>> rules;

  static Model from(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h);
};

/// JSON text. Rules are written as lists of feature names sorted by name, so
/// the output is byte-stable for a given rule set.
void save_model(std::ostream& out, const Model& model);
void save_model(const std::filesystem::path& path, const Model& model);
/// Throws IoError on malformed input, unknown format_version or rules that
/// name features missing from the descriptor list.
Model load_model(std::istream& in);
Model load_model(const std::filesystem::path& path);

/// "odor = n AND bruises != t"; the empty rule renders as "TRUE".
std::string render_rule(const Model& model, const std::vector<FeatureIndex>& rule);

/// 0/1 prediction for every sample of `data`, which must have been encoded
/// with the model's descriptors.
std::vector<std::uint8_t> predict_labels(const Model& model, const BinaryDataset& data);

}  // namespace rulekit
