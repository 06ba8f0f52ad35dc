#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rulekit/bitvector.hpp"
#include "rulekit/dataset.hpp"

namespace rulekit {

/// Tolerance used for all objective comparisons.
inline constexpr double kValueTolerance = 1e-9;
/// Strict-improvement margin for accepting local-search moves.
inline constexpr double kImproveEpsilon = 1e-12;

/// Loss weights and search sizes.
///   beta0  weight of each covered negative
///   beta1  weight of each uncovered positive
///   beta2  weight of each extra cover of a positive (overlap)
///   lambda per-literal penalty
struct Hyperparams {
  double beta0 = 1.0;
  double beta1 = 1.0;
  double beta2 = 0.1;
  double lambda = 1.0;
  std::size_t max_rules = 16;        // K
  std::size_t active_set_size = 16;  // M

  /// Throws ConfigError naming the violated constraint. beta1 > (e-1) beta2
  /// keeps the uncovered-positive weight positive for every distortion factor.
  void validate() const;
  bool valid() const;

  /// "penalized-01", "overlap-eta" (eta = beta2, at most 1) or "hamming".
  static Hyperparams preset(std::string_view name, double lambda = 1.0, double eta = 0.1);

  bool operator==(const Hyperparams&) const = default;
};

/// A conjunction of features with its cached coverage.
class Rule {
 public:
  Rule() = default;
  /// Sorts `features`; throws DataError on duplicates or out-of-range indices.
  Rule(std::vector<FeatureIndex> features, const BinaryDataset& data);
  Rule(std::vector<FeatureIndex> features, BitVector coverage);  // trusted, already sorted

  static Rule empty(const BinaryDataset& data) { return Rule({}, BitVector::ones(data.sample_count())); }

  std::span<const FeatureIndex> features() const { return features_; }
  const std::vector<FeatureIndex>& feature_vector() const { return features_; }
  const BitVector& coverage() const { return coverage_; }
  std::size_t size() const { return features_.size(); }
  bool contains(FeatureIndex j) const;

  bool operator==(const Rule& other) const { return features_ == other.features_; }

 private:
  std::vector<FeatureIndex> features_;
  BitVector coverage_;
};

/// Ordered set of distinct rules with per-sample cover counts.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::size_t sample_count);

  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }
  std::size_t sample_count() const { return cover_count_.size(); }
  std::span<const Rule> rules() const { return rules_; }
  const Rule& operator[](std::size_t k) const { return rules_[k]; }

  /// Adds the rule at `position` (default: the end) unless an identical rule
  /// is present; returns whether it was inserted.
  bool insert(Rule rule, std::size_t position = static_cast<std::size_t>(-1));
  void erase(std::size_t k);
  bool contains(const Rule& rule) const;

  std::span<const std::uint32_t> cover_count() const { return cover_count_; }
  /// Samples covered by at least one rule.
  const BitVector& covered() const { return covered_; }
  std::size_t literal_count() const;

  /// Same rules regardless of order.
  bool same_rules(const RuleSet& other) const;

 private:
  std::vector<Rule> rules_;
  std::vector<std::uint32_t> cover_count_;
  BitVector covered_;
};

RuleSet make_rule_set(const BinaryDataset& data, const std::vector<std::vector<FeatureIndex>>& rules);

/// g(S) = (beta1 + beta2) |covered positives|
double revenue(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h);
/// c(R) = beta0 |covered negatives| + beta2 |covered positives| + lambda |R|
double rule_cost(const Rule& rule, const BinaryDataset& data, const Hyperparams& h);
/// g(R | S)
double marginal_revenue(const Rule& rule, const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h);
/// V(S) = g(S) - sum c(R)
double profit(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h);
/// L(S) in reorganized (revenue/cost) form.
double loss(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h);
/// L(S) summed sample by sample from the surrogate cover counts.
double loss_per_sample(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h);

struct Metrics {
  double accuracy = 0;
  std::size_t n_rules = 0;
  std::size_t n_literals = 0;
  double overlap = 0;  // fraction of samples covered by more than one rule
};

Metrics compute_metrics(std::span<const Rule> rules, const BinaryDataset& data);
Metrics compute_metrics(const RuleSet& rules, const BinaryDataset& data);

}  // namespace rulekit
