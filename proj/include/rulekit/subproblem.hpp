#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rulekit/bitvector.hpp"
#include "rulekit/dataset.hpp"
#include "rulekit/kernels.hpp"
#include "rulekit/objective.hpp"

namespace rulekit {

/// Samples sharing one nonzero weight.
struct WeightClass {
  double weight = 0;
  BitVector members;
};

/// Weighted-coverage rule search problem
///   v(R) = sum_i w_i [R covers i] - lambda |R|
/// decomposed as v(R) = total + u(R) - w(R), where u is the negative weight
/// and w the positive weight of the samples R excludes (w also carries
/// lambda |R|). Holds a reference to the dataset, which must outlive it.
class SubproblemInstance {
 public:
  SubproblemInstance(const BinaryDataset& data, std::vector<double> weights, double lambda, double alpha = 1.0);

  const BinaryDataset& data() const { return *data_; }
  std::size_t feature_count() const { return data_->feature_count(); }
  std::size_t sample_count() const { return data_->sample_count(); }

  std::span<const double> weights() const { return weights_; }
  std::span<const WeightClass> classes() const { return classes_; }
  double lambda() const { return lambda_; }
  double alpha() const { return alpha_; }
  double weight_total() const { return weight_total_; }
  const BitVector& pos_samples() const { return pos_samples_; }
  const BitVector& neg_samples() const { return neg_samples_; }

  /// sum of weights over `coverage`
  double covered_weight(const BitVector& coverage) const;
  /// sum of positive weights over `coverage`
  double covered_positive_weight(const BitVector& coverage) const;
  /// Weights of the samples outside `coverage`: u part (negated negative
  /// weights) and w part (positive weights, lambda not included).
  ExclusionGain excluded_weight(const BitVector& coverage) const;

  double value(const BitVector& coverage, std::size_t literals) const {
    return covered_weight(coverage) - lambda_ * static_cast<double>(literals);
  }
  double value(std::span<const FeatureIndex> rule) const;
  double value(const Rule& rule) const { return value(rule.coverage(), rule.size()); }
  double u(std::span<const FeatureIndex> rule) const;
  double w(std::span<const FeatureIndex> rule) const;

  Rule make_rule(std::vector<FeatureIndex> features) const { return Rule(std::move(features), *data_); }

 private:
  const BinaryDataset* data_;
  std::vector<double> weights_;
  std::vector<WeightClass> classes_;
  double lambda_;
  double alpha_;
  double weight_total_ = 0;
  BitVector pos_samples_;
  BitVector neg_samples_;
};

/// Weights for v(R | S; alpha) = alpha g(R | S) - c(R): uncovered positives
/// get alpha (beta1 + beta2) - beta2, covered positives -beta2, negatives
/// -beta0. Throws ConfigError when the uncovered-positive weight is not
/// positive or alpha is outside (1/e, 1].
SubproblemInstance build_instance(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h,
                                  double alpha);

enum class PermutationMode { ascending, seeded_random };
/// Move selection in the swap search: first improving move in ascending
/// feature order, or the best move of each kind.
enum class ScanOrder { first_improvement, best_improvement };

struct SolverOptions {
  std::size_t active_set_size = 16;  // M
  PermutationMode permutation = PermutationMode::ascending;
  std::uint64_t seed = 0;
  /// Chains tried per DS-OPT iteration; extra chains use seeded random orders.
  std::size_t ds_restarts = 1;
  ScanOrder scan = ScanOrder::first_improvement;
  /// Loop cap for every iterative routine; 0 means 10 * d.
  std::size_t iteration_cap = 0;
  Exec exec = Exec::parallel;

  std::size_t cap_for(std::size_t d) const { return iteration_cap != 0 ? iteration_cap : 10 * std::max<std::size_t>(d, 1); }
};

/// Objective trace of an iterative routine.
struct SearchLog {
  std::vector<double> values;
  std::size_t iterations = 0;
  bool cap_hit = false;
};

// --- modular bounds ---------------------------------------------------------

enum class SubmodularPart { u, w };

/// Modular set function m(Y) = constant + sum_{j in Y} coefficient[j].
struct ModularFunction {
  double constant = 0;
  std::vector<double> coefficient;

  double operator()(std::span<const FeatureIndex> set) const;
};

double evaluate_part(SubmodularPart part, const SubproblemInstance& inst, std::span<const FeatureIndex> set);

/// Chain permutation through `anchor`: anchor elements first, then the rest.
std::vector<FeatureIndex> chain_permutation(std::span<const FeatureIndex> anchor, std::size_t d,
                                            PermutationMode mode, std::uint64_t seed);

/// Tight modular lower bound h^pi of f at X along `permutation` (whose
/// prefix must be X).
ModularFunction chain_lower_bound(SubmodularPart part, const SubproblemInstance& inst,
                                  std::span<const FeatureIndex> anchor, std::span<const FeatureIndex> permutation);
/// m1: removals priced at f(j | X \ j), additions at f(j | {}).
ModularFunction upper_bound_1(SubmodularPart part, const SubproblemInstance& inst,
                              std::span<const FeatureIndex> anchor, Exec exec = Exec::parallel);
/// m2: removals priced at f(j | V \ j), additions at f(j | X).
ModularFunction upper_bound_2(SubmodularPart part, const SubproblemInstance& inst,
                              std::span<const FeatureIndex> anchor, Exec exec = Exec::parallel);

// --- solvers ----------------------------------------------------------------

/// Modular-modular minorize-maximize ascent on u - w. Moves only on strict
/// improvement, so v(result) >= v(start).
Rule ds_opt(const Rule& start, const SubproblemInstance& inst, const SolverOptions& opts = {},
            SearchLog* log = nullptr);

/// Greedily grows `rule` to `target_size` features by the ratio u(j|R)/w(j|R).
Rule enlarge(const Rule& rule, std::size_t target_size, const SubproblemInstance& inst, Exec exec = Exec::parallel);

/// Exact best subset of `active` (branch and bound, no time limit).
Rule best_subset(const Rule& active, const SubproblemInstance& inst);

/// Add / remove / swap single features until none of them improves v.
Rule swap_local_search(const Rule& start, const SubproblemInstance& inst, const SolverOptions& opts = {},
                       SearchLog* log = nullptr);

/// Enlarge + BestSubset + DS-OPT + swap search from the empty rule until a
/// fixed point.
Rule local_combinatorial_search(const SubproblemInstance& inst, const SolverOptions& opts = {},
                                SearchLog* log = nullptr);

}  // namespace rulekit
