#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rulekit/dataset.hpp"
#include "rulekit/objective.hpp"
#include "rulekit/subproblem.hpp"

namespace rulekit {

enum class SubproblemMode { local_search, bnb_exact, bnb_timed };

std::string_view to_string(SubproblemMode mode);
SubproblemMode subproblem_mode_from_string(std::string_view text);

struct TrainConfig {
  Hyperparams hyperparams;
  SubproblemMode mode = SubproblemMode::local_search;
  double time_limit_seconds = 600;  // per subproblem, bnb_timed only
  bool refine = true;
  std::uint64_t seed = 0;
  std::size_t ds_restarts = 1;
  /// Largest d for which bnb_exact is accepted.
  std::size_t exact_feature_cap = 24;
  Exec exec = Exec::parallel;

  void validate(std::size_t feature_count) const;
  SolverOptions solver_options() const;
};

struct IterationRecord {
  std::size_t k = 0;
  double alpha = 1;
  std::vector<FeatureIndex> rule;
  double value = 0;          // v_k(R*)
  bool inserted = false;
  double profit_after = 0;   // V(S) after this step
  bool optimal = false;      // subproblem solved to proven optimality
};

struct TrainReport {
  std::vector<IterationRecord> greedy;
  std::vector<IterationRecord> refine;
  std::size_t refine_passes = 0;
  bool refine_cap_hit = false;
  double greedy_seconds = 0;
  double refine_seconds = 0;
  bool all_subproblems_optimal = true;
  double final_profit = 0;
  Metrics train_metrics;
};

struct TrainResult {
  RuleSet rules;
  TrainReport report;
};

struct SubproblemSolution {
  Rule rule;
  double value = 0;
  bool optimal = false;
};

/// (1 - 1/K)^(K - k); 1 when K = 1.
double distortion(std::size_t k, std::size_t max_rules);

SubproblemSolution solve_subproblem(const SubproblemInstance& inst, const TrainConfig& cfg);

/// Distorted greedy: K rounds, each adding the best distorted-gain rule when
/// its value is positive.
TrainResult distorted_greedy(const BinaryDataset& data, const TrainConfig& cfg);

/// Grow to K rules, then try to replace each rule by the best rule for the
/// remaining set, until the set stops changing. V never decreases.
RuleSet refine(RuleSet rules, const BinaryDataset& data, const TrainConfig& cfg, TrainReport* report = nullptr);

/// distorted_greedy followed by refine when cfg.refine is set.
TrainResult train(const BinaryDataset& data, const TrainConfig& cfg);

/// 1 iff some rule's features are all set in x. Throws DataError when
/// x.size() != feature_count.
bool predict(const RuleSet& rules, std::size_t feature_count, std::span<const std::uint8_t> x);
bool predict(std::span<const std::vector<FeatureIndex>> rules, std::size_t feature_count,
             std::span<const std::uint8_t> x);
/// Predictions for every sample of `data`.
BitVector predict(std::span<const std::vector<FeatureIndex>> rules, const BinaryDataset& data);

}  // namespace rulekit
