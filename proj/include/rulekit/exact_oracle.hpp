#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rulekit/dataset.hpp"
#include "rulekit/objective.hpp"

namespace rulekit {

class SubproblemInstance;

struct BnbResult {
  Rule rule;
  double value = 0;
  bool proven_optimal = true;
  std::size_t nodes = 0;
};

/// Optional observer for a branch-and-bound run.
struct BnbTrace {
  std::vector<double> incumbents;  // every incumbent value, in discovery order
};

/// Optimistic value of every rule extending a node with the given coverage
/// and length: positive weight still covered minus lambda |R|.
double bnb_bound(const SubproblemInstance& inst, const BitVector& coverage, std::size_t literals);

/// Maximizes v over all subsets of `candidates` by depth-first branch and
/// bound. Candidates are branched in decreasing u({j}) order, children are
/// expanded best value first, and a child is pruned when its bound does not
/// beat the incumbent by more than 1e-12. With a time limit the incumbent is
/// returned with proven_optimal = false when the search is cut short.
BnbResult bnb_max(const SubproblemInstance& inst, std::span<const FeatureIndex> candidates,
                  std::optional<double> time_limit_seconds = std::nullopt, BnbTrace* trace = nullptr);

/// All 2^m subsets of `candidates`, for checking bnb_max. m <= 24.
BnbResult enumerate_best_subset(const SubproblemInstance& inst, std::span<const FeatureIndex> candidates);

struct RuleSetOptimum {
  RuleSet rules;
  double profit = 0;
};

/// Exact argmax of V over rule sets of at most K distinct rules drawn from
/// all 2^d conjunctions. Throws ConfigError when the enumeration would
/// exceed `max_combinations`.
RuleSetOptimum brute_force_ruleset_opt(const BinaryDataset& data, const Hyperparams& h, std::size_t max_rules,
                                       std::size_t max_combinations = 50'000'000);

}  // namespace rulekit
