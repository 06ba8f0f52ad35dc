#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rulekit/dataset.hpp"
#include "rulekit/learner.hpp"

namespace rulekit {

/// Fold assignment. Stratified plans deal shuffled positives round-robin,
/// then continue dealing shuffled negatives from where the positives left
/// off, so per-fold class counts differ by at most one.
struct CvPlan {
  std::size_t n_folds = 10;
  bool stratified = true;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;

  static CvPlan make(const BitVector& labels, std::size_t n_folds, std::uint64_t seed, bool stratified = true);

  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> test_indices(std::size_t fold) const;
};

struct Summary {
  double mean = 0;
  double std = 0;  // sample standard deviation, 0 with fewer than two values
};

Summary summarize(std::span<const double> values);

struct FoldResult {
  std::size_t fold = 0;
  bool skipped = false;
  Metrics test;
  std::vector<std::vector<FeatureIndex>> rules;
};

struct ConfigResult {
  TrainConfig config;
  std::vector<FoldResult> folds;
  std::size_t folds_used = 0;
  Summary accuracy, n_rules, n_literals, overlap;
};

struct CvReport {
  std::vector<ConfigResult> configs;
  std::vector<std::string> warnings;

  /// Highest mean accuracy, ties to fewer mean literals, then grid order.
  std::size_t best() const;
};

/// Trains every config on every training split and scores it on the held
/// out fold. (config, fold) jobs run concurrently on up to `jobs` threads;
/// results do not depend on the thread count. A fold whose training split
/// holds a single class is skipped with a warning.
CvReport cross_validate(const BinaryDataset& data, std::span<const TrainConfig> grid, const CvPlan& plan,
                        std::size_t jobs = 1);

struct NestedFold {
  std::size_t fold = 0;
  bool skipped = false;
  std::size_t selected = 0;      // index into the grid
  double inner_accuracy = 0;     // mean inner-CV accuracy of the selected config
  Metrics test;
  std::vector<std::vector<FeatureIndex>> rules;
};

struct NestedCvReport {
  std::vector<NestedFold> folds;
  Summary accuracy, n_rules, n_literals, overlap;
  std::vector<std::string> warnings;
};

/// Outer CV whose config is chosen per fold by an inner CV on the training
/// split (selection as in CvReport::best), then refit on the whole split.
NestedCvReport nested_cross_validate(const BinaryDataset& data, std::span<const TrainConfig> grid,
                                     const CvPlan& outer, std::size_t inner_folds = 3, std::size_t jobs = 1);

/// beta2 in {0.5, 0.1, 0.01} x lambda in {0.1, 1, 4, 8, 16, 64} x K in
/// {8, 16, 32}; everything else from `base`.
std::vector<TrainConfig> standard_grid(const TrainConfig& base = {});

struct GapReport {
  double v_local = 0;
  double v_bnb = 0;
  std::optional<double> gap;  // (v_bnb - v_local) / v_bnb, unset when v_bnb == 0
  bool bnb_all_optimal = false;
  double local_seconds = 0;
  double bnb_seconds = 0;
  Metrics local_metrics;
  Metrics bnb_metrics;
};

/// Trains with local search and with branch and bound (timed when
/// `bnb_time_limit` is set, otherwise exact with no feature cap).
GapReport relative_gap(const BinaryDataset& data, const TrainConfig& cfg,
                       std::optional<double> bnb_time_limit = std::nullopt);

void write_cv_csv(std::ostream& out, const CvReport& report, const std::string& dataset);
void write_cv_json(std::ostream& out, const CvReport& report, const std::string& dataset);
void write_nested_csv(std::ostream& out, const NestedCvReport& report, std::span<const TrainConfig> grid,
                      const std::string& dataset);
void write_nested_json(std::ostream& out, const NestedCvReport& report, std::span<const TrainConfig> grid,
                       const std::string& dataset);
void write_gap_csv(std::ostream& out, const GapReport& report, const TrainConfig& cfg, const std::string& dataset);
void write_gap_json(std::ostream& out, const GapReport& report, const TrainConfig& cfg, const std::string& dataset);
void write_train_report_json(std::ostream& out, const TrainReport& report);

}  // namespace rulekit
