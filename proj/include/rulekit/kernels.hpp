#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rulekit/bitvector.hpp"
#include "rulekit/dataset.hpp"

namespace rulekit {

class SubproblemInstance;

enum class Exec { serial, parallel };

/// Weight of samples removed from a coverage set when a feature is added:
/// `u` sums |weight| over negatively weighted samples, `w` sums positive
/// weights (without the per-literal penalty).
struct ExclusionGain {
  double u = 0;
  double w = 0;
};

namespace kernels {

/// For each feature j in `features`: weights of samples in `coverage`
/// excluded by j, i.e. coverage & ~column(j). One independent popcount scan
/// per feature.
void exclusion_gains(const SubproblemInstance& inst, const BitVector& coverage,
                     std::span<const FeatureIndex> features, std::span<ExclusionGain> out,
                     Exec exec = Exec::parallel);

/// Reference loop kept for testing and benchmarking the OpenMP version.
void exclusion_gains_serial(const SubproblemInstance& inst, const BitVector& coverage,
                            std::span<const FeatureIndex> features, std::span<ExclusionGain> out);

/// Samples covered by every column except column j, for each j in `features`.
std::vector<BitVector> leave_one_out_cover(const BinaryDataset& data, std::span<const FeatureIndex> features);

/// Number of features the parallel kernel needs before it forks threads.
inline constexpr std::size_t kParallelThreshold = 64;

int thread_count();
void set_thread_count(int threads);

}  // namespace kernels
}  // namespace rulekit
