#include "rulekit/kernels.hpp"

#include <array>
#include <bit>
#include <cassert>

#ifdef RULEKIT_HAVE_OPENMP
#include <omp.h>
#endif

#include "rulekit/subproblem.hpp"

namespace rulekit::kernels {

namespace {

constexpr std::size_t kMaxInlineClasses = 8;

// Per-class popcounts of coverage & ~column, folded into (u, w).
ExclusionGain gain_for(const SubproblemInstance& inst, std::span<const BitVector::Word> cov,
                       std::span<const BitVector::Word> col) {
  const auto classes = inst.classes();
  ExclusionGain g;
  if (classes.size() <= kMaxInlineClasses) {
    std::array<std::size_t, kMaxInlineClasses> counts{};
    std::array<const BitVector::Word*, kMaxInlineClasses> masks{};
    for (std::size_t c = 0; c < classes.size(); ++c) masks[c] = classes[c].members.words().data();
    for (std::size_t k = 0; k < cov.size(); ++k) {
      const BitVector::Word x = cov[k] & ~col[k];
      if (x == 0) continue;
      for (std::size_t c = 0; c < classes.size(); ++c)
        counts[c] += static_cast<std::size_t>(std::popcount(x & masks[c][k]));
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const double wt = classes[c].weight * static_cast<double>(counts[c]);
      if (classes[c].weight < 0) g.u -= wt; else g.w += wt;
    }
    return g;
  }
  for (const auto& cls : classes) {
    const auto mask = cls.members.words();
    std::size_t count = 0;
    for (std::size_t k = 0; k < cov.size(); ++k)
      count += static_cast<std::size_t>(std::popcount(cov[k] & ~col[k] & mask[k]));
    const double wt = cls.weight * static_cast<double>(count);
    if (cls.weight < 0) g.u -= wt; else g.w += wt;
  }
  return g;
}

}  // namespace

void exclusion_gains_serial(const SubproblemInstance& inst, const BitVector& coverage,
                            std::span<const FeatureIndex> features, std::span<ExclusionGain> out) {
  assert(out.size() >= features.size());
  const auto& data = inst.data();
  const auto cov = coverage.words();
  for (std::size_t t = 0; t < features.size(); ++t) out[t] = gain_for(inst, cov, data.column(features[t]).words());
}

void exclusion_gains(const SubproblemInstance& inst, const BitVector& coverage,
                     std::span<const FeatureIndex> features, std::span<ExclusionGain> out, Exec exec) {
#ifdef RULEKIT_HAVE_OPENMP
  if (exec == Exec::parallel && features.size() >= kParallelThreshold && omp_get_max_threads() > 1 &&
      !omp_in_parallel()) {
    assert(out.size() >= features.size());
    const auto& data = inst.data();
    const auto cov = coverage.words();
    const auto m = static_cast<std::ptrdiff_t>(features.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < m; ++t)
      out[static_cast<std::size_t>(t)] = gain_for(inst, cov, data.column(features[static_cast<std::size_t>(t)]).words());
    return;
  }
#endif
  (void)exec;
  exclusion_gains_serial(inst, coverage, features, out);
}

std::vector<BitVector> leave_one_out_cover(const BinaryDataset& data, std::span<const FeatureIndex> features) {
  const std::size_t d = data.feature_count();
  const std::size_t n = data.sample_count();
  // suffix[k] = AND of columns k..d-1; the prefix is carried along the scan.
  std::vector<BitVector> suffix(d + 1, BitVector::ones(n));
  for (std::size_t k = d; k-- > 0;) suffix[k] = suffix[k + 1] & data.column(static_cast<FeatureIndex>(k));
  std::vector<BitVector> by_feature(d);
  BitVector prefix = BitVector::ones(n);
  for (std::size_t k = 0; k < d; ++k) {
    by_feature[k] = prefix & suffix[k + 1];
    prefix &= data.column(static_cast<FeatureIndex>(k));
  }
  std::vector<BitVector> out;
  out.reserve(features.size());
  for (FeatureIndex j : features) out.push_back(by_feature[j]);
  return out;
}

int thread_count() {
#ifdef RULEKIT_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int threads) {
#ifdef RULEKIT_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace rulekit::kernels
