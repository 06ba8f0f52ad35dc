#pragma once

// Dense-matrix oracles, written independently of the bit-vector code paths.

#include <cstdint>
#include <random>
#include <vector>

#include "rulekit/dataset.hpp"
#include "rulekit/objective.hpp"

namespace testing {

struct Dense {
  std::vector<std::vector<std::uint8_t>> x;  // n rows of d bits
  std::vector<std::uint8_t> y;
  rulekit::BinaryDataset data;
};

inline Dense random_dense(std::size_t n, std::size_t d, std::mt19937_64& rng, double p = 0.6, double pos = 0.5) {
  std::bernoulli_distribution bit(p), label(pos);
  Dense out;
  out.x.assign(n, std::vector<std::uint8_t>(d));
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.x[i][j] = bit(rng) ? 1 : 0;
    out.y[i] = label(rng) ? 1 : 0;
  }
  out.data = rulekit::BinaryDataset::from_rows(out.x, out.y);
  return out;
}

inline bool covers(const Dense& dn, const std::vector<rulekit::FeatureIndex>& rule, std::size_t i) {
  for (auto j : rule)
    if (!dn.x[i][j]) return false;
  return true;
}

/// sum_i w_i [R covers i] - lambda |R|, straight from the rows.
inline double dense_value(const Dense& dn, const std::vector<double>& w, double lambda,
                          const std::vector<rulekit::FeatureIndex>& rule) {
  double v = 0;
  for (std::size_t i = 0; i < dn.x.size(); ++i)
    if (covers(dn, rule, i)) v += w[i];
  return v - lambda * static_cast<double>(rule.size());
}

/// Profit V(S) = g(S) - sum c(R) from the rows.
inline double dense_profit(const Dense& dn, const rulekit::Hyperparams& h,
                           const std::vector<std::vector<rulekit::FeatureIndex>>& rules) {
  double g = 0, c = 0;
  for (std::size_t i = 0; i < dn.x.size(); ++i) {
    bool any = false;
    for (const auto& r : rules) {
      if (!covers(dn, r, i)) continue;
      any = true;
      c += dn.y[i] ? h.beta2 : h.beta0;
    }
    if (any && dn.y[i]) g += h.beta1 + h.beta2;
  }
  for (const auto& r : rules) c += h.lambda * static_cast<double>(r.size());
  return g - c;
}

inline std::vector<rulekit::FeatureIndex> mask_to_rule(std::uint64_t mask, std::size_t d) {
  std::vector<rulekit::FeatureIndex> r;
  for (std::size_t j = 0; j < d; ++j)
    if ((mask >> j) & 1U) r.push_back(static_cast<rulekit::FeatureIndex>(j));
  return r;
}

inline std::vector<rulekit::FeatureIndex> random_subset(std::size_t d, std::mt19937_64& rng, double p = 0.3) {
  std::bernoulli_distribution take(p);
  std::vector<rulekit::FeatureIndex> r;
  for (std::size_t j = 0; j < d; ++j)
    if (take(rng)) r.push_back(static_cast<rulekit::FeatureIndex>(j));
  return r;
}

}  // namespace testing
