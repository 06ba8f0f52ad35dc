#include <doctest.h>

#include <random>
#include <vector>

#include "rulekit/kernels.hpp"
#include "rulekit/subproblem.hpp"
#include "rulekit/synthetic.hpp"

using namespace rulekit;

TEST_CASE("parallel exclusion gains equal the serial reference and a dense loop") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> wt(-2.0, 2.0);
  for (std::size_t d : {5u, 63u, 64u, 200u}) {
    BinaryDataset data = random_unstructured_dataset(517, d, d + 1);
    std::vector<double> weights(data.sample_count());
    for (auto& w : weights) w = wt(rng);
    SubproblemInstance inst(data, weights, 0.3);
    BitVector coverage(data.sample_count());
    for (std::size_t i = 0; i < coverage.size(); ++i)
      if (rng() % 3) coverage.set(i);
    std::vector<FeatureIndex> features(d);
    for (std::size_t j = 0; j < d; ++j) features[j] = static_cast<FeatureIndex>(j);

    std::vector<ExclusionGain> par(d), ser(d);
    kernels::exclusion_gains(inst, coverage, features, par, Exec::parallel);
    kernels::exclusion_gains_serial(inst, coverage, features, ser);
    for (std::size_t j = 0; j < d; ++j) {
      CHECK(par[j].u == doctest::Approx(ser[j].u).epsilon(1e-12));
      CHECK(par[j].w == doctest::Approx(ser[j].w).epsilon(1e-12));
      double u = 0, w = 0;
      for (std::size_t i = 0; i < data.sample_count(); ++i) {
        if (!coverage.test(i) || data.value(i, features[j])) continue;
        if (weights[i] < 0) u -= weights[i]; else w += weights[i];
      }
      CHECK(ser[j].u == doctest::Approx(u));
      CHECK(ser[j].w == doctest::Approx(w));
    }
  }
}

TEST_CASE("leave-one-out cover is the cover of all other features") {
  BinaryDataset data = random_unstructured_dataset(300, 12, 5, 0.93);
  std::vector<FeatureIndex> rule{1, 4, 7, 10};
  auto loo = kernels::leave_one_out_cover(data, rule);
  REQUIRE(loo.size() == rule.size());
  for (std::size_t a = 0; a < rule.size(); ++a) {
    std::vector<FeatureIndex> rest;  // every feature but rule[a]
    for (FeatureIndex j = 0; j < data.feature_count(); ++j)
      if (j != rule[a]) rest.push_back(j);
    CHECK(loo[a] == data.cover(rest));
  }
}
