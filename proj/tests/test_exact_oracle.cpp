#include <doctest.h>

#include <random>
#include <vector>

#include "rulekit/error.hpp"
#include "rulekit/exact_oracle.hpp"
#include "rulekit/subproblem.hpp"
#include "rulekit/synthetic.hpp"
#include "support.hpp"

using namespace rulekit;

namespace {

std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> wt(-2.0, 2.0);
  std::vector<double> w(n);
  for (auto& x : w) x = wt(rng);
  return w;
}

std::vector<FeatureIndex> all_features(std::size_t d) {
  std::vector<FeatureIndex> f(d);
  for (std::size_t j = 0; j < d; ++j) f[j] = static_cast<FeatureIndex>(j);
  return f;
}

}  // namespace

TEST_CASE("bnb on no candidates returns the empty rule") {
  std::mt19937_64 rng(1);
  auto dn = testing::random_dense(20, 4, rng);
  SubproblemInstance inst(dn.data, random_weights(20, rng), 0.1);
  auto r = bnb_max(inst, {});
  CHECK(r.rule.size() == 0);
  CHECK(r.proven_optimal);
  CHECK(r.value == doctest::Approx(inst.weight_total()));
}

TEST_CASE("bnb equals exhaustive enumeration on up to 16 candidates") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng() % 16;
    auto dn = testing::random_dense(40 + rng() % 60, d, rng, 0.55 + 0.3 * (trial % 3) / 2.0);
    auto w = random_weights(dn.x.size(), rng);
    const double lambda = (trial % 4) * 0.15;
    SubproblemInstance inst(dn.data, w, lambda);
    BnbTrace trace;
    auto b = bnb_max(inst, all_features(d), std::nullopt, &trace);
    CHECK(b.proven_optimal);
    double oracle = -1e300;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << d); ++m)
      oracle = std::max(oracle, testing::dense_value(dn, w, lambda, testing::mask_to_rule(m, d)));
    CHECK(b.value == doctest::Approx(oracle));
    CHECK(inst.value(b.rule) == doctest::Approx(oracle));
    CHECK(enumerate_best_subset(inst, all_features(d)).value == doctest::Approx(oracle));
    for (std::size_t k = 1; k < trace.incumbents.size(); ++k) CHECK(trace.incumbents[k] >= trace.incumbents[k - 1]);
  }
}

TEST_CASE("bnb restricted to a candidate subset of a wide instance") {
  BinaryDataset data = random_unstructured_dataset(400, 64, 3, 0.7);
  std::mt19937_64 rng(3);
  SubproblemInstance inst(data, random_weights(400, rng), 0.2);
  std::vector<FeatureIndex> cand;
  for (FeatureIndex j = 0; j < 64; j += 3) cand.push_back(j);  // 22 features
  cand.resize(20);
  auto b = bnb_max(inst, cand);
  auto e = enumerate_best_subset(inst, cand);
  CHECK(b.value == doctest::Approx(e.value));
  for (auto j : b.rule.features()) CHECK(std::find(cand.begin(), cand.end(), j) != cand.end());
}

TEST_CASE("bound is admissible for every extension") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 6;
    auto dn = testing::random_dense(30, d, rng, 0.7);
    auto w = random_weights(30, rng);
    SubproblemInstance inst(dn.data, w, 0.3);
    auto node = testing::random_subset(d, rng, 0.3);
    const double bound = bnb_bound(inst, dn.data.cover(node), node.size());
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << d); ++m) {
      auto ext = testing::mask_to_rule(m, d);
      bool superset = std::includes(ext.begin(), ext.end(), node.begin(), node.end());
      if (superset) CHECK(testing::dense_value(dn, w, 0.3, ext) <= bound + 1e-9);
    }
  }
}

TEST_CASE("time limit returns an unproven incumbent") {
  BinaryDataset data = random_unstructured_dataset(3000, 160, 5, 0.85);
  std::mt19937_64 rng(5);
  SubproblemInstance inst(data, random_weights(3000, rng), 0.01);
  auto r = bnb_max(inst, all_features(160), 1e-6);
  CHECK_FALSE(r.proven_optimal);
  CHECK(r.value == doctest::Approx(inst.value(r.rule)));
  CHECK(r.value >= inst.weight_total() - 1e-9);
}

TEST_CASE("bnb is deterministic") {
  BinaryDataset data = random_unstructured_dataset(200, 18, 6, 0.7);
  std::mt19937_64 rng(6);
  SubproblemInstance inst(data, random_weights(200, rng), 0.2);
  auto a = bnb_max(inst, all_features(18));
  auto b = bnb_max(inst, all_features(18));
  CHECK(a.rule == b.rule);
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("brute-force rule-set optimum") {
  Hyperparams h;
  h.beta2 = 0.2;
  h.lambda = 0.3;
  std::mt19937_64 rng(7);
  SUBCASE("K = 0 gives the empty set") {
    auto dn = testing::random_dense(20, 3, rng);
    auto opt = brute_force_ruleset_opt(dn.data, h, 0);
    CHECK(opt.rules.empty());
    CHECK(opt.profit == 0.0);
  }
  SUBCASE("K = 1 matches the best single rule") {
    for (int trial = 0; trial < 20; ++trial) {
      auto dn = testing::random_dense(25, 3, rng);
      auto opt = brute_force_ruleset_opt(dn.data, h, 1);
      double best = 0;
      for (std::uint64_t m = 0; m < 8; ++m) best = std::max(best, testing::dense_profit(dn, h, {testing::mask_to_rule(m, 3)}));
      CHECK(opt.profit == doctest::Approx(best));
      CHECK(profit(opt.rules, dn.data, h) == doctest::Approx(best));
    }
  }
  SUBCASE("K = 2 matches pair enumeration") {
    for (int trial = 0; trial < 10; ++trial) {
      auto dn = testing::random_dense(25, 4, rng);
      auto opt = brute_force_ruleset_opt(dn.data, h, 2);
      double best = 0;
      for (std::uint64_t a = 0; a < 16; ++a)
        for (std::uint64_t b = a; b < 16; ++b) {
          std::vector<std::vector<FeatureIndex>> s{testing::mask_to_rule(a, 4)};
          if (b != a) s.push_back(testing::mask_to_rule(b, 4));
          best = std::max(best, testing::dense_profit(dn, h, s));
        }
      CHECK(opt.profit == doctest::Approx(best));
      CHECK(opt.rules.size() <= 2);
    }
  }
  SUBCASE("oversized instances are refused") {
    auto dn = testing::random_dense(10, 12, rng);
    CHECK_THROWS_AS(brute_force_ruleset_opt(dn.data, h, 4), ConfigError);
  }
}
