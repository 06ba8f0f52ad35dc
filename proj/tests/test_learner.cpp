#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rulekit/error.hpp"
#include "rulekit/exact_oracle.hpp"
#include "rulekit/learner.hpp"
#include "rulekit/synthetic.hpp"
#include "support.hpp"
#include "tictactoe_rules.hpp"

using namespace rulekit;

namespace {

TrainConfig config(double beta2, double lambda, std::size_t k) {
  TrainConfig cfg;
  cfg.hyperparams.beta2 = beta2;
  cfg.hyperparams.lambda = lambda;
  cfg.hyperparams.max_rules = k;
  return cfg;
}

}  // namespace

TEST_CASE("distortion schedule") {
  CHECK(distortion(1, 8) == doctest::Approx(std::pow(7.0 / 8.0, 7)));
  CHECK(distortion(1, 8) == doctest::Approx(0.392696).epsilon(1e-5));
  CHECK(distortion(7, 8) == doctest::Approx(0.875));
  CHECK(distortion(8, 8) == 1.0);
  CHECK(distortion(1, 1) == 1.0);
  for (std::size_t K = 2; K < 40; ++K)
    for (std::size_t k = 1; k <= K; ++k) {
      CHECK(distortion(k, K) > 1.0 / std::numbers::e);
      if (k > 1) CHECK(distortion(k, K) > distortion(k - 1, K));
    }
}

TEST_CASE("config validation and mode names") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate(100));
  cfg.mode = SubproblemMode::bnb_exact;
  CHECK_NOTHROW(cfg.validate(24));
  CHECK_THROWS_AS(cfg.validate(25), ConfigError);
  cfg.mode = SubproblemMode::bnb_timed;
  cfg.time_limit_seconds = 0;
  CHECK_THROWS_AS(cfg.validate(10), ConfigError);
  cfg = {};
  cfg.ds_restarts = 0;
  CHECK_THROWS_AS(cfg.validate(10), ConfigError);
  for (auto m : {SubproblemMode::local_search, SubproblemMode::bnb_exact, SubproblemMode::bnb_timed})
    CHECK(subproblem_mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(subproblem_mode_from_string("fast"), ConfigError);
}

TEST_CASE("all-negative labels give the empty set") {
  std::mt19937_64 rng(1);
  auto dn = testing::random_dense(40, 6, rng, 0.5, 0.0);
  auto result = train(dn.data, config(0.1, 0.5, 4));
  CHECK(result.rules.empty());
  CHECK(result.report.final_profit == 0.0);
  for (const auto& rec : result.report.greedy) CHECK_FALSE(rec.inserted);
}

TEST_CASE("greedy report is consistent with the final rule set") {
  BinaryDataset data = random_binary_dataset(300, 20, 2);
  TrainConfig cfg = config(0.1, 0.5, 6);
  cfg.refine = false;
  auto result = distorted_greedy(data, cfg);
  REQUIRE(result.report.greedy.size() == 6);
  CHECK(result.rules.size() <= 6);
  std::size_t inserted = 0;
  for (const auto& rec : result.report.greedy) {
    CHECK(rec.alpha == doctest::Approx(distortion(rec.k, 6)));
    inserted += rec.inserted;
    if (rec.inserted) CHECK(rec.value > 0);
  }
  CHECK(inserted == result.rules.size());
  CHECK(result.report.greedy.back().profit_after == doctest::Approx(profit(result.rules, data, cfg.hyperparams)));
  CHECK(result.report.final_profit == doctest::Approx(profit(result.rules, data, cfg.hyperparams)));
  // recompute each step's value from the rules inserted so far
  RuleSet s(data.sample_count());
  for (const auto& rec : result.report.greedy) {
    auto inst = build_instance(s, data, cfg.hyperparams, rec.alpha);
    CHECK(inst.value(rec.rule) == doctest::Approx(rec.value));
    if (rec.inserted) s.insert(Rule(rec.rule, data));
    CHECK(profit(s, data, cfg.hyperparams) == doctest::Approx(rec.profit_after));
  }
}

TEST_CASE("exact greedy meets the approximation guarantee on tiny instances") {
  std::mt19937_64 rng(3);
  const double c = 1.0 - 1.0 / std::numbers::e;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 2 + rng() % 4;
    auto dn = testing::random_dense(10 + rng() % 30, d, rng, 0.6);
    TrainConfig cfg = config(0.2 * (trial % 3), 0.1 * (trial % 5), 1 + trial % 2);
    cfg.mode = SubproblemMode::bnb_exact;
    cfg.refine = false;
    auto result = train(dn.data, cfg);
    auto opt = brute_force_ruleset_opt(dn.data, cfg.hyperparams, cfg.hyperparams.max_rules);
    const double g_opt = revenue(opt.rules, dn.data, cfg.hyperparams);
    const double c_opt = g_opt - opt.profit;
    CHECK(result.report.all_subproblems_optimal);
    CHECK(profit(result.rules, dn.data, cfg.hyperparams) >= c * g_opt - c_opt - 1e-9);
  }
}

TEST_CASE("refine never lowers V and keeps at most K rules") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 15; ++trial) {
    BinaryDataset data = random_binary_dataset(200, 16, 100 + trial, 0.5, 3, 0.1);
    TrainConfig cfg = config(0.1, 0.2 + 0.3 * (trial % 4), 3 + trial % 4);
    cfg.refine = false;
    auto greedy = distorted_greedy(data, cfg);
    // also start from a deliberately poor set
    std::vector<std::vector<FeatureIndex>> poor;
    for (int r = 0; r < 2; ++r) {
      auto f = testing::random_subset(16, rng, 0.15);
      if (std::find(poor.begin(), poor.end(), f) == poor.end()) poor.push_back(f);
    }
    for (const RuleSet& start : {greedy.rules, make_rule_set(data, poor)}) {
      TrainReport report;
      RuleSet refined = refine(start, data, cfg, &report);
      CHECK(profit(refined, data, cfg.hyperparams) >= profit(start, data, cfg.hyperparams) - 1e-12);
      CHECK(refined.size() <= cfg.hyperparams.max_rules);
      CHECK_FALSE(report.refine_cap_hit);
      // a second refine is a fixed point
      CHECK(refine(refined, data, cfg).same_rules(refined));
    }
  }
}

TEST_CASE("refine drops a shadowed rule") {
  auto data = binarize(tic_tac_toe_table(), tic_tac_toe_schema()).data;
  auto lines = testing::win_lines(data);
  // top row plus a stricter copy of it: fully shadowed, positive cost
  auto shadow = lines[0];
  shadow.push_back(*data.find_feature("middle-middle = o"));
  // listed first, so it is judged against all eight lines
  std::vector<std::vector<FeatureIndex>> rules{shadow};
  rules.insert(rules.end(), lines.begin(), lines.end());
  TrainConfig cfg = config(0.1, 0.1, 9);
  cfg.mode = SubproblemMode::bnb_timed;
  cfg.time_limit_seconds = 5;
  RuleSet start = make_rule_set(data, rules);
  RuleSet refined = refine(start, data, cfg);
  CHECK(profit(refined, data, cfg.hyperparams) > profit(start, data, cfg.hyperparams));
  CHECK_FALSE(refined.contains(Rule(shadow, data)));
}

TEST_CASE("refine grows an undersized set") {
  // two disjoint clusters of positives
  std::vector<std::vector<std::uint8_t>> rows;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 60; ++i) {
    const int group = i % 3;
    rows.push_back({static_cast<std::uint8_t>(group == 0), static_cast<std::uint8_t>(group == 1),
                    static_cast<std::uint8_t>(i % 2)});
    y.push_back(group != 2);
  }
  auto data = BinaryDataset::from_rows(rows, y);
  TrainConfig cfg = config(0.1, 0.5, 2);
  RuleSet start = make_rule_set(data, {{0}});
  RuleSet refined = refine(start, data, cfg);
  CHECK(refined.size() == 2);
  CHECK(refined.contains(Rule({1}, data)));
  CHECK(compute_metrics(refined, data).accuracy == 1.0);
}

TEST_CASE("predict") {
  auto data = binarize(tic_tac_toe_table(), tic_tac_toe_schema()).data;
  auto lines = testing::win_lines(data);
  RuleSet s = make_rule_set(data, lines);
  std::vector<std::uint8_t> x(data.feature_count(), 0);
  for (const char* cell : {"top-left", "top-middle", "top-right"})
    x[*data.find_feature(std::string(cell) + " = x")] = 1;
  CHECK(predict(s, data.feature_count(), x));
  x.assign(data.feature_count(), 0);
  CHECK_FALSE(predict(s, data.feature_count(), x));
  CHECK_FALSE(predict(RuleSet(data.sample_count()), data.feature_count(), x));
  std::vector<std::uint8_t> ones(data.feature_count(), 1);
  CHECK(predict(s, data.feature_count(), ones));
  CHECK_FALSE(predict(RuleSet(data.sample_count()), data.feature_count(), ones));
  std::vector<std::uint8_t> short_x(5, 1);
  CHECK_THROWS_AS(predict(s, data.feature_count(), short_x), DataError);
  BitVector all = predict(lines, data);
  CHECK(all == data.labels());
}

TEST_CASE("training is deterministic") {
  BinaryDataset data = random_binary_dataset(400, 30, 9);
  TrainConfig cfg = config(0.1, 0.5, 5);
  cfg.seed = 42;
  cfg.ds_restarts = 2;
  auto a = train(data, cfg);
  auto b = train(data, cfg);
  REQUIRE(a.rules.size() == b.rules.size());
  for (std::size_t k = 0; k < a.rules.size(); ++k) CHECK(a.rules[k] == b.rules[k]);
  REQUIRE(a.report.greedy.size() == b.report.greedy.size());
  for (std::size_t k = 0; k < a.report.greedy.size(); ++k) {
    CHECK(a.report.greedy[k].rule == b.report.greedy[k].rule);
    CHECK(a.report.greedy[k].value == b.report.greedy[k].value);
  }
  cfg.exec = Exec::serial;
  auto c = train(data, cfg);
  CHECK(c.rules.same_rules(a.rules));
}

TEST_CASE("tic-tac-toe: exact subproblems recover the eight win lines") {
  auto data = binarize(tic_tac_toe_table(), tic_tac_toe_schema()).data;
  TrainConfig cfg = config(0.1, 0.1, 8);
  cfg.mode = SubproblemMode::bnb_timed;
  cfg.time_limit_seconds = 30;
  auto result = train(data, cfg);
  CHECK(result.rules.same_rules(make_rule_set(data, testing::win_lines(data))));
  CHECK(result.report.train_metrics.accuracy == 1.0);
}
