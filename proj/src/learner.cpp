#include "rulekit/learner.hpp"

#include <chrono>
#include <cmath>

#include "rulekit/error.hpp"
#include "rulekit/exact_oracle.hpp"

namespace rulekit {

std::string_view to_string(SubproblemMode mode) {
  switch (mode) {
    case SubproblemMode::local_search: return "local";
    case SubproblemMode::bnb_exact: return "bnb";
    case SubproblemMode::bnb_timed: return "bnb-timed";
  }
  return "?";
}

SubproblemMode subproblem_mode_from_string(std::string_view text) {
  if (text == "local" || text == "local-search") return SubproblemMode::local_search;
  if (text == "bnb" || text == "bnb-exact") return SubproblemMode::bnb_exact;
  if (text == "bnb-timed") return SubproblemMode::bnb_timed;
  throw ConfigError("unknown subproblem mode '" + std::string(text) + "' (expected local, bnb or bnb-timed)");
}

void TrainConfig::validate(std::size_t feature_count) const {
  hyperparams.validate();
  if (ds_restarts < 1) throw ConfigError("ds_restarts must be at least 1");
  if (mode == SubproblemMode::bnb_exact && feature_count > exact_feature_cap)
    throw ConfigError("exact branch and bound is limited to d <= " + std::to_string(exact_feature_cap) + " (d = " +
                      std::to_string(feature_count) + "); use bnb-timed or raise the cap");
  if (mode == SubproblemMode::bnb_timed && !(time_limit_seconds > 0))
    throw ConfigError("bnb-timed needs a positive time limit");
}

SolverOptions TrainConfig::solver_options() const {
  SolverOptions opts;
  opts.active_set_size = hyperparams.active_set_size;
  opts.seed = seed;
  opts.ds_restarts = ds_restarts;
  opts.exec = exec;
  return opts;
}

double distortion(std::size_t k, std::size_t max_rules) {
  if (max_rules <= 1) return 1.0;
  const double base = 1.0 - 1.0 / static_cast<double>(max_rules);
  return std::pow(base, static_cast<double>(max_rules - k));
}

SubproblemSolution solve_subproblem(const SubproblemInstance& inst, const TrainConfig& cfg) {
  std::vector<FeatureIndex> all(inst.feature_count());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<FeatureIndex>(j);
  switch (cfg.mode) {
    case SubproblemMode::local_search: {
      Rule r = local_combinatorial_search(inst, cfg.solver_options());
      const double v = inst.value(r);
      // With d <= M the first exact active-set search already covers the whole space.
      return {std::move(r), v, inst.feature_count() <= cfg.hyperparams.active_set_size};
    }
    case SubproblemMode::bnb_exact: {
      BnbResult res = bnb_max(inst, all);
      return {std::move(res.rule), res.value, res.proven_optimal};
    }
    case SubproblemMode::bnb_timed: {
      BnbResult res = bnb_max(inst, all, cfg.time_limit_seconds);
      return {std::move(res.rule), res.value, res.proven_optimal};
    }
  }
  throw ConfigError("unknown subproblem mode");
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TrainResult distorted_greedy(const BinaryDataset& data, const TrainConfig& cfg) {
  cfg.validate(data.feature_count());
  if (data.sample_count() == 0) throw DataError("cannot train on an empty dataset");
  const auto t0 = std::chrono::steady_clock::now();
  const Hyperparams& h = cfg.hyperparams;
  TrainResult out{RuleSet(data.sample_count()), {}};
  for (std::size_t k = 1; k <= h.max_rules; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.alpha = distortion(k, h.max_rules);
    const SubproblemInstance inst = build_instance(out.rules, data, h, rec.alpha);
    SubproblemSolution sol = solve_subproblem(inst, cfg);
    rec.rule = sol.rule.feature_vector();
    rec.value = sol.value;
    rec.optimal = sol.optimal;
    if (!sol.optimal) out.report.all_subproblems_optimal = false;
    if (sol.value > kImproveEpsilon) rec.inserted = out.rules.insert(std::move(sol.rule));
    rec.profit_after = profit(out.rules, data, h);
    out.report.greedy.push_back(std::move(rec));
  }
  out.report.greedy_seconds = seconds_since(t0);
  out.report.final_profit = profit(out.rules, data, h);
  out.report.train_metrics = compute_metrics(out.rules.rules(), data);
  return out;
}

RuleSet refine(RuleSet rules, const BinaryDataset& data, const TrainConfig& cfg, TrainReport* report) {
  cfg.validate(data.feature_count());
  const auto t0 = std::chrono::steady_clock::now();
  const Hyperparams& h = cfg.hyperparams;
  const std::size_t cap = 10 * std::max<std::size_t>(data.feature_count(), 1);

  auto note = [&](IterationRecord rec, const SubproblemSolution& sol) {
    if (!report) return;
    if (!sol.optimal) report->all_subproblems_optimal = false;
    rec.profit_after = profit(rules, data, h);
    report->refine.push_back(std::move(rec));
  };

  std::size_t pass = 0;
  for (; pass < cap; ++pass) {
    const RuleSet snapshot = rules;

    // grow up to K rules
    while (rules.size() < h.max_rules) {
      const SubproblemInstance inst = build_instance(rules, data, h, 1.0);
      SubproblemSolution sol = solve_subproblem(inst, cfg);
      IterationRecord rec{rules.size() + 1, 1.0, sol.rule.feature_vector(), sol.value, false, 0, sol.optimal};
      if (sol.value > kImproveEpsilon) rec.inserted = rules.insert(sol.rule);
      const bool grew = rec.inserted;
      note(std::move(rec), sol);
      if (!grew) break;
    }

    // replace each rule by the best rule for the others
    const std::vector<Rule> current(rules.rules().begin(), rules.rules().end());
    for (const Rule& old : current) {
      std::size_t pos = 0;
      while (pos < rules.size() && !(rules[pos] == old)) ++pos;
      if (pos == rules.size()) continue;
      rules.erase(pos);
      const SubproblemInstance inst = build_instance(rules, data, h, 1.0);
      const double old_value = inst.value(old);
      SubproblemSolution sol = solve_subproblem(inst, cfg);
      IterationRecord rec{pos + 1, 1.0, sol.rule.feature_vector(), sol.value, false, 0, sol.optimal};
      if (sol.value > old_value + kImproveEpsilon && sol.value > 0 && rules.insert(sol.rule, pos)) {
        rec.inserted = true;
      } else if (old_value > 0) {
        rules.insert(old, pos);
        rec.rule = old.feature_vector();
        rec.value = old_value;
      }
      note(std::move(rec), sol);
    }

    if (rules.same_rules(snapshot)) break;
  }
  if (report) {
    report->refine_passes = pass + (pass < cap ? 1 : 0);
    report->refine_cap_hit = pass == cap;
    report->refine_seconds += seconds_since(t0);
    report->final_profit = profit(rules, data, h);
    report->train_metrics = compute_metrics(rules.rules(), data);
  }
  return rules;
}

TrainResult train(const BinaryDataset& data, const TrainConfig& cfg) {
  TrainResult out = distorted_greedy(data, cfg);
  if (cfg.refine) out.rules = refine(std::move(out.rules), data, cfg, &out.report);
  return out;
}

bool predict(std::span<const std::vector<FeatureIndex>> rules, std::size_t feature_count,
             std::span<const std::uint8_t> x) {
  if (x.size() != feature_count)
    throw DataError("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                    std::to_string(feature_count));
  for (const auto& r : rules) {
    bool covered = true;
    for (FeatureIndex j : r) {
      if (j >= x.size()) throw DataError("rule feature out of range");
      if (!x[j]) {
        covered = false;
        break;
      }
    }
    if (covered) return true;
  }
  return false;
}

bool predict(const RuleSet& rules, std::size_t feature_count, std::span<const std::uint8_t> x) {
  std::vector<std::vector<FeatureIndex>> plain;
  plain.reserve(rules.size());
  for (const auto& r : rules.rules()) plain.push_back(r.feature_vector());
  return predict(plain, feature_count, x);
}

BitVector predict(std::span<const std::vector<FeatureIndex>> rules, const BinaryDataset& data) {
  BitVector out(data.sample_count());
  for (const auto& r : rules) out |= data.cover(r);
  return out;
}

}  // namespace rulekit
