#include "rulekit/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <random>

#include <json.hpp>

#ifdef RULEKIT_HAVE_OPENMP
#include <omp.h>
#endif

#include "rulekit/error.hpp"
#include "rulekit/table.hpp"

namespace rulekit {

using nlohmann::ordered_json;

CvPlan CvPlan::make(const BitVector& labels, std::size_t n_folds, std::uint64_t seed, bool stratified) {
  const std::size_t n = labels.size();
  if (n_folds < 2) throw ConfigError("cross validation needs at least 2 folds");
  if (n < n_folds) throw DataError("fewer samples (" + std::to_string(n) + ") than folds");
  CvPlan plan;
  plan.n_folds = n_folds;
  plan.stratified = stratified;
  plan.seed = seed;
  plan.fold_of.assign(n, 0);
  std::mt19937_64 rng(seed);
  std::size_t dealt = 0;
  auto deal = [&](std::vector<std::size_t> idx) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i : idx) plan.fold_of[i] = dealt++ % n_folds;
  };
  if (stratified) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (labels.test(i) ? pos : neg).push_back(i);
    deal(std::move(pos));
    deal(std::move(neg));
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    deal(std::move(all));
  }
  return plan;
}

std::vector<std::size_t> CvPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> CvPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

namespace {

// Runs task(0..count-1) on up to `jobs` threads and rethrows the first error.
void run_jobs(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  std::exception_ptr failure;
  std::mutex mu;
#ifdef RULEKIT_HAVE_OPENMP
  const int threads = static_cast<int>(std::max<std::size_t>(1, std::min(jobs, count)));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(count); ++t) {
    try {
      task(static_cast<std::size_t>(t));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
    }
  }
#else
  (void)jobs;
  (void)mu;
  for (std::size_t t = 0; t < count; ++t) {
    try {
      task(t);
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
#endif
  if (failure) std::rethrow_exception(failure);
}

bool has_both_classes(const BinaryDataset& data) {
  const std::size_t pos = data.positives().count();
  return pos > 0 && pos < data.sample_count();
}

std::vector<std::vector<FeatureIndex>> plain_rules(const RuleSet& rules) {
  std::vector<std::vector<FeatureIndex>> out;
  for (const auto& r : rules.rules()) out.push_back(r.feature_vector());
  return out;
}

void fill_summaries(ConfigResult& cr) {
  std::vector<double> acc, nr, nl, ov;
  for (const auto& f : cr.folds) {
    if (f.skipped) continue;
    acc.push_back(f.test.accuracy);
    nr.push_back(static_cast<double>(f.test.n_rules));
    nl.push_back(static_cast<double>(f.test.n_literals));
    ov.push_back(f.test.overlap);
  }
  cr.folds_used = acc.size();
  cr.accuracy = summarize(acc);
  cr.n_rules = summarize(nr);
  cr.n_literals = summarize(nl);
  cr.overlap = summarize(ov);
}

std::size_t best_of(std::span<const ConfigResult> configs) {
  std::size_t best = configs.size();
  for (std::size_t c = 0; c < configs.size(); ++c) {
    if (configs[c].folds_used == 0) continue;
    if (best == configs.size()) {
      best = c;
      continue;
    }
    const auto& a = configs[c];
    const auto& b = configs[best];
    if (a.accuracy.mean > b.accuracy.mean + 1e-12 ||
        (std::abs(a.accuracy.mean - b.accuracy.mean) <= 1e-12 && a.n_literals.mean < b.n_literals.mean - 1e-12))
      best = c;
  }
  return best;
}

ordered_json config_json(const TrainConfig& c) {
  const Hyperparams& h = c.hyperparams;
  return {{"beta0", h.beta0},
          {"beta1", h.beta1},
          {"beta2", h.beta2},
          {"lambda", h.lambda},
          {"K", h.max_rules},
          {"M", h.active_set_size},
          {"subproblem", std::string(to_string(c.mode))},
          {"refine", c.refine}};
}

ordered_json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy}, {"n_rules", m.n_rules}, {"n_literals", m.n_literals}, {"overlap", m.overlap}};
}

ordered_json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

std::vector<std::string> config_cells(const TrainConfig& c) {
  const Hyperparams& h = c.hyperparams;
  return {format_number(h.beta0), format_number(h.beta1), format_number(h.beta2), format_number(h.lambda),
          std::to_string(h.max_rules), std::to_string(h.active_set_size), std::string(to_string(c.mode)),
          c.refine ? "1" : "0"};
}

const std::vector<std::string> kConfigHeader = {"beta0", "beta1", "beta2", "lambda", "K", "M", "subproblem", "refine"};

void append_summaries(std::vector<std::string>& row, const Summary& acc, const Summary& nr, const Summary& nl,
                      const Summary& ov) {
  for (const Summary* s : {&acc, &nr, &nl, &ov}) {
    row.push_back(format_number(s->mean));
    row.push_back(format_number(s->std));
  }
}

const std::vector<std::string> kSummaryHeader = {"accuracy_mean", "accuracy_std", "n_rules_mean",  "n_rules_std",
                                                 "n_literals_mean", "n_literals_std", "overlap_mean", "overlap_std"};

}  // namespace

std::size_t CvReport::best() const {
  const std::size_t b = best_of(configs);
  if (b == configs.size()) throw DataError("no configuration completed any fold");
  return b;
}

CvReport cross_validate(const BinaryDataset& data, std::span<const TrainConfig> grid, const CvPlan& plan,
                        std::size_t jobs) {
  if (grid.empty()) throw ConfigError("empty configuration grid");
  if (plan.n_folds < 2) throw ConfigError("cross validation needs at least 2 folds");
  if (plan.fold_of.size() != data.sample_count()) throw DataError("fold plan does not match the dataset");
  for (const auto& cfg : grid) cfg.validate(data.feature_count());

  std::vector<BinaryDataset> train_sets, test_sets;
  std::vector<bool> usable(plan.n_folds, true);
  CvReport report;
  for (std::size_t f = 0; f < plan.n_folds; ++f) {
    train_sets.push_back(data.subset(plan.train_indices(f)));
    test_sets.push_back(data.subset(plan.test_indices(f)));
    if (!has_both_classes(train_sets.back()) || test_sets.back().sample_count() == 0) {
      usable[f] = false;
      report.warnings.push_back("fold " + std::to_string(f) +
                                ": training split has a single class or the test split is empty; skipped");
    }
  }

  report.configs.resize(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    report.configs[c].config = grid[c];
    report.configs[c].folds.resize(plan.n_folds);
  }
  run_jobs(grid.size() * plan.n_folds, jobs, [&](std::size_t t) {
    const std::size_t c = t / plan.n_folds, f = t % plan.n_folds;
    FoldResult& out = report.configs[c].folds[f];
    out.fold = f;
    if (!usable[f]) {
      out.skipped = true;
      return;
    }
    const TrainResult fit = train(train_sets[f], grid[c]);
    out.rules = plain_rules(fit.rules);
    out.test = compute_metrics(fit.rules, test_sets[f]);
  });
  for (auto& cr : report.configs) fill_summaries(cr);
  return report;
}

NestedCvReport nested_cross_validate(const BinaryDataset& data, std::span<const TrainConfig> grid,
                                     const CvPlan& outer, std::size_t inner_folds, std::size_t jobs) {
  if (grid.empty()) throw ConfigError("empty configuration grid");
  NestedCvReport report;
  std::vector<double> acc, nr, nl, ov;
  for (std::size_t f = 0; f < outer.n_folds; ++f) {
    NestedFold nf;
    nf.fold = f;
    const BinaryDataset train_set = data.subset(outer.train_indices(f));
    const BinaryDataset test_set = data.subset(outer.test_indices(f));
    if (!has_both_classes(train_set) || test_set.sample_count() == 0) {
      nf.skipped = true;
      report.warnings.push_back("outer fold " + std::to_string(f) + ": unusable split; skipped");
      report.folds.push_back(std::move(nf));
      continue;
    }
    const CvPlan inner = CvPlan::make(train_set.labels(), inner_folds, outer.seed + 1000003 * (f + 1), outer.stratified);
    const CvReport inner_report = cross_validate(train_set, grid, inner, jobs);
    for (const auto& w : inner_report.warnings) report.warnings.push_back("outer fold " + std::to_string(f) + ": " + w);
    nf.selected = inner_report.best();
    nf.inner_accuracy = inner_report.configs[nf.selected].accuracy.mean;
    const TrainResult fit = train(train_set, grid[nf.selected]);
    nf.rules = plain_rules(fit.rules);
    nf.test = compute_metrics(fit.rules, test_set);
    acc.push_back(nf.test.accuracy);
    nr.push_back(static_cast<double>(nf.test.n_rules));
    nl.push_back(static_cast<double>(nf.test.n_literals));
    ov.push_back(nf.test.overlap);
    report.folds.push_back(std::move(nf));
  }
  report.accuracy = summarize(acc);
  report.n_rules = summarize(nr);
  report.n_literals = summarize(nl);
  report.overlap = summarize(ov);
  return report;
}

std::vector<TrainConfig> standard_grid(const TrainConfig& base) {
  std::vector<TrainConfig> grid;
  for (double beta2 : {0.5, 0.1, 0.01})
    for (double lambda : {0.1, 1.0, 4.0, 8.0, 16.0, 64.0})
      for (std::size_t k : {8, 16, 32}) {
        TrainConfig c = base;
        c.hyperparams.beta2 = beta2;
        c.hyperparams.lambda = lambda;
        c.hyperparams.max_rules = k;
        grid.push_back(c);
      }
  return grid;
}

GapReport relative_gap(const BinaryDataset& data, const TrainConfig& cfg, std::optional<double> bnb_time_limit) {
  using Clock = std::chrono::steady_clock;
  GapReport g;
  TrainConfig local = cfg;
  local.mode = SubproblemMode::local_search;
  TrainConfig bnb = cfg;
  if (bnb_time_limit) {
    bnb.mode = SubproblemMode::bnb_timed;
    bnb.time_limit_seconds = *bnb_time_limit;
  } else {
    bnb.mode = SubproblemMode::bnb_exact;
    bnb.exact_feature_cap = data.feature_count();
  }
  auto t0 = Clock::now();
  const TrainResult a = train(data, local);
  g.local_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  t0 = Clock::now();
  const TrainResult b = train(data, bnb);
  g.bnb_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  g.v_local = profit(a.rules, data, cfg.hyperparams);
  g.v_bnb = profit(b.rules, data, cfg.hyperparams);
  g.bnb_all_optimal = b.report.all_subproblems_optimal;
  g.local_metrics = a.report.train_metrics;
  g.bnb_metrics = b.report.train_metrics;
  if (g.v_bnb != 0.0) g.gap = (g.v_bnb - g.v_local) / g.v_bnb;
  return g;
}

// --- writers ----------------------------------------------------------------

void write_cv_csv(std::ostream& out, const CvReport& report, const std::string& dataset) {
  Table t;
  t.header = {"dataset"};
  t.header.insert(t.header.end(), kConfigHeader.begin(), kConfigHeader.end());
  t.header.push_back("folds_used");
  t.header.insert(t.header.end(), kSummaryHeader.begin(), kSummaryHeader.end());
  for (const auto& cr : report.configs) {
    std::vector<std::string> row{dataset};
    for (auto& cell : config_cells(cr.config)) row.push_back(std::move(cell));
    row.push_back(std::to_string(cr.folds_used));
    append_summaries(row, cr.accuracy, cr.n_rules, cr.n_literals, cr.overlap);
    t.rows.push_back(std::move(row));
  }
  write_csv(out, t);
}

void write_cv_json(std::ostream& out, const CvReport& report, const std::string& dataset) {
  ordered_json j;
  j["dataset"] = dataset;
  ordered_json configs = ordered_json::array();
  for (const auto& cr : report.configs) {
    ordered_json c;
    c["config"] = config_json(cr.config);
    c["folds_used"] = cr.folds_used;
    c["accuracy"] = summary_json(cr.accuracy);
    c["n_rules"] = summary_json(cr.n_rules);
    c["n_literals"] = summary_json(cr.n_literals);
    c["overlap"] = summary_json(cr.overlap);
    ordered_json folds = ordered_json::array();
    for (const auto& f : cr.folds) {
      ordered_json fj{{"fold", f.fold}, {"skipped", f.skipped}};
      if (!f.skipped) {
        fj["test"] = metrics_json(f.test);
        fj["rules"] = f.rules;
      }
      folds.push_back(std::move(fj));
    }
    c["folds"] = std::move(folds);
    configs.push_back(std::move(c));
  }
  j["configs"] = std::move(configs);
  if (!report.configs.empty()) {
    const std::size_t b = best_of(report.configs);
    if (b < report.configs.size()) j["best"] = b;
  }
  j["warnings"] = report.warnings;
  out << j.dump(2) << '\n';
}

void write_nested_csv(std::ostream& out, const NestedCvReport& report, std::span<const TrainConfig> grid,
                      const std::string& dataset) {
  Table t;
  t.header = {"dataset", "fold", "skipped"};
  t.header.insert(t.header.end(), kConfigHeader.begin(), kConfigHeader.end());
  t.header.insert(t.header.end(), {"inner_accuracy", "accuracy", "n_rules", "n_literals", "overlap"});
  for (const auto& f : report.folds) {
    std::vector<std::string> row{dataset, std::to_string(f.fold), f.skipped ? "1" : "0"};
    for (auto& cell : config_cells(grid[f.selected])) row.push_back(f.skipped ? "" : std::move(cell));
    row.push_back(format_number(f.inner_accuracy));
    row.push_back(format_number(f.test.accuracy));
    row.push_back(std::to_string(f.test.n_rules));
    row.push_back(std::to_string(f.test.n_literals));
    row.push_back(format_number(f.test.overlap));
    t.rows.push_back(std::move(row));
  }
  std::vector<std::string> summary{dataset, "mean", ""};
  summary.resize(3 + kConfigHeader.size() + 1);
  summary.push_back(format_number(report.accuracy.mean));
  summary.push_back(format_number(report.n_rules.mean));
  summary.push_back(format_number(report.n_literals.mean));
  summary.push_back(format_number(report.overlap.mean));
  t.rows.push_back(summary);
  std::vector<std::string> spread{dataset, "std", ""};
  spread.resize(3 + kConfigHeader.size() + 1);
  spread.push_back(format_number(report.accuracy.std));
  spread.push_back(format_number(report.n_rules.std));
  spread.push_back(format_number(report.n_literals.std));
  spread.push_back(format_number(report.overlap.std));
  t.rows.push_back(spread);
  write_csv(out, t);
}

void write_nested_json(std::ostream& out, const NestedCvReport& report, std::span<const TrainConfig> grid,
                       const std::string& dataset) {
  ordered_json j;
  j["dataset"] = dataset;
  ordered_json folds = ordered_json::array();
  for (const auto& f : report.folds) {
    ordered_json fj{{"fold", f.fold}, {"skipped", f.skipped}};
    if (!f.skipped) {
      fj["selected"] = f.selected;
      fj["config"] = config_json(grid[f.selected]);
      fj["inner_accuracy"] = f.inner_accuracy;
      fj["test"] = metrics_json(f.test);
      fj["rules"] = f.rules;
    }
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  j["accuracy"] = summary_json(report.accuracy);
  j["n_rules"] = summary_json(report.n_rules);
  j["n_literals"] = summary_json(report.n_literals);
  j["overlap"] = summary_json(report.overlap);
  j["warnings"] = report.warnings;
  out << j.dump(2) << '\n';
}

void write_gap_csv(std::ostream& out, const GapReport& g, const TrainConfig& cfg, const std::string& dataset) {
  Table t;
  t.header = {"dataset"};
  t.header.insert(t.header.end(), kConfigHeader.begin(), kConfigHeader.end());
  t.header.insert(t.header.end(), {"v_local", "v_bnb", "gap", "bnb_all_optimal", "local_seconds", "bnb_seconds"});
  std::vector<std::string> row{dataset};
  for (auto& cell : config_cells(cfg)) row.push_back(std::move(cell));
  row.push_back(format_number(g.v_local));
  row.push_back(format_number(g.v_bnb));
  row.push_back(g.gap ? format_number(*g.gap) : "undefined");
  row.push_back(g.bnb_all_optimal ? "1" : "0");
  row.push_back(format_number(g.local_seconds));
  row.push_back(format_number(g.bnb_seconds));
  t.rows.push_back(std::move(row));
  write_csv(out, t);
}

void write_gap_json(std::ostream& out, const GapReport& g, const TrainConfig& cfg, const std::string& dataset) {
  ordered_json j;
  j["dataset"] = dataset;
  j["config"] = config_json(cfg);
  j["v_local"] = g.v_local;
  j["v_bnb"] = g.v_bnb;
  j["gap"] = g.gap ? ordered_json(*g.gap) : ordered_json(nullptr);
  j["bnb_all_optimal"] = g.bnb_all_optimal;
  j["local_seconds"] = g.local_seconds;
  j["bnb_seconds"] = g.bnb_seconds;
  j["local_metrics"] = metrics_json(g.local_metrics);
  j["bnb_metrics"] = metrics_json(g.bnb_metrics);
  out << j.dump(2) << '\n';
}

void write_train_report_json(std::ostream& out, const TrainReport& r) {
  auto records = [](const std::vector<IterationRecord>& recs) {
    ordered_json a = ordered_json::array();
    for (const auto& rec : recs)
      a.push_back({{"k", rec.k},
                   {"alpha", rec.alpha},
                   {"rule", rec.rule},
                   {"value", rec.value},
                   {"inserted", rec.inserted},
                   {"profit_after", rec.profit_after},
                   {"optimal", rec.optimal}});
    return a;
  };
  ordered_json j;
  j["greedy"] = records(r.greedy);
  j["refine"] = records(r.refine);
  j["refine_passes"] = r.refine_passes;
  j["refine_cap_hit"] = r.refine_cap_hit;
  j["greedy_seconds"] = r.greedy_seconds;
  j["refine_seconds"] = r.refine_seconds;
  j["all_subproblems_optimal"] = r.all_subproblems_optimal;
  j["final_profit"] = r.final_profit;
  j["train_metrics"] = metrics_json(r.train_metrics);
  out << j.dump(2) << '\n';
}

}  // namespace rulekit
