#include "rulekit/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rulekit/error.hpp"

namespace rulekit {

void Hyperparams::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(beta0) || !finite_nonneg(beta1) || !finite_nonneg(beta2) || !finite_nonneg(lambda))
    throw ConfigError("beta0, beta1, beta2 and lambda must be finite and nonnegative");
  if (max_rules < 1) throw ConfigError("K (max rules) must be at least 1");
  if (active_set_size < 1) throw ConfigError("M (active set size) must be at least 1");
  if (!(beta1 > (std::numbers::e - 1.0) * beta2))
    throw ConfigError("invalid hyperparameters: requires beta1 > (e-1)*beta2 (beta1=" + format_number(beta1) +
                      ", beta2=" + format_number(beta2) + ")");
}

bool Hyperparams::valid() const {
  try {
    validate();
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

Hyperparams Hyperparams::preset(std::string_view name, double lambda, double eta) {
  Hyperparams h;
  h.beta0 = 1.0;
  h.beta1 = 1.0;
  if (name == "penalized-01") {
    h.beta2 = 0.0;
    h.lambda = lambda;
  } else if (name == "overlap-eta") {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("overlap-eta preset requires 0 <= eta <= 1");
    h.beta2 = eta;
    h.lambda = 0.0;
  } else if (name == "hamming") {
    h.beta2 = 0.0;
    h.lambda = 0.0;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return h;
}

// ---------------------------------------------------------------------------

Rule::Rule(std::vector<FeatureIndex> features, const BinaryDataset& data) : features_(std::move(features)) {
  std::sort(features_.begin(), features_.end());
  if (std::adjacent_find(features_.begin(), features_.end()) != features_.end())
    throw DataError("rule contains a duplicate feature");
  if (!features_.empty() && features_.back() >= data.feature_count())
    throw DataError("rule feature index " + std::to_string(features_.back()) + " out of range");
  coverage_ = data.cover(features_);
}

Rule::Rule(std::vector<FeatureIndex> features, BitVector coverage)
    : features_(std::move(features)), coverage_(std::move(coverage)) {}

bool Rule::contains(FeatureIndex j) const { return std::binary_search(features_.begin(), features_.end(), j); }

RuleSet::RuleSet(std::size_t sample_count) : cover_count_(sample_count, 0), covered_(sample_count) {}

bool RuleSet::insert(Rule rule, std::size_t position) {
  if (rule.coverage().size() != sample_count()) throw DataError("rule coverage length differs from rule set");
  if (contains(rule)) return false;
  rule.coverage().for_each_set([&](std::size_t i) { ++cover_count_[i]; });
  covered_ |= rule.coverage();
  rules_.insert(rules_.begin() + static_cast<std::ptrdiff_t>(std::min(position, rules_.size())), std::move(rule));
  return true;
}

void RuleSet::erase(std::size_t k) {
  rules_[k].coverage().for_each_set([&](std::size_t i) {
    if (--cover_count_[i] == 0) covered_.reset(i);
  });
  rules_.erase(rules_.begin() + static_cast<std::ptrdiff_t>(k));
}

bool RuleSet::contains(const Rule& rule) const { return std::find(rules_.begin(), rules_.end(), rule) != rules_.end(); }

std::size_t RuleSet::literal_count() const {
  std::size_t n = 0;
  for (const auto& r : rules_) n += r.size();
  return n;
}

bool RuleSet::same_rules(const RuleSet& other) const {
  if (size() != other.size()) return false;
  return std::all_of(rules_.begin(), rules_.end(), [&](const Rule& r) { return other.contains(r); });
}

RuleSet make_rule_set(const BinaryDataset& data, const std::vector<std::vector<FeatureIndex>>& rules) {
  RuleSet s(data.sample_count());
  for (const auto& r : rules) s.insert(Rule(r, data));
  return s;
}

// ---------------------------------------------------------------------------

double revenue(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h) {
  return (h.beta1 + h.beta2) * static_cast<double>(count_and(rules.covered(), data.positives()));
}

double rule_cost(const Rule& rule, const BinaryDataset& data, const Hyperparams& h) {
  return h.beta0 * static_cast<double>(count_and(rule.coverage(), data.negatives())) +
         h.beta2 * static_cast<double>(count_and(rule.coverage(), data.positives())) +
         h.lambda * static_cast<double>(rule.size());
}

double marginal_revenue(const Rule& rule, const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h) {
  BitVector fresh = rule.coverage() & data.positives();
  fresh.and_not(rules.covered());
  return (h.beta1 + h.beta2) * static_cast<double>(fresh.count());
}

double profit(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h) {
  double v = revenue(rules, data, h);
  for (const auto& r : rules.rules()) v -= rule_cost(r, data, h);
  return v;
}

double loss(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h) {
  const double pos = static_cast<double>(data.positives().count());
  double l = h.beta1 * pos - revenue(rules, data, h);
  for (const auto& r : rules.rules()) l += rule_cost(r, data, h);
  return l;
}

double loss_per_sample(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h) {
  double l = 0.0;
  const auto counts = rules.cover_count();
  for (std::size_t i = 0; i < data.sample_count(); ++i) {
    const double yhat = counts[i];
    if (!data.label(i))
      l += h.beta0 * yhat;
    else if (yhat <= 1.0)
      l += h.beta1 * (1.0 - yhat);
    else
      l += h.beta2 * (yhat - 1.0);
  }
  return l + h.lambda * static_cast<double>(rules.literal_count());
}

Metrics compute_metrics(std::span<const Rule> rules, const BinaryDataset& data) {
  const std::size_t n = data.sample_count();
  std::vector<std::uint32_t> counts(n, 0);
  Metrics m;
  m.n_rules = rules.size();
  for (const auto& r : rules) {
    m.n_literals += r.size();
    r.coverage().for_each_set([&](std::size_t i) { ++counts[i]; });
  }
  std::size_t correct = 0, overlapped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if ((counts[i] >= 1) == data.label(i)) ++correct;
    if (counts[i] > 1) ++overlapped;
  }
  if (n > 0) {
    m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    m.overlap = static_cast<double>(overlapped) / static_cast<double>(n);
  }
  return m;
}

Metrics compute_metrics(const RuleSet& rules, const BinaryDataset& data) {
  // Rules in a set were built against the training split; rebuild coverage here.
  std::vector<Rule> rebuilt;
  rebuilt.reserve(rules.size());
  for (const auto& r : rules.rules()) rebuilt.emplace_back(r.feature_vector(), data);
  return compute_metrics(rebuilt, data);
}

}  // namespace rulekit
