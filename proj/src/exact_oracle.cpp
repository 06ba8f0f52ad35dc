#include "rulekit/exact_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "rulekit/error.hpp"
#include "rulekit/subproblem.hpp"

namespace rulekit {

double bnb_bound(const SubproblemInstance& inst, const BitVector& coverage, std::size_t literals) {
  return inst.covered_positive_weight(coverage) - inst.lambda() * static_cast<double>(literals);
}

namespace {

std::uint64_t hash_words(const BitVector& v) {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto w : v.words()) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

class BranchAndBound {
 public:
  using Clock = std::chrono::steady_clock;

  BranchAndBound(const SubproblemInstance& inst, std::span<const FeatureIndex> candidates,
                 std::optional<double> time_limit, BnbTrace* trace)
      : inst_(inst), data_(inst.data()), trace_(trace) {
    order_.assign(candidates.begin(), candidates.end());
    std::sort(order_.begin(), order_.end());
    order_.erase(std::unique(order_.begin(), order_.end()), order_.end());
    for (FeatureIndex j : order_)
      if (j >= data_.feature_count()) throw DataError("candidate feature out of range");
    // Branch on features that exclude the most negative weight first.
    std::vector<double> u_single(order_.size());
    const BitVector all = BitVector::ones(data_.sample_count());
    for (std::size_t t = 0; t < order_.size(); ++t) u_single[t] = inst_.excluded_weight(all & data_.column(order_[t])).u;
    std::vector<std::size_t> idx(order_.size());
    for (std::size_t t = 0; t < idx.size(); ++t) idx[t] = t;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return u_single[a] > u_single[b]; });
    std::vector<FeatureIndex> sorted(order_.size());
    for (std::size_t t = 0; t < idx.size(); ++t) sorted[t] = order_[idx[t]];
    order_ = std::move(sorted);
    if (time_limit) deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                                   std::chrono::duration<double>(*time_limit));
  }

  BnbResult run() {
    BitVector root = BitVector::ones(data_.sample_count());
    best_value_ = inst_.value(root, 0);
    best_cover_ = root;
    if (trace_) trace_->incumbents.push_back(best_value_);
    nodes_ = 1;
    search(root, 0);
    std::sort(best_.begin(), best_.end());
    BnbResult result{Rule(best_, best_cover_), best_value_, !timed_out_, nodes_};
    return result;
  }

 private:
  struct Child {
    std::size_t position;
    double value;
    double bound;
    BitVector cover;
  };

  bool out_of_time() {
    if (timed_out_) return true;
    if (deadline_ && (nodes_ & 0xFF) == 0 && Clock::now() >= *deadline_) timed_out_ = true;
    return timed_out_;
  }

  void search(const BitVector& cover, std::size_t start) {
    const std::size_t depth = chosen_.size() + 1;
    const double lambda = inst_.lambda();
    std::vector<Child> children;
    std::unordered_multimap<std::uint64_t, std::size_t> seen;
    for (std::size_t t = start; t < order_.size(); ++t) {
      BitVector next = cover & data_.column(order_[t]);
      // Same coverage as the parent: every extension is dominated by one without this feature.
      if (next == cover) continue;
      const double bound = inst_.covered_positive_weight(next) - lambda * static_cast<double>(depth);
      const double value = inst_.value(next, depth);
      if (value > best_value_) update_incumbent(order_[t], next, value);
      if (bound <= best_value_ + kImproveEpsilon) continue;
      // Same coverage as an earlier sibling: its subtree holds an equal-valued copy of ours.
      const std::uint64_t h = hash_words(next);
      auto [lo, hi] = seen.equal_range(h);
      bool duplicate = false;
      for (auto it = lo; it != hi && !duplicate; ++it) duplicate = children[it->second].cover == next;
      if (duplicate) continue;
      seen.emplace(h, children.size());
      children.push_back({t, value, bound, std::move(next)});
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) { return a.value > b.value; });
    for (const Child& child : children) {
      if (child.bound <= best_value_ + kImproveEpsilon) continue;
      ++nodes_;
      if (out_of_time()) return;
      chosen_.push_back(order_[child.position]);
      search(child.cover, child.position + 1);
      chosen_.pop_back();
      if (timed_out_) return;
    }
  }

  void update_incumbent(FeatureIndex last, const BitVector& cover, double value) {
    best_value_ = value;
    best_ = chosen_;
    best_.push_back(last);
    best_cover_ = cover;
    if (trace_) trace_->incumbents.push_back(value);
  }

  const SubproblemInstance& inst_;
  const BinaryDataset& data_;
  BnbTrace* trace_;
  std::vector<FeatureIndex> order_;
  std::vector<FeatureIndex> chosen_;
  std::vector<FeatureIndex> best_;
  BitVector best_cover_;
  double best_value_ = 0;
  std::size_t nodes_ = 0;
  std::optional<Clock::time_point> deadline_;
  bool timed_out_ = false;
};

}  // namespace

BnbResult bnb_max(const SubproblemInstance& inst, std::span<const FeatureIndex> candidates,
                  std::optional<double> time_limit_seconds, BnbTrace* trace) {
  return BranchAndBound(inst, candidates, time_limit_seconds, trace).run();
}

BnbResult enumerate_best_subset(const SubproblemInstance& inst, std::span<const FeatureIndex> candidates) {
  const std::size_t m = candidates.size();
  if (m > 24) throw ConfigError("enumeration limited to 24 candidates");
  const auto& data = inst.data();
  std::vector<FeatureIndex> best;
  BitVector best_cover = BitVector::ones(data.sample_count());
  double best_value = inst.value(best_cover, 0);
  std::size_t visited = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<FeatureIndex> rule;
    for (std::size_t t = 0; t < m; ++t)
      if ((mask >> t) & 1U) rule.push_back(candidates[t]);
    BitVector cover = data.cover(rule);
    const double v = inst.value(cover, rule.size());
    ++visited;
    if (v > best_value) {
      best_value = v;
      best = std::move(rule);
      best_cover = std::move(cover);
    }
  }
  std::sort(best.begin(), best.end());
  return {Rule(std::move(best), std::move(best_cover)), best_value, true, visited + 1};
}

RuleSetOptimum brute_force_ruleset_opt(const BinaryDataset& data, const Hyperparams& h, std::size_t max_rules,
                                       std::size_t max_combinations) {
  const std::size_t d = data.feature_count();
  if (d > 20) throw ConfigError("brute-force rule-set search needs d <= 20");
  const std::size_t rule_count = std::size_t{1} << d;
  // Number of rule sets with at most K rules.
  double combos = 1, term = 1;
  for (std::size_t k = 1; k <= max_rules && k <= rule_count; ++k) {
    term = term * static_cast<double>(rule_count - k + 1) / static_cast<double>(k);
    combos += term;
  }
  if (combos > static_cast<double>(max_combinations))
    throw ConfigError("instance too large for brute-force rule-set search");

  std::vector<Rule> rules;
  std::vector<double> cost;
  std::vector<BitVector> pos_cover;
  rules.reserve(rule_count);
  for (std::size_t mask = 0; mask < rule_count; ++mask) {
    std::vector<FeatureIndex> f;
    for (std::size_t j = 0; j < d; ++j)
      if ((mask >> j) & 1U) f.push_back(static_cast<FeatureIndex>(j));
    rules.emplace_back(std::move(f), data);
    cost.push_back(rule_cost(rules.back(), data, h));
    pos_cover.push_back(rules.back().coverage() & data.positives());
  }

  const double unit = h.beta1 + h.beta2;
  std::vector<std::size_t> pick, best_pick;
  double best = 0;  // empty set
  auto dfs = [&](auto&& self, std::size_t next, const BitVector& covered, double cost_sum) -> void {
    if (pick.size() == max_rules) return;
    for (std::size_t r = next; r < rule_count; ++r) {
      BitVector c = covered | pos_cover[r];
      const double total_cost = cost_sum + cost[r];
      const double v = unit * static_cast<double>(c.count()) - total_cost;
      pick.push_back(r);
      if (v > best) {
        best = v;
        best_pick = pick;
      }
      self(self, r + 1, c, total_cost);
      pick.pop_back();
    }
  };
  dfs(dfs, 0, BitVector(data.sample_count()), 0.0);

  RuleSetOptimum out{RuleSet(data.sample_count()), best};
  for (std::size_t r : best_pick) out.rules.insert(rules[r]);
  return out;
}

}  // namespace rulekit
