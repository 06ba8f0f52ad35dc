#include "rulekit/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "rulekit/error.hpp"
#include "rulekit/exact_oracle.hpp"

namespace rulekit {

SubproblemInstance::SubproblemInstance(const BinaryDataset& data, std::vector<double> weights, double lambda,
                                       double alpha)
    : data_(&data), weights_(std::move(weights)), lambda_(lambda), alpha_(alpha) {
  const std::size_t n = data.sample_count();
  if (weights_.size() != n) throw DataError("weight vector length differs from sample count");
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) throw ConfigError("lambda must be finite and nonnegative");
  pos_samples_ = BitVector(n);
  neg_samples_ = BitVector(n);
  std::map<double, BitVector> groups;
  for (std::size_t i = 0; i < n; ++i) {
    const double wt = weights_[i];
    if (!std::isfinite(wt)) throw DataError("non-finite sample weight");
    if (wt == 0.0) continue;
    (wt > 0 ? pos_samples_ : neg_samples_).set(i);
    auto [it, fresh] = groups.try_emplace(wt, n);
    it->second.set(i);
  }
  for (auto& [wt, members] : groups) {
    weight_total_ += wt * static_cast<double>(members.count());
    classes_.push_back({wt, std::move(members)});
  }
}

double SubproblemInstance::covered_weight(const BitVector& coverage) const {
  double total = 0;
  for (const auto& cls : classes_) total += cls.weight * static_cast<double>(count_and(coverage, cls.members));
  return total;
}

double SubproblemInstance::covered_positive_weight(const BitVector& coverage) const {
  double total = 0;
  for (const auto& cls : classes_)
    if (cls.weight > 0) total += cls.weight * static_cast<double>(count_and(coverage, cls.members));
  return total;
}

ExclusionGain SubproblemInstance::excluded_weight(const BitVector& coverage) const {
  ExclusionGain g;
  for (const auto& cls : classes_) {
    const double wt = cls.weight * static_cast<double>(count_and_not(cls.members, coverage));
    if (cls.weight < 0) g.u -= wt; else g.w += wt;
  }
  return g;
}

double SubproblemInstance::value(std::span<const FeatureIndex> rule) const {
  return value(data_->cover(rule), rule.size());
}

double SubproblemInstance::u(std::span<const FeatureIndex> rule) const {
  return excluded_weight(data_->cover(rule)).u;
}

double SubproblemInstance::w(std::span<const FeatureIndex> rule) const {
  return excluded_weight(data_->cover(rule)).w + lambda_ * static_cast<double>(rule.size());
}

SubproblemInstance build_instance(const RuleSet& rules, const BinaryDataset& data, const Hyperparams& h,
                                  double alpha) {
  if (!(alpha > 1.0 / std::numbers::e && alpha <= 1.0))
    throw ConfigError("distortion factor must lie in (1/e, 1], got " + format_number(alpha));
  const double omega_plus = alpha * (h.beta1 + h.beta2) - h.beta2;
  if (!(omega_plus > 0.0))
    throw ConfigError("uncovered-positive weight is not positive; requires beta1 > (e-1)*beta2");
  const std::size_t n = data.sample_count();
  if (rules.sample_count() != n) throw DataError("rule set and dataset sample counts differ");
  std::vector<double> weights(n);
  const BitVector& covered = rules.covered();
  for (std::size_t i = 0; i < n; ++i) {
    if (!data.label(i))
      weights[i] = -h.beta0;
    else
      weights[i] = covered.test(i) ? -h.beta2 : omega_plus;
  }
  return SubproblemInstance(data, std::move(weights), h.lambda, alpha);
}

// ---------------------------------------------------------------------------

double ModularFunction::operator()(std::span<const FeatureIndex> set) const {
  double total = constant;
  for (FeatureIndex j : set) total += coefficient[j];
  return total;
}

double evaluate_part(SubmodularPart part, const SubproblemInstance& inst, std::span<const FeatureIndex> set) {
  return part == SubmodularPart::u ? inst.u(set) : inst.w(set);
}

namespace {

double pick(SubmodularPart part, const ExclusionGain& g, double lambda) {
  return part == SubmodularPart::u ? g.u : g.w + lambda;
}

std::vector<FeatureIndex> complement_of(std::span<const FeatureIndex> sorted_set, std::size_t d) {
  std::vector<FeatureIndex> rest;
  rest.reserve(d - std::min(d, sorted_set.size()));
  std::size_t k = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (k < sorted_set.size() && sorted_set[k] == j) {
      ++k;
      continue;
    }
    rest.push_back(static_cast<FeatureIndex>(j));
  }
  return rest;
}

std::vector<FeatureIndex> sorted_copy(std::span<const FeatureIndex> set) {
  std::vector<FeatureIndex> s(set.begin(), set.end());
  std::sort(s.begin(), s.end());
  return s;
}

// f(j | X \ j) for each j in X.
std::vector<double> removal_gains(SubmodularPart part, const SubproblemInstance& inst,
                                  std::span<const FeatureIndex> anchor) {
  const auto& data = inst.data();
  std::vector<double> out;
  out.reserve(anchor.size());
  std::vector<FeatureIndex> others;
  for (std::size_t a = 0; a < anchor.size(); ++a) {
    others.assign(anchor.begin(), anchor.end());
    others.erase(others.begin() + static_cast<std::ptrdiff_t>(a));
    const BitVector rest = data.cover(others);
    const FeatureIndex j = anchor[a];
    ExclusionGain g;
    kernels::exclusion_gains_serial(inst, rest, std::span(&j, 1), std::span(&g, 1));
    out.push_back(pick(part, g, inst.lambda()));
  }
  return out;
}

ModularFunction finish_upper(SubmodularPart part, const SubproblemInstance& inst, std::span<const FeatureIndex> anchor,
                             std::vector<double> coefficient) {
  ModularFunction m;
  m.constant = evaluate_part(part, inst, anchor);
  for (FeatureIndex j : anchor) m.constant -= coefficient[j];
  m.coefficient = std::move(coefficient);
  return m;
}

}  // namespace

std::vector<FeatureIndex> chain_permutation(std::span<const FeatureIndex> anchor, std::size_t d,
                                            PermutationMode mode, std::uint64_t seed) {
  std::vector<FeatureIndex> head = sorted_copy(anchor);
  std::vector<FeatureIndex> tail = complement_of(head, d);
  if (mode == PermutationMode::seeded_random) {
    std::mt19937_64 rng(seed);
    std::shuffle(head.begin(), head.end(), rng);
    std::shuffle(tail.begin(), tail.end(), rng);
  }
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

ModularFunction chain_lower_bound(SubmodularPart part, const SubproblemInstance& inst,
                                  std::span<const FeatureIndex> anchor, std::span<const FeatureIndex> permutation) {
  const auto& data = inst.data();
  const std::size_t d = data.feature_count();
  if (permutation.size() != d) throw ConfigError("chain permutation must list every feature once");
  {
    auto head = sorted_copy(permutation.first(std::min(anchor.size(), permutation.size())));
    if (head != sorted_copy(anchor)) throw ConfigError("chain permutation must start with the anchor set");
  }
  ModularFunction h;
  h.coefficient.assign(d, part == SubmodularPart::u ? 0.0 : inst.lambda());
  BitVector chain = BitVector::ones(data.sample_count());
  for (FeatureIndex j : permutation) {
    if (chain.none()) break;  // later gains are 0 (u) or lambda (w)
    ExclusionGain g;
    kernels::exclusion_gains_serial(inst, chain, std::span(&j, 1), std::span(&g, 1));
    h.coefficient[j] = pick(part, g, inst.lambda());
    chain &= data.column(j);
  }
  return h;
}

ModularFunction upper_bound_1(SubmodularPart part, const SubproblemInstance& inst,
                              std::span<const FeatureIndex> anchor, Exec exec) {
  const auto& data = inst.data();
  const std::size_t d = data.feature_count();
  const auto x = sorted_copy(anchor);
  std::vector<double> coef(d, 0.0);
  const auto rest = complement_of(x, d);
  std::vector<ExclusionGain> gains(rest.size());
  kernels::exclusion_gains(inst, BitVector::ones(data.sample_count()), rest, gains, exec);
  for (std::size_t t = 0; t < rest.size(); ++t) coef[rest[t]] = pick(part, gains[t], inst.lambda());
  const auto removal = removal_gains(part, inst, x);
  for (std::size_t a = 0; a < x.size(); ++a) coef[x[a]] = removal[a];
  return finish_upper(part, inst, x, std::move(coef));
}

ModularFunction upper_bound_2(SubmodularPart part, const SubproblemInstance& inst,
                              std::span<const FeatureIndex> anchor, Exec exec) {
  const auto& data = inst.data();
  const std::size_t d = data.feature_count();
  const auto x = sorted_copy(anchor);
  std::vector<double> coef(d, 0.0);
  const auto rest = complement_of(x, d);
  std::vector<ExclusionGain> gains(rest.size());
  kernels::exclusion_gains(inst, data.cover(x), rest, gains, exec);
  for (std::size_t t = 0; t < rest.size(); ++t) coef[rest[t]] = pick(part, gains[t], inst.lambda());
  const auto loo = kernels::leave_one_out_cover(data, x);
  for (std::size_t a = 0; a < x.size(); ++a) {
    ExclusionGain g;
    kernels::exclusion_gains_serial(inst, loo[a], std::span(&x[a], 1), std::span(&g, 1));
    coef[x[a]] = pick(part, g, inst.lambda());
  }
  return finish_upper(part, inst, x, std::move(coef));
}

// ---------------------------------------------------------------------------

Rule ds_opt(const Rule& start, const SubproblemInstance& inst, const SolverOptions& opts, SearchLog* log) {
  const std::size_t d = inst.feature_count();
  const std::size_t cap = opts.cap_for(d);
  Rule current = start;
  double value = inst.value(current);
  if (log) log->values.push_back(value);

  std::size_t iter = 0;
  for (; iter < cap; ++iter) {
    const auto anchor = current.features();
    const ModularFunction m1 = upper_bound_1(SubmodularPart::w, inst, anchor, opts.exec);
    const ModularFunction m2 = upper_bound_2(SubmodularPart::w, inst, anchor, opts.exec);

    std::vector<std::vector<FeatureIndex>> candidates;
    const std::size_t chains = std::max<std::size_t>(opts.ds_restarts, 1);
    for (std::size_t r = 0; r < chains; ++r) {
      const auto mode = r == 0 ? opts.permutation : PermutationMode::seeded_random;
      const auto perm = chain_permutation(anchor, d, mode, opts.seed + r);
      const ModularFunction h = chain_lower_bound(SubmodularPart::u, inst, anchor, perm);
      std::vector<FeatureIndex> r1, r2;
      for (std::size_t j = 0; j < d; ++j) {
        if (h.coefficient[j] - m1.coefficient[j] > 0) r1.push_back(static_cast<FeatureIndex>(j));
        if (h.coefficient[j] - m2.coefficient[j] > 0) r2.push_back(static_cast<FeatureIndex>(j));
      }
      candidates.push_back(std::move(r1));
      candidates.push_back(std::move(r2));
    }

    const std::vector<FeatureIndex>* best = nullptr;
    BitVector best_cover;
    double best_value = -std::numeric_limits<double>::infinity();
    for (const auto& cand : candidates) {
      BitVector cover = inst.data().cover(cand);
      const double v = inst.value(cover, cand.size());
      if (v > best_value) {
        best_value = v;
        best = &cand;
        best_cover = std::move(cover);
      }
    }
    if (best == nullptr || !(best_value > value + kImproveEpsilon)) break;
    current = Rule(*best, std::move(best_cover));
    value = best_value;
    if (log) log->values.push_back(value);
  }
  if (log) {
    log->iterations += iter;
    if (iter == cap) log->cap_hit = true;
  }
  return current;
}

Rule enlarge(const Rule& rule, std::size_t target_size, const SubproblemInstance& inst, Exec exec) {
  const auto& data = inst.data();
  const std::size_t d = data.feature_count();
  std::vector<FeatureIndex> active(rule.features().begin(), rule.features().end());
  BitVector cover = rule.coverage();
  std::vector<ExclusionGain> gains;
  while (active.size() < target_size && active.size() < d) {
    const auto rest = complement_of(active, d);
    gains.resize(rest.size());
    kernels::exclusion_gains(inst, cover, rest, gains, exec);
    // Rank: +inf (w gain 0, u gain > 0) > finite ratio > -inf (both 0); ties keep lowest index.
    int best_rank = -1;
    double best_ratio = 0;
    std::size_t best_t = 0;
    for (std::size_t t = 0; t < rest.size(); ++t) {
      const double ug = gains[t].u;
      const double wg = gains[t].w + inst.lambda();
      int rank;
      double ratio = 0;
      if (wg == 0.0) {
        rank = ug > 0 ? 2 : 0;
      } else {
        rank = 1;
        ratio = ug / wg;
      }
      if (rank > best_rank || (rank == 1 && best_rank == 1 && ratio > best_ratio)) {
        best_rank = rank;
        best_ratio = ratio;
        best_t = t;
      }
    }
    const FeatureIndex j = rest[best_t];
    active.insert(std::upper_bound(active.begin(), active.end(), j), j);
    cover &= data.column(j);
  }
  return Rule(std::move(active), std::move(cover));
}

Rule best_subset(const Rule& active, const SubproblemInstance& inst) {
  return bnb_max(inst, active.features()).rule;
}

Rule swap_local_search(const Rule& start, const SubproblemInstance& inst, const SolverOptions& opts, SearchLog* log) {
  const auto& data = inst.data();
  const std::size_t d = data.feature_count();
  const std::size_t cap = opts.cap_for(d);
  const double lambda = inst.lambda();

  std::vector<FeatureIndex> rule(start.features().begin(), start.features().end());
  BitVector cover = start.coverage();
  double value = inst.value(cover, rule.size());
  if (log) log->values.push_back(value);
  auto record = [&] {
    if (log) log->values.push_back(value);
  };
  std::vector<ExclusionGain> gains;

  std::size_t iter = 0;
  for (; iter < cap; ++iter) {
    const auto before = rule;

    // add: v(j | R) > 0, first improving feature by index
    for (;;) {
      const auto rest = complement_of(rule, d);
      gains.resize(rest.size());
      kernels::exclusion_gains(inst, cover, rest, gains, opts.exec);
      std::size_t t = rest.size();
      double best_gain = kImproveEpsilon;
      for (std::size_t k = 0; k < rest.size(); ++k) {
        const double gain = gains[k].u - gains[k].w - lambda;
        if (gain > best_gain) {
          best_gain = gain;
          t = k;
          if (opts.scan == ScanOrder::first_improvement) break;
        }
      }
      if (t == rest.size()) break;
      const FeatureIndex j = rest[t];
      rule.insert(std::upper_bound(rule.begin(), rule.end(), j), j);
      cover &= data.column(j);
      value = inst.value(cover, rule.size());
      record();
    }

    // remove: v(j | R \ j) <= 0
    for (bool removed = true; removed;) {
      removed = false;
      std::size_t pick = rule.size();
      double best_v = value;
      BitVector best_c;
      for (std::size_t a = 0; a < rule.size(); ++a) {
        std::vector<FeatureIndex> others = rule;
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(a));
        BitVector c = data.cover(others);
        const double v = inst.value(c, others.size());
        if (v >= best_v && (pick == rule.size() || v > best_v)) {
          pick = a;
          best_v = v;
          best_c = std::move(c);
          if (opts.scan == ScanOrder::first_improvement) break;
        }
      }
      if (pick < rule.size()) {
        rule.erase(rule.begin() + static_cast<std::ptrdiff_t>(pick));
        cover = std::move(best_c);
        value = best_v;
        record();
        removed = true;
      }
    }

    // swap a -> b when v((R \ a) + b) > v(R)
    for (bool swapped = true; swapped;) {
      swapped = false;
      const auto rest = complement_of(rule, d);
      gains.resize(rest.size());
      std::size_t best_a = rule.size(), best_t = 0;
      double best_v = value + kImproveEpsilon;
      for (std::size_t a = 0; a < rule.size(); ++a) {
        std::vector<FeatureIndex> others = rule;
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(a));
        const BitVector c = data.cover(others);
        const double base = inst.covered_weight(c) - lambda * static_cast<double>(rule.size());
        kernels::exclusion_gains(inst, c, rest, gains, opts.exec);
        for (std::size_t t = 0; t < rest.size(); ++t) {
          const double v = base - gains[t].w + gains[t].u;
          if (v > best_v) {
            best_v = v;
            best_a = a;
            best_t = t;
            if (opts.scan == ScanOrder::first_improvement) break;
          }
        }
        if (best_a < rule.size() && opts.scan == ScanOrder::first_improvement) break;
      }
      if (best_a < rule.size()) {
        // Recompute exactly rather than trusting the incremental sum.
        std::vector<FeatureIndex> others = rule;
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(best_a));
        const FeatureIndex b = rest[best_t];
        others.insert(std::upper_bound(others.begin(), others.end(), b), b);
        BitVector next = data.cover(others);
        const double v = inst.value(next, others.size());
        if (v > value + kImproveEpsilon) {
          rule = std::move(others);
          cover = std::move(next);
          value = v;
          record();
          swapped = true;
        }
      }
    }

    if (rule == before) break;
  }
  if (log) {
    log->iterations += iter;
    if (iter == cap) log->cap_hit = true;
  }
  return Rule(std::move(rule), std::move(cover));
}

Rule local_combinatorial_search(const SubproblemInstance& inst, const SolverOptions& opts, SearchLog* log) {
  const std::size_t d = inst.feature_count();
  const std::size_t cap = opts.cap_for(d);
  const std::size_t m = opts.active_set_size;
  Rule current = Rule::empty(inst.data());
  if (log) log->values.push_back(inst.value(current));

  std::size_t iter = 0;
  for (; iter < cap; ++iter) {
    const auto before = current.feature_vector();
    Rule active = current;
    if (active.size() < m) active = enlarge(active, m, inst, opts.exec);
    if (active.size() <= m) {
      // Equal-valued optima elsewhere in the active set are not taken; the
      // outer loop would otherwise wander between ties.
      Rule best = best_subset(active, inst);
      if (inst.value(best) > inst.value(current) + kImproveEpsilon) current = std::move(best);
      if (log) log->values.push_back(inst.value(current));
    }
    current = ds_opt(current, inst, opts, log);
    current = swap_local_search(current, inst, opts, log);
    if (current.feature_vector() == before) break;
  }
  if (log) {
    log->iterations += iter;
    if (iter == cap) log->cap_hit = true;
  }
  return current;
}

}  // namespace rulekit
