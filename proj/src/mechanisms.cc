// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "selver/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selver {
namespace {

double MaxEntry(const WeightVector& w) {
  double mx = 0.0;
  for (double v : w) mx = std::max(mx, v);
  return mx;
}

// Draws rows of `profile` proportionally to column `outcome` of the reported
// matrix. Built once per term so that each tuple position costs O(log n).
class ColumnSampler {
 public:
  ColumnSampler(const ValuationProfile& profile, std::size_t outcome)
      : profile_(profile), cumulative_(profile.num_agents()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < profile.num_agents(); ++i) {
      acc += profile.reported()(i, outcome);
      cumulative_[i] = acc;
    }
  }

  double total() const {
    return cumulative_.empty() ? 0.0 : cumulative_.back();
  }

  std::size_t draw_id(RngStream& rng) const {
    const double target = rng.uniform() * total();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    std::size_t row = static_cast<std::size_t>(it - cumulative_.begin());
    if (row >= cumulative_.size()) {
      // Rounding put target at the very top; take the last positive row.
      row = cumulative_.size() - 1;
      while (row > 0 && cumulative_[row] == cumulative_[row - 1]) --row;
    }
    return profile_.agent_ids()[row];
  }

  std::vector<std::size_t> draw_tuple(std::size_t length,
                                      RngStream& rng) const {
    std::vector<std::size_t> tuple(length);
    for (auto& id : tuple) id = draw_id(rng);
    return tuple;
  }

 private:
  const ValuationProfile& profile_;
  std::vector<double> cumulative_;
};

// (w_j / max w)^power; all zeros if w = 0.
std::vector<double> ScaledPowers(const WeightVector& w, int power) {
  const double mx = MaxEntry(w);
  std::vector<double> out(w.size(), 0.0);
  if (mx == 0.0) return out;
  for (std::size_t j = 0; j < w.size(); ++j)
    out[j] = std::pow(w[j] / mx, power);
  return out;
}

// Per-run verification bookkeeping: each distinct agent is queried once.
class Verifier {
 public:
  Verifier(VerificationOracle& oracle, MechanismResult& result)
      : oracle_(oracle), result_(result) {}

  // Returns the ids in `tuple` that are liars (distinct, in query order).
  std::vector<std::size_t> check(const std::vector<std::size_t>& tuple,
                                 bool stop_at_first_liar = false) {
    std::vector<std::size_t> liars;
    for (std::size_t id : tuple) {
      if (!query(id)) {
        if (std::find(liars.begin(), liars.end(), id) == liars.end()) {
          liars.push_back(id);
        }
        if (stop_at_first_liar) break;
      }
    }
    return liars;
  }

  bool query(std::size_t id) {
    auto it = std::find(result_.verified.begin(), result_.verified.end(), id);
    if (it != result_.verified.end()) {
      return std::find(result_.liars_caught.begin(), result_.liars_caught.end(),
                       id) == result_.liars_caught.end();
    }
    const bool truthful = oracle_.verify(id);
    result_.verified.push_back(id);
    ++result_.oracle_calls;
    if (!truthful) result_.liars_caught.push_back(id);
    return truthful;
  }

 private:
  VerificationOracle& oracle_;
  MechanismResult& result_;
};

// Shared exclusion recursion of the Power and Exponential mechanisms.
// `draw` samples (outcome, tuple) on the current profile from a level stream.
template <typename Draw>
MechanismResult RunRecursive(const ValuationProfile& profile,
                             VerificationOracle& oracle, RngStream& rng,
                             Draw draw) {
  MechanismResult result;
  Verifier verifier(oracle, result);
  ValuationProfile current = profile;
  for (std::size_t depth = 0;; ++depth) {
    RngStream level = rng.derive(depth);
    SampledTerm term = draw(current, level);
    std::vector<std::size_t> liars = verifier.check(term.tuple);
    if (liars.empty()) {
      result.outcome = term.outcome;
      result.recursion_depth = depth;
      return result;
    }
    current = exclude_ids(current, liars);
  }
}

}  // namespace

SampledTerm sample_power_term(const ValuationProfile& profile, int l,
                              RngStream& rng) {
  if (l < 0) throw std::invalid_argument("Power needs l >= 0");
  const std::size_t m = profile.num_outcomes();
  if (m == 0) throw std::invalid_argument("profile has no outcomes");
  SampledTerm term;
  if (l == 0) {
    term.outcome = rng.uniform_index(m);
    return term;
  }
  const WeightVector w = weight_vector(profile);
  const std::vector<double> powers = ScaledPowers(w, l);
  double total = 0.0;
  for (double p : powers) total += p;
  if (!(total > 0.0)) {
    throw std::domain_error("sample_power_term: all outcome weights are zero");
  }
  term.outcome = rng.weighted_index(powers, total);
  term.tuple = ColumnSampler(profile, term.outcome).draw_tuple(l, rng);
  return term;
}

MechanismResult run_power(const ValuationProfile& profile,
                          VerificationOracle& oracle, int l, RngStream& rng) {
  if (l < 0) throw std::invalid_argument("Power needs l >= 0");
  return RunRecursive(
      profile, oracle, rng, [l](const ValuationProfile& p, RngStream& level) {
        if (l > 0 && MaxEntry(weight_vector(p)) == 0.0) {
          // Degenerate: uniform with no verification.
          return SampledTerm{level.uniform_index(p.num_outcomes()), {}};
        }
        return sample_power_term(p, l, level);
      });
}

ExponentialTerm sample_exponential_term(const ValuationProfile& profile,
                                        double alpha, RngStream& rng) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("Exponential needs alpha > 0");
  const std::size_t m = profile.num_outcomes();
  if (m == 0) throw std::invalid_argument("profile has no outcomes");
  const WeightVector w = weight_vector(profile);
  const double mx = MaxEntry(w);
  std::vector<double> weights(m);
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    weights[j] = std::exp((w[j] - mx) / alpha);
    total += weights[j];
  }
  ExponentialTerm term;
  term.outcome = rng.weighted_index(weights, total);
  const double wj = w[term.outcome];
  term.length = wj > 0.0 ? rng.poisson(wj / alpha) : 0;
  if (term.length > 0) {
    term.tuple =
        ColumnSampler(profile, term.outcome).draw_tuple(term.length, rng);
  }
  return term;
}

MechanismResult run_exponential(const ValuationProfile& profile,
                                VerificationOracle& oracle, double alpha,
                                RngStream& rng) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("Exponential needs alpha > 0");
  return RunRecursive(profile, oracle, rng,
                      [alpha](const ValuationProfile& p, RngStream& level) {
                        ExponentialTerm t =
                            sample_exponential_term(p, alpha, level);
                        return SampledTerm{t.outcome, std::move(t.tuple)};
                      });
}

BotProbabilities bot_probabilities(const WeightVector& w_full,
                                   const WeightVector& w_truthful, int l,
                                   int r) {
  if (l < 1 || r < 1) {
    throw std::invalid_argument("PartialPower needs l >= 1 and r >= 1");
  }
  const std::size_t m = w_full.size();
  if (w_truthful.size() != m || m == 0) {
    throw std::invalid_argument("bot_probabilities: dimension mismatch");
  }
  const double mx = MaxEntry(w_full);
  // Liars' share d_j = w_j - w_T(j), clipped against rounding.
  std::vector<double> u(m), ut(m), d(m);
  bool any_liar_weight = false;
  for (std::size_t j = 0; j < m; ++j) {
    const double slack = 1e-9 * std::max(1.0, w_full[j]);
    if (w_truthful[j] < 0.0 || w_truthful[j] > w_full[j] + slack) {
      throw std::invalid_argument(
          "bot_probabilities: w_T must satisfy 0 <= w_T <= w componentwise");
    }
    if (mx > 0.0) {
      u[j] = w_full[j] / mx;
      ut[j] = std::min(w_truthful[j], w_full[j]) / mx;
      d[j] = u[j] - ut[j];
    }
    if (w_truthful[j] != w_full[j]) any_liar_weight = true;
  }
  if (!any_liar_weight || mx == 0.0) {
    throw std::domain_error("no liars, bottom unreachable");
  }

  // a^k - b^k = (a - b) sum_{i<k} a^i b^{k-1-i}, avoiding cancellation.
  auto power_gap = [](double a, double b, double diff, int k) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += std::pow(a, i) * std::pow(b, k - 1 - i);
    return diff * s;
  };
  double sum_full_l1 = 0.0, gap_l1 = 0.0, sum_full_l = 0.0, gap_l = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    sum_full_l1 += std::pow(u[j], l + 1);
    gap_l1 += power_gap(u[j], ut[j], d[j], l + 1);
    sum_full_l += std::pow(u[j], l);
    gap_l += power_gap(u[j], ut[j], d[j], l);
  }
  const double one_minus_rho = std::clamp(gap_l1 / sum_full_l1, 0.0, 1.0);
  const double rho = 1.0 - one_minus_rho;
  // 1 - rho^r = (1 - rho)(1 + rho + ... + rho^{r-1}).
  double geometric = 0.0;
  for (int k = 0; k < r; ++k) geometric += std::pow(rho, k);
  const double one_minus_rho_r = one_minus_rho * geometric;
  const double rho_r = std::pow(rho, r);

  const double radius = partial_power_radius(m, l, r);
  const double norm_full = std::pow(sum_full_l1, l / (l + 1.0));

  BotProbabilities out;
  out.rho = rho;
  out.pr_outcome_no_bot.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.pr_outcome_no_bot[j] = rho_r * radius * std::pow(ut[j], l) / norm_full;
  }
  const double f_full_total = radius * sum_full_l / norm_full;
  out.pr_null_no_bot = rho_r * (1.0 - f_full_total);
  // Pr[bottom] = (1 - rho^r) + rho^r * radius * (|w^l| - |w_T^l|) / ||w^l||.
  out.pr_bot = one_minus_rho_r + rho_r * radius * gap_l / norm_full;
  if (!(out.pr_bot > 0.0)) {
    throw std::domain_error("no liars, bottom unreachable");
  }

  std::vector<double> truthful(w_truthful.begin(), w_truthful.end());
  for (double& v : truthful) v = std::max(0.0, v);
  const Allocation f_truthful = partial_power_allocation(truthful, l, r);
  out.p.resize(m);
  double sum_p = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    out.p[j] = (f_truthful.probs[j] - out.pr_outcome_no_bot[j]) / out.pr_bot;
    sum_p += out.p[j];
  }
  out.p_null = 1.0 - sum_p;
  return out;
}

MechanismResult run_partial_power(const ValuationProfile& profile,
                                  VerificationOracle& oracle, int l, int r,
                                  RngStream& rng) {
  if (l < 1 || r < 1) {
    throw std::invalid_argument("PartialPower needs l >= 1 and r >= 1");
  }
  const std::size_t m = profile.num_outcomes();
  if (m == 0) throw std::invalid_argument("profile has no outcomes");
  MechanismResult result;
  const WeightVector w = weight_vector(profile);
  if (MaxEntry(w) == 0.0) return result;  // null, nothing verified

  Verifier verifier(oracle, result);
  RngStream stage_a = rng.derive(0);
  RngStream stage_b = rng.derive(1);
  RngStream bottom = rng.derive(2);

  bool caught = false;
  {
    const std::vector<double> weights = ScaledPowers(w, l + 1);
    std::vector<std::vector<std::size_t>> tuples;
    tuples.reserve(r);
    for (int k = 0; k < r; ++k) {
      const std::size_t j = stage_a.weighted_index(weights);
      tuples.push_back(ColumnSampler(profile, j).draw_tuple(l + 1, stage_a));
    }
    for (const auto& tuple : tuples) {
      if (!verifier.check(tuple, /*stop_at_first_liar=*/true).empty()) {
        caught = true;
        break;
      }
    }
  }
  if (!caught) {
    const Allocation f = partial_power_allocation(w, l, r);
    if (stage_b.uniform() < f.null_mass) return result;  // null outcome
    SampledTerm term = sample_power_term(profile, l, stage_b);
    if (verifier.check(term.tuple, /*stop_at_first_liar=*/true).empty()) {
      result.outcome = term.outcome;
      return result;
    }
  }

  // Bottom: verify everyone, then redraw from the correction distribution.
  const std::size_t calls_before = result.oracle_calls;
  for (std::size_t id : profile.agent_ids()) verifier.query(id);
  result.bot_calls = result.oracle_calls - calls_before;
  result.bot_resolved = true;
  ValuationProfile truthful = exclude_ids(profile, result.liars_caught);
  const BotProbabilities bot =
      bot_probabilities(w, weight_vector(truthful), l, r);
  std::vector<double> weights(m + 1);
  for (std::size_t j = 0; j < m; ++j) weights[j] = std::max(0.0, bot.p[j]);
  weights[m] = std::max(0.0, bot.p_null);
  const std::size_t pick = bottom.weighted_index(weights);
  if (pick < m) result.outcome = pick;
  return result;
}

MechanismResult run_rule_mechanism(const RuleSpec& spec,
                                   const ValuationProfile& profile,
                                   VerificationOracle& oracle, RngStream& rng) {
  spec.Validate();
  switch (spec.kind) {
    case RuleKind::kUniform: {
      MechanismResult result;
      result.outcome = rng.uniform_index(profile.num_outcomes());
      return result;
    }
    case RuleKind::kPower:
      return run_power(profile, oracle, spec.power, rng);
    case RuleKind::kPartialPower:
      return run_partial_power(profile, oracle, spec.power, spec.repetitions,
                               rng);
    case RuleKind::kExponential:
      return run_exponential(profile, oracle, spec.alpha, rng);
  }
  throw std::logic_error("unhandled rule kind");
}

}  // namespace selver
