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

// Utilitarian-voting mechanisms with selective verification.
//
// Each mechanism samples an outcome together with a short tuple of agents
// whose valuations "support" it, asks the verification oracle about exactly
// those agents, and reacts to caught liars: Power and Exponential exclude
// them and start over on the remaining agents, Partial Power switches to a
// correction action (bottom) that verifies everyone and redraws so that the
// unconditional law equals the rule evaluated on the truthful agents.
//
// The oracle is queried at most once per distinct agent in a run;
// `oracle_calls` equals `verified.size()`.

#ifndef SELVER_MECHANISMS_H_
#define SELVER_MECHANISMS_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "selver/allocations.h"
#include "selver/core.h"

namespace selver {

struct MechanismResult {
  // Selected outcome; std::nullopt is the null outcome.
  std::optional<std::size_t> outcome;
  // Partial Power only: the outcome was drawn by the bottom correction.
  bool bot_resolved = false;
  // Distinct stable ids queried, in query order.
  std::vector<std::size_t> verified;
  // Subset of `verified` for which the oracle answered "liar".
  std::vector<std::size_t> liars_caught;
  std::size_t recursion_depth = 0;
  std::size_t oracle_calls = 0;
  // Calls made while resolving bottom (every agent is verified there).
  std::size_t bot_calls = 0;

  bool is_null() const { return !outcome.has_value(); }
  bool operator==(const MechanismResult&) const = default;
};

// An outcome with the tuple of (stable) agent ids supporting it.
struct SampledTerm {
  std::size_t outcome = 0;
  std::vector<std::size_t> tuple;
};

// Draws (j, t) with probability x_{t_1}(j)...x_{t_l}(j) / |w^l| over the
// reported valuations: j proportional to w_j^l, then each position of t
// independently proportional to x_i(j) / w_j. For l = 0 the tuple is empty
// and j is uniform. Throws std::domain_error if sum_j w_j^l = 0.
SampledTerm sample_power_term(const ValuationProfile& profile, int l,
                              RngStream& rng);

// Power mechanism. On truthful input the outcome follows power_allocation(w,
// l) and at most l distinct agents are verified. Degenerate profiles (all
// reported weights zero) return a uniform outcome without verification.
MechanismResult run_power(const ValuationProfile& profile,
                          VerificationOracle& oracle, int l, RngStream& rng);

struct ExponentialTerm {
  std::size_t outcome = 0;
  std::size_t length = 0;  // tuple length l ~ Poisson(w_j / alpha)
  std::vector<std::size_t> tuple;
};

// Draws j proportional to exp(w_j / alpha), then l ~ Poisson(w_j / alpha) and
// the tuple positions proportional to x_i(j) / w_j.
ExponentialTerm sample_exponential_term(const ValuationProfile& profile,
                                        double alpha, RngStream& rng);

// Exponential mechanism; same exclusion recursion as run_power.
MechanismResult run_exponential(const ValuationProfile& profile,
                                VerificationOracle& oracle, double alpha,
                                RngStream& rng);

// Distribution used by Partial Power's bottom action, plus the intermediate
// quantities it is derived from.
struct BotProbabilities {
  std::vector<double> p;  // per-outcome correction probabilities
  double p_null = 0.0;    // 1 - sum p
  double rho = 0.0;       // |w_T^{l+1}| / |w^{l+1}|
  std::vector<double> pr_outcome_no_bot;  // Pr[outcome j and no bottom]
  double pr_null_no_bot = 0.0;            // Pr[null and no bottom]
  double pr_bot = 0.0;
};

// Correction probabilities p_j = (f_j(w_T) - Pr[j, no bottom]) / Pr[bottom]
// for the reported weights `w_full` and the truthful agents' weights `w_T`.
// Requires w_T <= w_full componentwise and w_T != w_full; throws
// std::domain_error when bottom is unreachable.
BotProbabilities bot_probabilities(const WeightVector& w_full,
                                   const WeightVector& w_truthful, int l,
                                   int r);

// Partial Power mechanism.
//   Stage A: r independent tuples of length l+1, each drawn proportionally to
//            sum_j x_{t_1}(j)...x_{t_{l+1}}(j); all their agents are verified
//            and any liar triggers bottom.
//   Stage B: null with probability 1 - |f(w)|; otherwise a Power term of
//            length l, verified, liar -> bottom; else its outcome.
//   Bottom:  verify every agent, compute w_T and draw from
//            bot_probabilities(w, w_T, l, r).
// A profile whose reported weights are all zero returns null.
MechanismResult run_partial_power(const ValuationProfile& profile,
                                  VerificationOracle& oracle, int l, int r,
                                  RngStream& rng);

// Dispatch on a rule. Uniform verifies nobody.
MechanismResult run_rule_mechanism(const RuleSpec& spec,
                                   const ValuationProfile& profile,
                                   VerificationOracle& oracle, RngStream& rng);

}  // namespace selver

#endif  // SELVER_MECHANISMS_H_
