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

// Closed-form allocation rules induced by the mechanisms on truthful input,
// and analytic property calculators (welfare, approximation ratio,
// participation margin, extremality over the rule's distributional range).
//
// All rules are strongly anonymous: they depend on the profile only through
// its weight vector w.

#ifndef SELVER_ALLOCATIONS_H_
#define SELVER_ALLOCATIONS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "selver/core.h"

namespace selver {

enum class RuleKind { kUniform, kPower, kPartialPower, kExponential };

struct RuleSpec {
  RuleKind kind = RuleKind::kUniform;
  int power = 0;       // exponent l (Power, PartialPower)
  int repetitions = 1; // r (PartialPower)
  double alpha = 1.0;  // temperature (Exponential)

  static RuleSpec Uniform() { return {}; }
  static RuleSpec Power(int l);
  static RuleSpec PartialPower(int l, int r);
  static RuleSpec Exponential(double alpha);

  // Throws std::invalid_argument for out-of-range parameters.
  void Validate() const;
  std::string ToString() const;
  bool operator==(const RuleSpec&) const = default;
};

// Parses "uniform", "power:3", "partial:2:4", "exp:0.5".
RuleSpec ParseRuleSpec(const std::string& text);

// probs_j = w_j^l / sum_q w_q^l. All-zero w with l >= 1 falls back to uniform.
Allocation power_allocation(const WeightVector& w, int l);

// f^(l,r)(w) = (1 - 1/r) w^l / (m^{1/(l+1)} ||w^l||_{1+1/l}); the remaining
// mass is null. The zero vector maps to the all-null allocation.
Allocation partial_power_allocation(const WeightVector& w, int l, int r);

// probs_j proportional to exp(w_j / alpha), evaluated with a max shift.
Allocation exponential_allocation(const WeightVector& w, double alpha);

Allocation evaluate_rule(const RuleSpec& spec, const WeightVector& w);

// w . probs; the null outcome contributes zero.
double expected_welfare(const WeightVector& w, const Allocation& a);

// expected_welfare / ||w||_inf. Throws std::domain_error if ||w||_inf = 0.
double approximation_ratio(const WeightVector& w, const Allocation& a);

// (x_i . f(w)) / (x_i . f(w_{-i})) with x_i the agent's true row. Returns
// +infinity when the denominator is zero.
double participation_margin(const RuleSpec& spec,
                            const ValuationProfile& profile,
                            std::size_t agent);

// Analytic lower bound on the approximation ratio for scale-invariant rules:
// 1/m (Uniform), m^{-1/(l+1)} (Power), (1-1/r) m^{-1/(l+1)} (PartialPower).
// Exponential has an additive guarantee instead, see additive_error_bound.
double approximation_bound(const RuleSpec& spec, std::size_t m);
// alpha ln m for Exponential, 0 otherwise.
double additive_error_bound(const RuleSpec& spec, std::size_t m);
// Guaranteed participation factor: 1 except m^{-1/(l+1)} for Power.
double participation_bound(const RuleSpec& spec, std::size_t m);

// p-norm of a nonnegative vector.
double p_norm(const std::vector<double>& v, double p);
// -sum z_j ln z_j over positive entries.
double entropy(const std::vector<double>& z);

struct ExtremalityReport {
  std::size_t probes = 0;
  std::size_t violations = 0;
  // Largest objective(z) - objective(f(w)) seen; <= 0 when f(w) is optimal.
  double max_gap = 0.0;
  // ||f(w)||_{1+1/l} minus the range radius (PartialPower only).
  double boundary_error = 0.0;
  std::optional<std::vector<double>> witness;
  bool pass() const { return violations == 0; }
};

// Checks that f(w) maximizes the rule's MIDR objective against random points
// of its range: for PartialPower, w.z over the ball
// Z = {z >= 0 : ||z||_{1+1/l} <= (1-1/r) m^{-1/(l+1)}} (boundary probes plus
// half-radius interior probes); for Exponential, w.z + alpha H(z) over the
// simplex. Throws std::invalid_argument for other rules.
ExtremalityReport midr_extremality_check(const RuleSpec& spec,
                                         const WeightVector& w,
                                         std::size_t probes, RngStream& rng,
                                         double tol = 1e-9);

// Radius (1 - 1/r) m^{-1/(l+1)} of the PartialPower range.
double partial_power_radius(std::size_t m, int l, int r);

}  // namespace selver

#endif  // SELVER_ALLOCATIONS_H_
