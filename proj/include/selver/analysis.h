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

// Monte Carlo and analytic auditors.
//
// Trial t of a run with seed s draws from RngStream(s, t) and owns a fresh
// oracle, so results do not depend on the number of workers and reruns are
// bit-exact.

#ifndef SELVER_ANALYSIS_H_
#define SELVER_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selver/allocations.h"
#include "selver/core.h"
#include "selver/instances.h"
#include "selver/io.h"
#include "selver/mechanisms.h"

namespace selver {

// A rule's mechanism, or the leaky control: a Power(l) variant that verifies
// its tuple but returns the sampled outcome even when a liar is caught. The
// control is not robust and exists to show that the auditors have power.
struct MechanismSpec {
  RuleSpec rule;
  bool leaky = false;

  static MechanismSpec Of(const RuleSpec& rule) { return {rule, false}; }
  static MechanismSpec LeakyPower(int l) { return {RuleSpec::Power(l), true}; }
  std::string ToString() const;

  bool operator==(const MechanismSpec&) const = default;
};

// Accepts everything ParseRuleSpec does plus "leaky:<l>".
MechanismSpec ParseMechanismSpec(const std::string& text);

MechanismResult run_mechanism(const MechanismSpec& mech,
                              const ValuationProfile& profile,
                              RngStream& rng);

// One MechanismResult per trial, in trial order.
std::vector<MechanismResult> run_trials(const MechanismSpec& mech,
                                        const ValuationProfile& profile,
                                        std::size_t trials, std::uint64_t seed,
                                        std::size_t workers = 1);

struct VerificationStats {
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::size_t max = 0;
};

struct EmpiricalResult {
  // Outcome frequencies; bottom-resolved outcomes count at their index.
  Allocation frequencies;
  std::size_t trials = 0;
  VerificationStats all;       // distinct agents verified per trial
  VerificationStats truthful;  // trials that never reached bottom
  VerificationStats bottom;    // trials resolved by bottom
  std::map<std::size_t, std::size_t> liars_caught_histogram;
};

EmpiricalResult summarize(const std::vector<MechanismResult>& results,
                          std::size_t num_outcomes);

EmpiricalResult empirical_distribution(const MechanismSpec& mech,
                                       const ValuationProfile& profile,
                                       std::size_t trials, std::uint64_t seed,
                                       std::size_t workers = 1);

enum class AuditKind {
  kRobustness,
  kTruthfulness,
  kParticipation,
  kApproximation,
  kVerification,
};

std::string ToString(AuditKind kind);

struct AuditReport {
  AuditKind kind = AuditKind::kRobustness;
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t trials = 0;
  bool pass = false;
  std::optional<Json> witness;
};

Json audit_to_json(const AuditReport& report);

inline constexpr double kDefaultTvThreshold = 0.02;

// TV between the empirical law and the rule evaluated on the truthful
// agents' true weights; passes iff TV <= threshold.
AuditReport robustness_audit(const MechanismSpec& mech,
                             const ValuationProfile& profile,
                             std::size_t trials, std::uint64_t seed,
                             double threshold = kDefaultTvThreshold,
                             std::size_t workers = 1);

// Ratio of the agent's true-row utility when reporting truthfully to its
// utility under `lie`. Passes iff ratio >= eps - 3 sigma (delta method), with
// eps = participation_bound of the rule. The agent must be truthful in
// `profile` and `lie` must name only that agent.
AuditReport truthfulness_audit(const MechanismSpec& mech,
                               const ValuationProfile& profile,
                               std::size_t agent, const LiarSpec& lie,
                               std::size_t trials, std::uint64_t seed,
                               std::size_t workers = 1);

// Minimum participation margin over every agent of every profile, against
// participation_bound - 1e-9.
AuditReport participation_audit(const RuleSpec& rule,
                                const std::vector<ValuationProfile>& profiles);

// Minimum closed-form approximation ratio against approximation_bound. For
// Exponential the statistic is the largest additive deficit
// ||w||_inf - w.f(w), checked against alpha ln m.
AuditReport approximation_audit(const RuleSpec& rule,
                                const std::vector<ValuationProfile>& profiles);

// Verification on a truthful profile. Power: max <= l. PartialPower: max on
// bottom-free trials <= r(l+1) + l. Exponential: mean <= ||w||_inf / alpha +
// 3 sigma / sqrt(trials). Uniform: max <= 0.
AuditReport verification_audit(const MechanismSpec& mech,
                               const ValuationProfile& profile,
                               std::size_t trials, std::uint64_t seed,
                               std::size_t workers = 1);

struct TradeoffRow {
  double parameter = 0.0;
  double bound = 0.0;           // analytic approximation bound
  double analytic_ratio = 0.0;  // min closed-form ratio over profiles
  double measured_ratio = 0.0;  // mean simulated welfare / OPT
  double mean_verified = 0.0;
  std::size_t max_verified = 0;
  double null_mass = 0.0;       // mean closed-form null mass
  double additive_gap = 0.0;    // max ||w||_inf - w.f(w)
};

// Rule of `family` with its free parameter set: l for Power and
// PartialPower (r taken from `family`), alpha for Exponential.
RuleSpec with_parameter(const RuleSpec& family, double parameter);

std::vector<TradeoffRow> tradeoff_sweep(
    const RuleSpec& family, const std::vector<ValuationProfile>& profiles,
    const std::vector<double>& grid, std::size_t trials, std::uint64_t seed,
    std::size_t workers = 1);

std::string tradeoff_csv(const std::vector<TradeoffRow>& rows);

}  // namespace selver

#endif  // SELVER_ANALYSIS_H_
