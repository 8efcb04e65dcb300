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

// k-Facility Location with selective verification on a finite metric.
//
// Agents sit at points of M. A facility is opened at an agent's reported
// location only after that agent has been verified; caught liars are removed
// and the mechanism is rerun on the rest. Greedy targets the maximum cost
// (k-center), Proportional the social cost (k-median).
//
// Agent ids are positions in the instance's agent arrays and stay stable
// through exclusion. Facility sets are sorted point indices.

#ifndef SELVER_FACILITY_H_
#define SELVER_FACILITY_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "selver/core.h"

namespace selver {

struct MetricInstance {
  std::vector<std::string> points;  // labels; indices are used everywhere else
  Matrix dist;                      // |M| x |M|
  std::vector<std::size_t> agents_true;
  std::vector<std::size_t> agents_reported;
  std::size_t k = 1;

  std::size_t num_points() const { return points.size(); }
  std::size_t num_agents() const { return agents_true.size(); }
  bool is_truthful(std::size_t agent) const {
    return agents_true[agent] == agents_reported[agent];
  }
  std::vector<bool> truth_bits() const;

  // Throws std::invalid_argument unless dist is a metric on M (zero
  // diagonal, symmetric, nonnegative, triangle inequality within 1e-9), agent
  // locations are valid points and k >= 1.
  void Validate() const;

  // Points with pairwise distances |x_a - x_b|, labelled by coordinate.
  static MetricInstance OnLine(const std::vector<double>& coords,
                               std::vector<std::size_t> agents_true,
                               std::vector<std::size_t> agents_reported,
                               std::size_t k);
};

// The same instance restricted to its truthful agents (ids renumbered).
MetricInstance truthful_only(const MetricInstance& instance);

struct FacilityResult {
  std::vector<std::size_t> facilities;  // sorted, distinct point indices
  std::vector<std::size_t> verified;    // distinct agent ids, query order
  std::vector<std::size_t> liars_caught;
  std::size_t recursion_depth = 0;
  std::size_t oracle_calls = 0;

  bool operator==(const FacilityResult&) const = default;
};

// Farthest-point order on `locations` (points of agents): the first agent,
// then repeatedly the unpicked agent farthest from the picked locations, ties
// to the lowest index. Returns min(k, n) agent positions.
std::vector<std::size_t> greedy_centers(
    const std::vector<std::size_t>& locations, std::size_t k,
    const Matrix& dist);

// Greedy mechanism on the reported locations. `rng` is unused (the mechanism
// is deterministic) and accepted for a uniform mechanism signature.
FacilityResult run_greedy(const MetricInstance& instance,
                          VerificationOracle& oracle, RngStream& rng);

// Proportional mechanism: first facility at a uniformly random agent, each
// further one at an agent drawn proportionally to its distance from the open
// facilities, min(k, n) picks. If every remaining distance is zero the rest
// of the facilities go to uniformly random points of M outside the open set
// (no verification). Recursion levels draw from rng.derive(depth).
FacilityResult run_proportional(const MetricInstance& instance,
                                VerificationOracle& oracle, RngStream& rng);

// max_i d(t_i, C) and sum_i d(t_i, C) over the given agent points. An empty
// facility set gives +infinity when there are agents.
double max_cost(const std::vector<std::size_t>& agent_points,
                const std::vector<std::size_t>& facilities,
                const Matrix& dist);
double social_cost(const std::vector<std::size_t>& agent_points,
                   const std::vector<std::size_t>& facilities,
                   const Matrix& dist);

struct BruteForceResult {
  std::vector<std::size_t> facilities;
  double cost = 0.0;
};

// Exhaustive optimum over all min(k, |M|)-subsets of M, first minimum in
// lexicographic order. Throws std::invalid_argument beyond |M| <= 16, k <= 4
// (k >= |M| is answered directly with cost 0).
BruteForceResult brute_force_kcenter(const std::vector<std::size_t>& agents,
                                     std::size_t k, const Matrix& dist);
BruteForceResult brute_force_kmedian(const std::vector<std::size_t>& agents,
                                     std::size_t k, const Matrix& dist);

// Distribution over facility sets.
using FacilityDistribution = std::map<std::vector<std::size_t>, double>;

// Exact distribution of one Proportional round (no verification) on the given
// agent locations.
FacilityDistribution proportional_distribution(
    const std::vector<std::size_t>& locations, std::size_t k,
    const Matrix& dist);

// Exact law of run_proportional on the instance, including the recursion
// after caught liars.
FacilityDistribution proportional_mechanism_distribution(
    const MetricInstance& instance);

// Exact law of the first round's facility set conditional on picking no
// liar. Throws std::domain_error if a liar is picked almost surely.
FacilityDistribution proportional_no_catch_distribution(
    const MetricInstance& instance);

// Expected cost of `agent` at its true location under Proportional run on the
// true locations of all agents (include_agent) or of all others. With no
// other agents the excluded cost is +infinity. Limited to n <= 7, k <= 3.
double proportional_expected_cost(const MetricInstance& instance,
                                  std::size_t agent, bool include_agent);

double tv_distance(const FacilityDistribution& a,
                   const FacilityDistribution& b);

}  // namespace selver

#endif  // SELVER_FACILITY_H_
