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

// Instance generators: the hard family behind the logarithmic verification
// lower bound, single-minded baselines, random profiles and lies, the
// combinatorial public project adapter, and random metric instances.
// Every generator is a pure function of its arguments and the stream.

#ifndef SELVER_INSTANCES_H_
#define SELVER_INSTANCES_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "selver/core.h"
#include "selver/facility.h"

namespace selver {

// ceil(log2(m) / 0.1).
std::size_t default_group_size(std::size_t m);

// m groups of nu agents; group j values only outcome j. Per group K ones are
// drawn with Pr[K = k] = 2^-(k+1) for k < nu and the tail mass on K = nu; the
// first K agents of the group report 1, the rest delta. Truthful.
ValuationProfile lower_bound_instance(std::size_t m, std::size_t nu,
                                      double delta, RngStream& rng);

// Number of agents valuing their group's outcome at 1, per group.
std::vector<std::size_t> lower_bound_group_ones(
    const ValuationProfile& profile, std::size_t nu);

// Identity matrix of m single-minded agents, agent 0 scaled to big_value.
ValuationProfile single_minded_instance(std::size_t m, double big_value);

enum class ProfileKind { kUniform01, kSparse, kSpiked };

struct ProfileShape {
  ProfileKind kind = ProfileKind::kUniform01;
  double density = 0.5;  // kSparse: probability an entry is nonzero

  static ProfileShape Uniform01() { return {}; }
  static ProfileShape Sparse(double p) { return {ProfileKind::kSparse, p}; }
  static ProfileShape Spiked() { return {ProfileKind::kSpiked, 0.5}; }
};

// Parses "uniform01", "sparse:0.3", "spiked".
ProfileShape ParseProfileShape(const std::string& text);

// Truthful n x m profile. Entries are U[0,1); sparse zeroes each entry with
// probability 1 - density; spiked multiplies one random column by 10.
ValuationProfile random_profile(std::size_t n, std::size_t m,
                                const ProfileShape& shape, RngStream& rng);

enum class LieKind { kScale, kSwap, kConstant };

struct LiarSpec {
  std::vector<std::size_t> agents;  // stable ids
  LieKind kind = LieKind::kScale;
  double value = 2.0;     // scale factor or constant
  std::size_t swap_a = 0;  // outcomes exchanged by kSwap
  std::size_t swap_b = 1;

  static LiarSpec Scale(std::vector<std::size_t> agents, double c);
  static LiarSpec Swap(std::vector<std::size_t> agents, std::size_t a,
                       std::size_t b);
  static LiarSpec Constant(std::vector<std::size_t> agents, double v);
};

// Parses "scale:<c>", "swap:<a>:<b>", "constant:<v>".
LiarSpec ParseLie(const std::string& text, std::vector<std::size_t> agents);

// Rewrites the reported rows of the listed agents. Throws
// std::invalid_argument if a mutated row equals the agent's true row.
ValuationProfile apply_liars(const ValuationProfile& profile,
                             const LiarSpec& spec);

// Set function over resource indices.
using SetValuation = std::function<double(const std::vector<std::size_t>&)>;

// v(S) = |S intersect target|.
SetValuation coverage_valuation(std::vector<std::size_t> target);

struct CpppSpec {
  std::size_t r = 0;  // resources
  std::size_t k = 0;  // project size
  std::vector<SetValuation> value_oracles;
};

// Spot checks v(empty) = 0 and monotonicity along `chains` random chains.
bool spot_check_monotone(const SetValuation& v, std::size_t r,
                         std::size_t chains, RngStream& rng);

// All k-subsets of {0..r-1} in lexicographic order.
std::vector<std::vector<std::size_t>> k_subsets(std::size_t r, std::size_t k);

struct CpppProfile {
  ValuationProfile profile;
  std::vector<std::vector<std::size_t>> labels;  // outcome -> subset
};

// One outcome per k-subset; x_i(S) = v_i(S). Throws std::invalid_argument
// when C(r, k) > 10^4.
CpppProfile cppp_profile(const CpppSpec& spec);

// Random points on [0, 100) with agents at random points (distinct points
// when `distinct` is set, which needs n <= num_points). Truthful.
MetricInstance random_line_instance(std::size_t n, std::size_t num_points,
                                    std::size_t k, bool distinct,
                                    RngStream& rng);

// Shortest-path metric of a complete graph with U[1, 10) edge weights.
MetricInstance random_graph_instance(std::size_t n, std::size_t num_points,
                                     std::size_t k, bool distinct,
                                     RngStream& rng);

}  // namespace selver

#endif  // SELVER_INSTANCES_H_
