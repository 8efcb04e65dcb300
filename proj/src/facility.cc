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

#include "selver/facility.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace selver {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMetricTolerance = 1e-9;

double DistanceToSet(std::size_t point, const std::vector<std::size_t>& set,
                     const Matrix& dist) {
  double best = kInf;
  for (std::size_t c : set) best = std::min(best, dist(point, c));
  return best;
}

bool Contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

std::vector<std::size_t> SortedUnique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<std::size_t> ReportedLocations(
    const MetricInstance& instance, const std::vector<std::size_t>& agents) {
  std::vector<std::size_t> out;
  out.reserve(agents.size());
  for (std::size_t a : agents) out.push_back(instance.agents_reported[a]);
  return out;
}

std::vector<std::size_t> AllAgents(const MetricInstance& instance) {
  std::vector<std::size_t> agents(instance.num_agents());
  for (std::size_t i = 0; i < agents.size(); ++i) agents[i] = i;
  return agents;
}

// Queries each distinct agent once per run; returns the liars among `ids`.
std::vector<std::size_t> VerifyAll(const std::vector<std::size_t>& ids,
                                   VerificationOracle& oracle,
                                   FacilityResult& result) {
  std::vector<std::size_t> liars;
  for (std::size_t id : ids) {
    bool truthful;
    if (Contains(result.verified, id)) {
      truthful = !Contains(result.liars_caught, id);
    } else {
      truthful = oracle.verify(id);
      result.verified.push_back(id);
      ++result.oracle_calls;
      if (!truthful) result.liars_caught.push_back(id);
    }
    if (!truthful && !Contains(liars, id)) liars.push_back(id);
  }
  return liars;
}

std::vector<std::size_t> Remove(const std::vector<std::size_t>& from,
                                const std::vector<std::size_t>& drop) {
  std::vector<std::size_t> out;
  for (std::size_t x : from) {
    if (!Contains(drop, x)) out.push_back(x);
  }
  return out;
}

// Leaf of the Proportional selection tree: the agents picked (positions in
// the location list), the open points in selection order, and the path
// probability.
using LeafVisitor =
    std::function<void(const std::vector<std::size_t>& picked,
                       const std::vector<std::size_t>& open, double prob)>;

void EnumerateProportional(const std::vector<std::size_t>& locations,
                           std::size_t k, const Matrix& dist,
                           const LeafVisitor& visit) {
  const std::size_t n = locations.size();
  const std::size_t target = std::min(k, n);
  std::vector<std::size_t> picked, open;
  std::function<void(double)> step = [&](double prob) {
    if (open.size() >= target || open.size() == dist.rows()) {
      visit(picked, open, prob);
      return;
    }
    if (open.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        picked.push_back(i);
        open.push_back(locations[i]);
        step(prob / static_cast<double>(n));
        open.pop_back();
        picked.pop_back();
      }
      return;
    }
    std::vector<double> d(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = DistanceToSet(locations[i], open, dist);
      total += d[i];
    }
    if (total > 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (d[i] <= 0.0) continue;
        picked.push_back(i);
        open.push_back(locations[i]);
        step(prob * d[i] / total);
        open.pop_back();
        picked.pop_back();
      }
      return;
    }
    std::vector<std::size_t> rest;
    for (std::size_t p = 0; p < dist.rows(); ++p) {
      if (!Contains(open, p)) rest.push_back(p);
    }
    for (std::size_t p : rest) {
      open.push_back(p);
      step(prob / static_cast<double>(rest.size()));
      open.pop_back();
    }
  };
  step(1.0);
}

std::string FormatCoordinate(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<bool> MetricInstance::truth_bits() const {
  std::vector<bool> bits(num_agents());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = is_truthful(i);
  return bits;
}

void MetricInstance::Validate() const {
  const std::size_t p = num_points();
  if (p == 0) throw std::invalid_argument("metric instance has no points");
  if (dist.rows() != p || dist.cols() != p) {
    throw std::invalid_argument("distance matrix must be |M| x |M|");
  }
  for (std::size_t a = 0; a < p; ++a) {
    if (dist(a, a) != 0.0) {
      throw std::invalid_argument("distance matrix needs a zero diagonal");
    }
    for (std::size_t b = 0; b < p; ++b) {
      const double d = dist(a, b);
      if (!std::isfinite(d) || d < 0.0) {
        throw std::invalid_argument("distances must be finite and >= 0");
      }
      if (std::abs(d - dist(b, a)) > kMetricTolerance) {
        throw std::invalid_argument("distance matrix is not symmetric");
      }
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) {
      for (std::size_t c = 0; c < p; ++c) {
        if (dist(a, c) > dist(a, b) + dist(b, c) + kMetricTolerance) {
          throw std::invalid_argument(
              "triangle inequality violated at (" + std::to_string(a) + ", " +
              std::to_string(b) + ", " + std::to_string(c) + ")");
        }
      }
    }
  }
  if (agents_true.size() != agents_reported.size()) {
    throw std::invalid_argument(
        "agents_true and agents_reported differ in length");
  }
  for (std::size_t i = 0; i < agents_true.size(); ++i) {
    if (agents_true[i] >= p || agents_reported[i] >= p) {
      throw std::invalid_argument("agent location is not a point of M");
    }
  }
  if (k < 1) throw std::invalid_argument("k must be >= 1");
}

MetricInstance MetricInstance::OnLine(const std::vector<double>& coords,
                                      std::vector<std::size_t> agents_true,
                                      std::vector<std::size_t> agents_reported,
                                      std::size_t k) {
  MetricInstance inst;
  const std::size_t p = coords.size();
  inst.dist = Matrix(p, p);
  for (std::size_t a = 0; a < p; ++a) {
    inst.points.push_back(FormatCoordinate(coords[a]));
    for (std::size_t b = 0; b < p; ++b) {
      inst.dist(a, b) = std::abs(coords[a] - coords[b]);
    }
  }
  inst.agents_true = std::move(agents_true);
  inst.agents_reported = std::move(agents_reported);
  inst.k = k;
  inst.Validate();
  return inst;
}

MetricInstance truthful_only(const MetricInstance& instance) {
  MetricInstance out = instance;
  out.agents_true.clear();
  out.agents_reported.clear();
  for (std::size_t i = 0; i < instance.num_agents(); ++i) {
    if (!instance.is_truthful(i)) continue;
    out.agents_true.push_back(instance.agents_true[i]);
    out.agents_reported.push_back(instance.agents_true[i]);
  }
  return out;
}

std::vector<std::size_t> greedy_centers(
    const std::vector<std::size_t>& locations, std::size_t k,
    const Matrix& dist) {
  const std::size_t n = locations.size();
  const std::size_t target = std::min(k, n);
  std::vector<std::size_t> centers;
  if (target == 0) return centers;
  std::vector<bool> taken(n, false);
  std::vector<double> gap(n);
  centers.push_back(0);
  taken[0] = true;
  for (std::size_t i = 0; i < n; ++i) gap[i] = dist(locations[i], locations[0]);
  while (centers.size() < target) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (best == n || gap[i] > gap[best]) best = i;
    }
    centers.push_back(best);
    taken[best] = true;
    for (std::size_t i = 0; i < n; ++i) {
      gap[i] = std::min(gap[i], dist(locations[i], locations[best]));
    }
  }
  return centers;
}

FacilityResult run_greedy(const MetricInstance& instance,
                          VerificationOracle& oracle, RngStream& /*rng*/) {
  instance.Validate();
  FacilityResult result;
  std::vector<std::size_t> active = AllAgents(instance);
  for (std::size_t depth = 0;; ++depth) {
    result.recursion_depth = depth;
    const std::vector<std::size_t> locations =
        ReportedLocations(instance, active);
    std::vector<std::size_t> chosen;
    for (std::size_t c : greedy_centers(locations, instance.k, instance.dist)) {
      chosen.push_back(active[c]);
    }
    const std::vector<std::size_t> liars = VerifyAll(chosen, oracle, result);
    if (liars.empty()) {
      result.facilities = SortedUnique(ReportedLocations(instance, chosen));
      return result;
    }
    active = Remove(active, liars);
  }
}

FacilityResult run_proportional(const MetricInstance& instance,
                                VerificationOracle& oracle, RngStream& rng) {
  instance.Validate();
  FacilityResult result;
  std::vector<std::size_t> active = AllAgents(instance);
  const Matrix& dist = instance.dist;
  for (std::size_t depth = 0;; ++depth) {
    result.recursion_depth = depth;
    RngStream level = rng.derive(depth);
    const std::vector<std::size_t> locations =
        ReportedLocations(instance, active);
    const std::size_t n = locations.size();
    const std::size_t target = std::min(instance.k, n);
    std::vector<std::size_t> chosen, open;
    while (open.size() < target && open.size() < dist.rows()) {
      if (open.empty()) {
        const std::size_t i = level.uniform_index(n);
        chosen.push_back(active[i]);
        open.push_back(locations[i]);
        continue;
      }
      std::vector<double> d(n);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = DistanceToSet(locations[i], open, dist);
        total += d[i];
      }
      if (total > 0.0) {
        const std::size_t i = level.weighted_index(d, total);
        chosen.push_back(active[i]);
        open.push_back(locations[i]);
        continue;
      }
      std::vector<std::size_t> rest;
      for (std::size_t p = 0; p < dist.rows(); ++p) {
        if (!Contains(open, p)) rest.push_back(p);
      }
      open.push_back(rest[level.uniform_index(rest.size())]);
    }
    const std::vector<std::size_t> liars = VerifyAll(chosen, oracle, result);
    if (liars.empty()) {
      result.facilities = SortedUnique(open);
      return result;
    }
    active = Remove(active, liars);
  }
}

double max_cost(const std::vector<std::size_t>& agent_points,
                const std::vector<std::size_t>& facilities,
                const Matrix& dist) {
  double worst = 0.0;
  for (std::size_t a : agent_points) {
    worst = std::max(worst, DistanceToSet(a, facilities, dist));
  }
  return worst;
}

double social_cost(const std::vector<std::size_t>& agent_points,
                   const std::vector<std::size_t>& facilities,
                   const Matrix& dist) {
  double total = 0.0;
  for (std::size_t a : agent_points)
    total += DistanceToSet(a, facilities, dist);
  return total;
}

namespace {

using Objective = double (*)(const std::vector<std::size_t>&,
                             const std::vector<std::size_t>&, const Matrix&);

BruteForceResult BruteForce(const std::vector<std::size_t>& agents,
                            std::size_t k, const Matrix& dist,
                            Objective objective) {
  const std::size_t p = dist.rows();
  BruteForceResult best;
  if (k >= p) {
    best.facilities.resize(p);
    for (std::size_t i = 0; i < p; ++i) best.facilities[i] = i;
    best.cost = 0.0;
    return best;
  }
  if (p > 16 || k > 4) {
    throw std::invalid_argument("brute force limited to |M| <= 16 and k <= 4");
  }
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  std::vector<std::size_t> subset(k);
  for (std::size_t i = 0; i < k; ++i) subset[i] = i;
  best.cost = kInf;
  while (true) {
    const double cost = objective(agents, subset, dist);
    if (cost < best.cost) {
      best.cost = cost;
      best.facilities = subset;
    }
    // Next k-subset in lexicographic order.
    std::size_t i = k;
    while (i > 0 && subset[i - 1] == p - k + (i - 1)) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  return best;
}

}  // namespace

BruteForceResult brute_force_kcenter(const std::vector<std::size_t>& agents,
                                     std::size_t k, const Matrix& dist) {
  return BruteForce(agents, k, dist, &max_cost);
}

BruteForceResult brute_force_kmedian(const std::vector<std::size_t>& agents,
                                     std::size_t k, const Matrix& dist) {
  return BruteForce(agents, k, dist, &social_cost);
}

FacilityDistribution proportional_distribution(
    const std::vector<std::size_t>& locations, std::size_t k,
    const Matrix& dist) {
  FacilityDistribution out;
  EnumerateProportional(
      locations, k, dist,
      [&](const std::vector<std::size_t>&, const std::vector<std::size_t>& open,
          double p) { out[SortedUnique(open)] += p; });
  return out;
}

FacilityDistribution proportional_mechanism_distribution(
    const MetricInstance& instance) {
  instance.Validate();
  std::map<std::vector<std::size_t>, FacilityDistribution> memo;
  std::function<const FacilityDistribution&(const std::vector<std::size_t>&)>
      solve = [&](const std::vector<std::size_t>& active)
      -> const FacilityDistribution& {
    if (auto it = memo.find(active); it != memo.end()) return it->second;
    FacilityDistribution dist;
    std::vector<std::pair<std::vector<std::size_t>, double>> branches;
    EnumerateProportional(ReportedLocations(instance, active), instance.k,
                          instance.dist,
                          [&](const std::vector<std::size_t>& picked,
                              const std::vector<std::size_t>& open, double p) {
                            std::vector<std::size_t> liars;
                            for (std::size_t pos : picked) {
                              if (!instance.is_truthful(active[pos]))
                                liars.push_back(active[pos]);
                            }
                            if (liars.empty()) {
                              dist[SortedUnique(open)] += p;
                            } else {
                              branches.emplace_back(Remove(active, liars), p);
                            }
                          });
    for (const auto& [rest, p] : branches) {
      for (const auto& [set, q] : solve(rest)) dist[set] += p * q;
    }
    return memo.emplace(active, std::move(dist)).first->second;
  };
  return solve(AllAgents(instance));
}

FacilityDistribution proportional_no_catch_distribution(
    const MetricInstance& instance) {
  instance.Validate();
  FacilityDistribution out;
  double mass = 0.0;
  EnumerateProportional(instance.agents_reported, instance.k, instance.dist,
                        [&](const std::vector<std::size_t>& picked,
                            const std::vector<std::size_t>& open, double p) {
                          for (std::size_t a : picked) {
                            if (!instance.is_truthful(a)) return;
                          }
                          out[SortedUnique(open)] += p;
                          mass += p;
                        });
  if (!(mass > 0.0)) {
    throw std::domain_error("a liar is picked with probability one");
  }
  for (auto& [set, p] : out) p /= mass;
  return out;
}

double proportional_expected_cost(const MetricInstance& instance,
                                  std::size_t agent, bool include_agent) {
  instance.Validate();
  if (agent >= instance.num_agents()) {
    throw std::out_of_range("agent index out of range");
  }
  if (instance.num_agents() > 7 || instance.k > 3) {
    throw std::invalid_argument(
        "exact cost recursion limited to n <= 7 and k <= 3");
  }
  std::vector<std::size_t> locations;
  for (std::size_t i = 0; i < instance.num_agents(); ++i) {
    if (i == agent && !include_agent) continue;
    locations.push_back(instance.agents_true[i]);
  }
  if (locations.empty()) return kInf;
  const std::size_t home = instance.agents_true[agent];
  double expected = 0.0;
  EnumerateProportional(locations, instance.k, instance.dist,
                        [&](const std::vector<std::size_t>&,
                            const std::vector<std::size_t>& open, double p) {
                          expected +=
                              p * DistanceToSet(home, open, instance.dist);
                        });
  return expected;
}

double tv_distance(const FacilityDistribution& a,
                   const FacilityDistribution& b) {
  double sum = 0.0;
  for (const auto& [set, p] : a) {
    auto it = b.find(set);
    sum += std::abs(p - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [set, q] : b) {
    if (!a.contains(set)) sum += q;
  }
  return 0.5 * sum;
}

}  // namespace selver
