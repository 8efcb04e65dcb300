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

#include "selver/instances.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace selver {

std::size_t default_group_size(std::size_t m) {
  if (m < 2) return 1;
  return static_cast<std::size_t>(std::ceil(std::log2(double(m)) / 0.1));
}

ValuationProfile lower_bound_instance(std::size_t m, std::size_t nu,
                                      double delta, RngStream& rng) {
  if (m < 2) throw std::invalid_argument("lower bound instance needs m >= 2");
  if (nu < 1) throw std::invalid_argument("group size must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  Matrix x(m * nu, m);
  for (std::size_t j = 0; j < m; ++j) {
    // Fair coin flips until the first tail; capped at nu.
    std::size_t ones = 0;
    while (ones < nu && rng.uniform() < 0.5) ++ones;
    for (std::size_t a = 0; a < nu; ++a) {
      x(j * nu + a, j) = a < ones ? 1.0 : delta;
    }
  }
  return ValuationProfile(std::move(x));
}

std::vector<std::size_t> lower_bound_group_ones(
    const ValuationProfile& profile, std::size_t nu) {
  const std::size_t m = profile.num_outcomes();
  if (nu == 0 || profile.num_agents() != m * nu) {
    throw std::invalid_argument("profile is not an m x nu group instance");
  }
  std::vector<std::size_t> ones(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t a = 0; a < nu; ++a) {
      if (profile.reported()(j * nu + a, j) == 1.0) ++ones[j];
    }
  }
  return ones;
}

ValuationProfile single_minded_instance(std::size_t m, double big_value) {
  if (m < 1) throw std::invalid_argument("need m >= 1");
  if (!(big_value >= 0.0) || !std::isfinite(big_value)) {
    throw std::invalid_argument("big_value must be finite and >= 0");
  }
  Matrix x(m, m);
  for (std::size_t i = 0; i < m; ++i) x(i, i) = 1.0;
  x(0, 0) = big_value;
  return ValuationProfile(std::move(x));
}

ProfileShape ParseProfileShape(const std::string& text) {
  if (text == "uniform01") return ProfileShape::Uniform01();
  if (text == "spiked") return ProfileShape::Spiked();
  if (text.rfind("sparse:", 0) == 0) {
    const double p = std::stod(text.substr(7));
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("sparse density must lie in [0, 1]");
    }
    return ProfileShape::Sparse(p);
  }
  throw std::invalid_argument("unknown profile shape: " + text);
}

ValuationProfile random_profile(std::size_t n, std::size_t m,
                                const ProfileShape& shape, RngStream& rng) {
  if (m == 0) throw std::invalid_argument("need m >= 1");
  Matrix x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = rng.uniform();
      if (shape.kind == ProfileKind::kSparse) {
        x(i, j) = rng.uniform() < shape.density ? v : 0.0;
      } else {
        x(i, j) = v;
      }
    }
  }
  if (shape.kind == ProfileKind::kSpiked) {
    const std::size_t spike = rng.uniform_index(m);
    for (std::size_t i = 0; i < n; ++i) x(i, spike) *= 10.0;
  }
  return ValuationProfile(std::move(x));
}

LiarSpec LiarSpec::Scale(std::vector<std::size_t> agents, double c) {
  return {std::move(agents), LieKind::kScale, c, 0, 1};
}

LiarSpec LiarSpec::Swap(std::vector<std::size_t> agents, std::size_t a,
                        std::size_t b) {
  return {std::move(agents), LieKind::kSwap, 0.0, a, b};
}

LiarSpec LiarSpec::Constant(std::vector<std::size_t> agents, double v) {
  return {std::move(agents), LieKind::kConstant, v, 0, 1};
}

LiarSpec ParseLie(const std::string& text, std::vector<std::size_t> agents) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  const std::string& kind = parts[0];
  if (kind == "scale" && parts.size() == 2) {
    return LiarSpec::Scale(std::move(agents), std::stod(parts[1]));
  }
  if (kind == "constant" && parts.size() == 2) {
    return LiarSpec::Constant(std::move(agents), std::stod(parts[1]));
  }
  if (kind == "swap" && parts.size() == 3) {
    return LiarSpec::Swap(std::move(agents), std::stoul(parts[1]),
                          std::stoul(parts[2]));
  }
  throw std::invalid_argument("unknown lie '" + text + "'");
}

ValuationProfile apply_liars(const ValuationProfile& profile,
                             const LiarSpec& spec) {
  const std::size_t m = profile.num_outcomes();
  Matrix reported = profile.reported();
  for (std::size_t id : spec.agents) {
    const std::size_t row = profile.row_of(id);
    auto x = reported.row(row);
    switch (spec.kind) {
      case LieKind::kScale:
        if (!(spec.value >= 0.0)) {
          throw std::invalid_argument("scale factor must be >= 0");
        }
        for (double& v : x) v *= spec.value;
        break;
      case LieKind::kSwap:
        if (spec.swap_a >= m || spec.swap_b >= m) {
          throw std::invalid_argument("swap outcome out of range");
        }
        std::swap(x[spec.swap_a], x[spec.swap_b]);
        break;
      case LieKind::kConstant:
        if (!(spec.value >= 0.0)) {
          throw std::invalid_argument("constant lie must be >= 0");
        }
        std::fill(x.begin(), x.end(), spec.value);
        break;
    }
    auto t = profile.truth().row(row);
    if (std::equal(x.begin(), x.end(), t.begin())) {
      throw std::invalid_argument("lie leaves the row of agent " +
                                  std::to_string(id) + " unchanged");
    }
  }
  return ValuationProfile(std::move(reported), profile.truth(),
                          profile.agent_ids());
}

SetValuation coverage_valuation(std::vector<std::size_t> target) {
  std::sort(target.begin(), target.end());
  return [target = std::move(target)](const std::vector<std::size_t>& s) {
    double covered = 0.0;
    for (std::size_t x : s) {
      if (std::binary_search(target.begin(), target.end(), x)) covered += 1.0;
    }
    return covered;
  };
}

bool spot_check_monotone(const SetValuation& v, std::size_t r,
                         std::size_t chains, RngStream& rng) {
  if (v({}) != 0.0) return false;
  std::vector<std::size_t> order(r);
  for (std::size_t c = 0; c < chains; ++c) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = r; i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }
    std::vector<std::size_t> s;
    double prev = 0.0;
    for (std::size_t x : order) {
      s.push_back(x);
      std::vector<std::size_t> sorted = s;
      std::sort(sorted.begin(), sorted.end());
      const double cur = v(sorted);
      if (cur < prev) return false;
      prev = cur;
    }
  }
  return true;
}

std::vector<std::vector<std::size_t>> k_subsets(std::size_t r, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > r) return out;
  std::vector<std::size_t> s(k);
  std::iota(s.begin(), s.end(), std::size_t{0});
  while (true) {
    out.push_back(s);
    std::size_t i = k;
    while (i > 0 && s[i - 1] == r - k + (i - 1)) --i;
    if (i == 0) break;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

CpppProfile cppp_profile(const CpppSpec& spec) {
  if (spec.k > spec.r) throw std::invalid_argument("need k <= r");
  // C(r, k) computed incrementally; stays exact while below the cap.
  double count = 1.0;
  for (std::size_t i = 0; i < spec.k; ++i) {
    count = count * double(spec.r - i) / double(i + 1);
    if (count > 1e4) break;
  }
  if (count > 1e4) {
    throw std::invalid_argument("too many outcomes: C(r, k) > 10^4");
  }
  CpppProfile out;
  out.labels = k_subsets(spec.r, spec.k);
  Matrix x(spec.value_oracles.size(), out.labels.size());
  for (std::size_t i = 0; i < spec.value_oracles.size(); ++i) {
    for (std::size_t j = 0; j < out.labels.size(); ++j) {
      x(i, j) = spec.value_oracles[i](out.labels[j]);
    }
  }
  out.profile = ValuationProfile(std::move(x));
  return out;
}

namespace {

std::vector<std::size_t> PlaceAgents(std::size_t n, std::size_t num_points,
                                     bool distinct, RngStream& rng) {
  std::vector<std::size_t> at(n);
  if (distinct) {
    if (n > num_points) {
      throw std::invalid_argument("distinct locations need n <= |M|");
    }
    std::vector<std::size_t> perm(num_points);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(perm[i], perm[i + rng.uniform_index(num_points - i)]);
      at[i] = perm[i];
    }
  } else {
    for (auto& p : at) p = rng.uniform_index(num_points);
  }
  return at;
}

}  // namespace

MetricInstance random_line_instance(std::size_t n, std::size_t num_points,
                                    std::size_t k, bool distinct,
                                    RngStream& rng) {
  if (num_points == 0) throw std::invalid_argument("need |M| >= 1");
  std::vector<double> coords(num_points);
  for (double& c : coords) c = 100.0 * rng.uniform();
  std::vector<std::size_t> agents = PlaceAgents(n, num_points, distinct, rng);
  return MetricInstance::OnLine(coords, agents, agents, k);
}

MetricInstance random_graph_instance(std::size_t n, std::size_t num_points,
                                     std::size_t k, bool distinct,
                                     RngStream& rng) {
  if (num_points == 0) throw std::invalid_argument("need |M| >= 1");
  MetricInstance inst;
  Matrix& d = inst.dist;
  d = Matrix(num_points, num_points);
  for (std::size_t a = 0; a < num_points; ++a) {
    inst.points.push_back("v" + std::to_string(a));
    for (std::size_t b = a + 1; b < num_points; ++b) {
      d(a, b) = d(b, a) = 1.0 + 9.0 * rng.uniform();
    }
  }
  // Floyd-Warshall closure.
  for (std::size_t via = 0; via < num_points; ++via) {
    for (std::size_t a = 0; a < num_points; ++a) {
      for (std::size_t b = 0; b < num_points; ++b) {
        d(a, b) = std::min(d(a, b), d(a, via) + d(via, b));
      }
    }
  }
  inst.agents_true = PlaceAgents(n, num_points, distinct, rng);
  inst.agents_reported = inst.agents_true;
  inst.k = k;
  inst.Validate();
  return inst;
}

}  // namespace selver
