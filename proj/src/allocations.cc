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

#include "selver/allocations.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace selver {

RuleSpec RuleSpec::Power(int l) {
  RuleSpec s;
  s.kind = RuleKind::kPower;
  s.power = l;
  s.Validate();
  return s;
}

RuleSpec RuleSpec::PartialPower(int l, int r) {
  RuleSpec s;
  s.kind = RuleKind::kPartialPower;
  s.power = l;
  s.repetitions = r;
  s.Validate();
  return s;
}

RuleSpec RuleSpec::Exponential(double alpha) {
  RuleSpec s;
  s.kind = RuleKind::kExponential;
  s.alpha = alpha;
  s.Validate();
  return s;
}

void RuleSpec::Validate() const {
  switch (kind) {
    case RuleKind::kUniform:
      return;
    case RuleKind::kPower:
      if (power < 0) throw std::invalid_argument("Power needs l >= 0");
      return;
    case RuleKind::kPartialPower:
      if (power < 1 || repetitions < 1) {
        throw std::invalid_argument("PartialPower needs l >= 1 and r >= 1");
      }
      return;
    case RuleKind::kExponential:
      if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("Exponential needs alpha > 0");
      }
      return;
  }
}

std::string RuleSpec::ToString() const {
  std::ostringstream os;
  switch (kind) {
    case RuleKind::kUniform:
      os << "uniform";
      break;
    case RuleKind::kPower:
      os << "power:" << power;
      break;
    case RuleKind::kPartialPower:
      os << "partial:" << power << ":" << repetitions;
      break;
    case RuleKind::kExponential:
      os << "exp:" << alpha;
      break;
  }
  return os.str();
}

RuleSpec ParseRuleSpec(const std::string& text) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(text);
  while (std::getline(is, part, ':')) parts.push_back(part);
  if (parts.empty()) throw std::invalid_argument("empty rule spec");
  const std::string& name = parts[0];
  auto arg = [&](std::size_t i) -> const std::string& {
    if (i >= parts.size()) {
      throw std::invalid_argument("rule spec '" + text +
                                  "' is missing a parameter");
    }
    return parts[i];
  };
  if (name == "uniform") return RuleSpec::Uniform();
  if (name == "power") return RuleSpec::Power(std::stoi(arg(1)));
  if (name == "partial" || name == "partial_power") {
    return RuleSpec::PartialPower(std::stoi(arg(1)), std::stoi(arg(2)));
  }
  if (name == "exp" || name == "exponential") {
    return RuleSpec::Exponential(std::stod(arg(1)));
  }
  throw std::invalid_argument("unknown rule '" + name + "'");
}

namespace {

double MaxEntry(const WeightVector& w) {
  double mx = 0.0;
  for (double v : w) mx = std::max(mx, v);
  return mx;
}

void CheckWeights(const WeightVector& w) {
  if (w.empty()) throw std::invalid_argument("weight vector is empty");
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
  }
}

}  // namespace

double p_norm(const std::vector<double>& v, double p) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  if (mx == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / mx, p);
  return mx * std::pow(s, 1.0 / p);
}

double entropy(const std::vector<double>& z) {
  double h = 0.0;
  for (double p : z) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

Allocation power_allocation(const WeightVector& w, int l) {
  CheckWeights(w);
  if (l < 0) throw std::invalid_argument("Power needs l >= 0");
  const std::size_t m = w.size();
  const double mx = MaxEntry(w);
  if (l == 0 || mx == 0.0) return Allocation::Uniform(m);
  // Scale by the max entry so w_j^l cannot overflow.
  Allocation a{std::vector<double>(m), 0.0};
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    a.probs[j] = std::pow(w[j] / mx, l);
    total += a.probs[j];
  }
  for (double& p : a.probs) p /= total;
  return a;
}

double partial_power_radius(std::size_t m, int l, int r) {
  return (1.0 - 1.0 / r) * std::pow(static_cast<double>(m), -1.0 / (l + 1.0));
}

Allocation partial_power_allocation(const WeightVector& w, int l, int r) {
  CheckWeights(w);
  if (l < 1 || r < 1) {
    throw std::invalid_argument("PartialPower needs l >= 1 and r >= 1");
  }
  const std::size_t m = w.size();
  const double mx = MaxEntry(w);
  if (mx == 0.0) return Allocation::AllNull(m);
  // ||u^l||_{1+1/l} = (sum u_j^{l+1})^{l/(l+1)} with u = w / max(w).
  std::vector<double> scaled_pow(m);
  double sum_l1 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double u = w[j] / mx;
    scaled_pow[j] = std::pow(u, l);
    sum_l1 += std::pow(u, l + 1);
  }
  const double norm = std::pow(sum_l1, l / (l + 1.0));
  const double radius = partial_power_radius(m, l, r);
  Allocation a{std::vector<double>(m), 0.0};
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    a.probs[j] = radius * scaled_pow[j] / norm;
    total += a.probs[j];
  }
  a.null_mass = std::max(0.0, 1.0 - total);
  return a;
}

Allocation exponential_allocation(const WeightVector& w, double alpha) {
  CheckWeights(w);
  if (!(alpha > 0.0))
    throw std::invalid_argument("Exponential needs alpha > 0");
  const double mx = MaxEntry(w);
  Allocation a{std::vector<double>(w.size()), 0.0};
  double total = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    a.probs[j] = std::exp((w[j] - mx) / alpha);
    total += a.probs[j];
  }
  for (double& p : a.probs) p /= total;
  return a;
}

Allocation evaluate_rule(const RuleSpec& spec, const WeightVector& w) {
  spec.Validate();
  switch (spec.kind) {
    case RuleKind::kUniform:
      CheckWeights(w);
      return Allocation::Uniform(w.size());
    case RuleKind::kPower:
      return power_allocation(w, spec.power);
    case RuleKind::kPartialPower:
      return partial_power_allocation(w, spec.power, spec.repetitions);
    case RuleKind::kExponential:
      return exponential_allocation(w, spec.alpha);
  }
  throw std::logic_error("unhandled rule kind");
}

double expected_welfare(const WeightVector& w, const Allocation& a) {
  if (w.size() != a.size()) {
    throw std::invalid_argument("expected_welfare: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * a.probs[j];
  return s;
}

double approximation_ratio(const WeightVector& w, const Allocation& a) {
  const double opt = MaxEntry(w);
  if (opt == 0.0) {
    throw std::domain_error("approximation ratio undefined for ||w||_inf = 0");
  }
  return expected_welfare(w, a) / opt;
}

double participation_margin(const RuleSpec& spec,
                            const ValuationProfile& profile,
                            std::size_t agent) {
  if (agent >= profile.num_agents()) {
    throw std::out_of_range("participation_margin: agent out of range");
  }
  auto x = profile.truth().row(agent);
  const WeightVector xi(x.begin(), x.end());
  const WeightVector w = weight_vector(profile, /*use_truth=*/true);
  const std::size_t rows[] = {agent};
  const WeightVector w_without =
      weight_vector(exclude(profile, rows), /*use_truth=*/true);
  const double with = expected_welfare(xi, evaluate_rule(spec, w));
  const double without = expected_welfare(xi, evaluate_rule(spec, w_without));
  if (without == 0.0) return std::numeric_limits<double>::infinity();
  return with / without;
}

double approximation_bound(const RuleSpec& spec, std::size_t m) {
  const double md = static_cast<double>(m);
  switch (spec.kind) {
    case RuleKind::kUniform:
      return 1.0 / md;
    case RuleKind::kPower:
      return std::pow(md, -1.0 / (spec.power + 1.0));
    case RuleKind::kPartialPower:
      return partial_power_radius(m, spec.power, spec.repetitions);
    case RuleKind::kExponential:
      return 0.0;
  }
  return 0.0;
}

double additive_error_bound(const RuleSpec& spec, std::size_t m) {
  if (spec.kind != RuleKind::kExponential) return 0.0;
  return spec.alpha * std::log(static_cast<double>(m));
}

double participation_bound(const RuleSpec& spec, std::size_t m) {
  if (spec.kind == RuleKind::kPower) {
    return std::pow(static_cast<double>(m), -1.0 / (spec.power + 1.0));
  }
  return 1.0;
}

namespace {

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

// Random point of the positive orthant scaled to p-norm `radius`.
std::vector<double> OrthantPoint(std::size_t m, double p, double radius,
                                 RngStream& rng) {
  std::vector<double> z(m);
  double norm = 0.0;
  while (norm == 0.0) {
    for (double& v : z) v = std::abs(rng.normal());
    norm = p_norm(z, p);
  }
  for (double& v : z) v *= radius / norm;
  return z;
}

std::vector<double> SimplexPoint(std::size_t m, RngStream& rng) {
  std::vector<double> z(m);
  double total = 0.0;
  for (double& v : z) {
    v = rng.exponential();
    total += v;
  }
  for (double& v : z) v /= total;
  return z;
}

}  // namespace

ExtremalityReport midr_extremality_check(const RuleSpec& spec,
                                         const WeightVector& w,
                                         std::size_t probes, RngStream& rng,
                                         double tol) {
  CheckWeights(w);
  const std::size_t m = w.size();
  ExtremalityReport report;
  report.max_gap = -std::numeric_limits<double>::infinity();
  const Allocation f = evaluate_rule(spec, w);

  std::function<double(const std::vector<double>&)> objective;
  std::function<std::vector<double>(std::size_t)> next_probe;
  if (spec.kind == RuleKind::kPartialPower) {
    const double p = 1.0 + 1.0 / spec.power;
    const double radius = partial_power_radius(m, spec.power, spec.repetitions);
    if (*std::max_element(w.begin(), w.end()) > 0.0) {
      report.boundary_error = p_norm(f.probs, p) - radius;
      if (std::abs(report.boundary_error) > tol) ++report.violations;
    }
    objective = [&w](const std::vector<double>& z) { return Dot(w, z); };
    next_probe = [&, p, radius](std::size_t k) {
      if (k < m) {  // corners of the range first
        std::vector<double> z(m, 0.0);
        z[k] = radius;
        return z;
      }
      // Every fourth probe is interior, at half the radius.
      return OrthantPoint(m, p, k % 4 == 3 ? radius / 2 : radius, rng);
    };
  } else if (spec.kind == RuleKind::kExponential) {
    const double alpha = spec.alpha;
    objective = [&w, alpha](const std::vector<double>& z) {
      return Dot(w, z) + alpha * entropy(z);
    };
    next_probe = [&](std::size_t k) {
      if (k < m) {
        std::vector<double> z(m, 0.0);
        z[k] = 1.0;
        return z;
      }
      return SimplexPoint(m, rng);
    };
  } else {
    throw std::invalid_argument(
        "midr_extremality_check applies to PartialPower and Exponential");
  }

  const double best = objective(f.probs);
  const double slack = tol * std::max(1.0, std::abs(best));
  for (std::size_t k = 0; k < probes; ++k) {
    std::vector<double> z = next_probe(k);
    const double gap = objective(z) - best;
    ++report.probes;
    if (gap > report.max_gap) report.max_gap = gap;
    if (gap > slack) {
      ++report.violations;
      if (!report.witness) report.witness = std::move(z);
    }
  }
  return report;
}

}  // namespace selver
