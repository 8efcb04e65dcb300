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

#include "selver/analysis.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace selver {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MechanismResult RunLeakyPower(const ValuationProfile& profile,
                              VerificationOracle& oracle, int l,
                              RngStream& rng) {
  MechanismResult result;
  RngStream level = rng.derive(0);
  const WeightVector w = weight_vector(profile);
  if (l > 0 && *std::max_element(w.begin(), w.end()) == 0.0) {
    result.outcome = level.uniform_index(profile.num_outcomes());
    return result;
  }
  SampledTerm term = sample_power_term(profile, l, level);
  for (std::size_t id : term.tuple) {
    if (std::find(result.verified.begin(), result.verified.end(), id) !=
        result.verified.end()) {
      continue;
    }
    result.verified.push_back(id);
    ++result.oracle_calls;
    if (!oracle.verify(id)) result.liars_caught.push_back(id);
  }
  result.outcome = term.outcome;
  return result;
}

class StatsAccumulator {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
    max_ = std::max(max_, x);
  }
  VerificationStats stats() const {
    VerificationStats s;
    s.runs = n_;
    s.mean = mean_;
    s.stddev = n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1)) : 0.0;
    s.max = static_cast<std::size_t>(max_);
    return s;
  }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  std::size_t count() const { return n_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double max_ = 0.0;
};

Json AllocationWitness(const Allocation& empirical, const Allocation& target) {
  Json j;
  j["empirical"] = allocation_to_json(empirical);
  j["target"] = allocation_to_json(target);
  return j;
}

std::string FormatDouble(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// True-row utility x_i(outcome) of each trial.
StatsAccumulator Utilities(const std::vector<MechanismResult>& results,
                           std::span<const double> true_row) {
  StatsAccumulator acc;
  for (const auto& r : results) acc.add(r.outcome ? true_row[*r.outcome] : 0.0);
  return acc;
}

}  // namespace

std::string MechanismSpec::ToString() const {
  if (leaky) return "leaky:" + std::to_string(rule.power);
  return rule.ToString();
}

MechanismSpec ParseMechanismSpec(const std::string& text) {
  if (text.rfind("leaky:", 0) == 0) {
    const int l = std::stoi(text.substr(6));
    if (l < 0) throw std::invalid_argument("leaky needs l >= 0");
    return MechanismSpec::LeakyPower(l);
  }
  return MechanismSpec::Of(ParseRuleSpec(text));
}

MechanismResult run_mechanism(const MechanismSpec& mech,
                              const ValuationProfile& profile, RngStream& rng) {
  VerificationOracle oracle(profile);
  if (mech.leaky) return RunLeakyPower(profile, oracle, mech.rule.power, rng);
  return run_rule_mechanism(mech.rule, profile, oracle, rng);
}

std::vector<MechanismResult> run_trials(const MechanismSpec& mech,
                                        const ValuationProfile& profile,
                                        std::size_t trials, std::uint64_t seed,
                                        std::size_t workers) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  mech.rule.Validate();
  std::vector<MechanismResult> results(trials);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      RngStream rng(seed, t);
      results[t] = run_mechanism(mech, profile, rng);
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, trials);
  if (workers == 1) {
    work(0, trials);
    return results;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (trials + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(trials, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  pool.clear();  // joins
  return results;
}

EmpiricalResult summarize(const std::vector<MechanismResult>& results,
                          std::size_t num_outcomes) {
  EmpiricalResult out;
  out.trials = results.size();
  out.frequencies.probs.assign(num_outcomes, 0.0);
  std::vector<std::size_t> counts(num_outcomes, 0);
  std::size_t nulls = 0;
  StatsAccumulator all, truthful, bottom;
  for (const auto& r : results) {
    if (r.outcome) {
      ++counts.at(*r.outcome);
    } else {
      ++nulls;
    }
    const double v = static_cast<double>(r.verified.size());
    all.add(v);
    (r.bot_resolved ? bottom : truthful).add(v);
    ++out.liars_caught_histogram[r.liars_caught.size()];
  }
  const double n = static_cast<double>(results.size());
  for (std::size_t j = 0; j < num_outcomes; ++j) {
    out.frequencies.probs[j] = static_cast<double>(counts[j]) / n;
  }
  out.frequencies.null_mass = static_cast<double>(nulls) / n;
  out.all = all.stats();
  out.truthful = truthful.stats();
  out.bottom = bottom.stats();
  return out;
}

EmpiricalResult empirical_distribution(const MechanismSpec& mech,
                                       const ValuationProfile& profile,
                                       std::size_t trials, std::uint64_t seed,
                                       std::size_t workers) {
  return summarize(run_trials(mech, profile, trials, seed, workers),
                   profile.num_outcomes());
}

std::string ToString(AuditKind kind) {
  switch (kind) {
    case AuditKind::kRobustness:
      return "robustness";
    case AuditKind::kTruthfulness:
      return "truthfulness";
    case AuditKind::kParticipation:
      return "participation";
    case AuditKind::kApproximation:
      return "approximation";
    case AuditKind::kVerification:
      return "verification";
  }
  return "unknown";
}

Json audit_to_json(const AuditReport& report) {
  Json j;
  j["kind"] = ToString(report.kind);
  j["statistic"] = report.statistic;
  j["threshold"] = report.threshold;
  j["trials"] = report.trials;
  j["pass"] = report.pass;
  j["witness"] = report.witness ? *report.witness : Json(nullptr);
  return j;
}

AuditReport robustness_audit(const MechanismSpec& mech,
                             const ValuationProfile& profile,
                             std::size_t trials, std::uint64_t seed,
                             double threshold, std::size_t workers) {
  const Allocation target =
      evaluate_rule(mech.rule, weight_vector(truthful_part(profile)));
  const EmpiricalResult emp =
      empirical_distribution(mech, profile, trials, seed, workers);
  AuditReport report;
  report.kind = AuditKind::kRobustness;
  report.statistic = tv_distance(emp.frequencies, target);
  report.threshold = threshold;
  report.trials = trials;
  report.pass = report.statistic <= threshold;
  if (!report.pass) report.witness = AllocationWitness(emp.frequencies, target);
  return report;
}

AuditReport truthfulness_audit(const MechanismSpec& mech,
                               const ValuationProfile& profile,
                               std::size_t agent, const LiarSpec& lie,
                               std::size_t trials, std::uint64_t seed,
                               std::size_t workers) {
  const std::size_t row = profile.row_of(agent);
  if (!profile.is_truthful(row)) {
    throw std::invalid_argument("audited agent must be truthful in profile");
  }
  if (lie.agents.size() != 1 || lie.agents[0] != agent) {
    throw std::invalid_argument("lie must mutate exactly the audited agent");
  }
  const ValuationProfile lying = apply_liars(profile, lie);
  const auto true_row = profile.truth().row(row);
  const StatsAccumulator honest =
      Utilities(run_trials(mech, profile, trials, seed, workers), true_row);
  const StatsAccumulator dishonest = Utilities(
      run_trials(mech, lying, trials, seed ^ 0x9e3779b97f4a7c15ULL, workers),
      true_row);

  AuditReport report;
  report.kind = AuditKind::kTruthfulness;
  report.trials = trials;
  const double eps = participation_bound(mech.rule, profile.num_outcomes());
  const double u_t = honest.mean();
  const double u_l = dishonest.mean();
  Json witness;
  witness["truthful_utility"] = u_t;
  witness["lying_utility"] = u_l;
  if (u_l <= 0.0) {
    // Lying gains nothing; the ratio is unbounded.
    report.statistic = kInf;
    report.threshold = eps;
    report.pass = true;
    report.witness = witness;
    return report;
  }
  const double ratio = u_t / u_l;
  const double n = static_cast<double>(trials);
  double rel_var = dishonest.variance() / (n * u_l * u_l);
  if (u_t > 0.0) rel_var += honest.variance() / (n * u_t * u_t);
  const double sigma = u_t > 0.0 ? ratio * std::sqrt(rel_var)
                                 : std::sqrt(honest.variance() / n) / u_l;
  report.statistic = ratio;
  report.threshold = eps - 3.0 * sigma;
  report.pass = ratio >= report.threshold;
  witness["sigma"] = sigma;
  report.witness = witness;
  return report;
}

AuditReport participation_audit(const RuleSpec& rule,
                                const std::vector<ValuationProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("no profiles to audit");
  AuditReport report;
  report.kind = AuditKind::kParticipation;
  report.statistic = kInf;
  report.threshold =
      participation_bound(rule, profiles.front().num_outcomes()) - 1e-9;
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const double bound =
        participation_bound(rule, profiles[p].num_outcomes()) - 1e-9;
    for (std::size_t row = 0; row < profiles[p].num_agents(); ++row) {
      const double margin = participation_margin(rule, profiles[p], row);
      if (margin < report.statistic) report.statistic = margin;
      if (margin < bound && !report.witness) {
        Json w;
        w["profile"] = p;
        w["agent"] = profiles[p].agent_ids()[row];
        w["margin"] = margin;
        w["bound"] = bound;
        report.witness = w;
      }
    }
  }
  report.pass = !report.witness.has_value();
  return report;
}

AuditReport approximation_audit(const RuleSpec& rule,
                                const std::vector<ValuationProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("no profiles to audit");
  AuditReport report;
  report.kind = AuditKind::kApproximation;
  const bool additive = rule.kind == RuleKind::kExponential;
  report.statistic = additive ? -kInf : kInf;
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const WeightVector w = weight_vector(profiles[p], /*use_truth=*/true);
    const std::size_t m = w.size();
    const Allocation f = evaluate_rule(rule, w);
    const double opt = *std::max_element(w.begin(), w.end());
    double value, bound;
    bool bad;
    if (additive) {
      value = opt - expected_welfare(w, f);
      bound = additive_error_bound(rule, m) + 1e-9;
      report.statistic = std::max(report.statistic, value);
      bad = value > bound;
    } else {
      if (opt == 0.0) continue;
      value = approximation_ratio(w, f);
      bound = approximation_bound(rule, m) - 1e-12;
      report.statistic = std::min(report.statistic, value);
      bad = value < bound;
    }
    report.threshold = bound;
    if (bad && !report.witness) {
      Json j;
      j["profile"] = p;
      j["value"] = value;
      j["bound"] = bound;
      report.witness = j;
    }
  }
  report.pass = !report.witness.has_value();
  return report;
}

AuditReport verification_audit(const MechanismSpec& mech,
                               const ValuationProfile& profile,
                               std::size_t trials, std::uint64_t seed,
                               std::size_t workers) {
  for (std::size_t row = 0; row < profile.num_agents(); ++row) {
    if (!profile.is_truthful(row)) {
      throw std::invalid_argument(
          "verification is audited on truthful profiles only");
    }
  }
  const EmpiricalResult emp =
      empirical_distribution(mech, profile, trials, seed, workers);
  AuditReport report;
  report.kind = AuditKind::kVerification;
  report.trials = trials;
  const RuleSpec& rule = mech.rule;
  switch (rule.kind) {
    case RuleKind::kUniform:
      report.statistic = static_cast<double>(emp.all.max);
      report.threshold = 0.0;
      break;
    case RuleKind::kPower:
      report.statistic = static_cast<double>(emp.all.max);
      report.threshold = rule.power;
      break;
    case RuleKind::kPartialPower:
      report.statistic = static_cast<double>(emp.truthful.max);
      report.threshold = rule.repetitions * (rule.power + 1) + rule.power;
      break;
    case RuleKind::kExponential: {
      const WeightVector w = weight_vector(profile);
      const double linf = *std::max_element(w.begin(), w.end());
      report.statistic = emp.all.mean;
      report.threshold =
          linf / rule.alpha +
          3.0 * emp.all.stddev / std::sqrt(static_cast<double>(trials));
      break;
    }
  }
  report.pass = report.statistic <= report.threshold;
  Json w;
  w["mean"] = emp.all.mean;
  w["max"] = emp.all.max;
  w["bottom_runs"] = emp.bottom.runs;
  report.witness = w;
  return report;
}

RuleSpec with_parameter(const RuleSpec& family, double parameter) {
  switch (family.kind) {
    case RuleKind::kUniform:
      return RuleSpec::Uniform();
    case RuleKind::kPower:
      return RuleSpec::Power(static_cast<int>(std::lround(parameter)));
    case RuleKind::kPartialPower:
      return RuleSpec::PartialPower(static_cast<int>(std::lround(parameter)),
                                    family.repetitions);
    case RuleKind::kExponential:
      return RuleSpec::Exponential(parameter);
  }
  throw std::logic_error("unhandled rule kind");
}

std::vector<TradeoffRow> tradeoff_sweep(
    const RuleSpec& family, const std::vector<ValuationProfile>& profiles,
    const std::vector<double>& grid, std::size_t trials, std::uint64_t seed,
    std::size_t workers) {
  if (grid.empty()) throw std::invalid_argument("parameter grid is empty");
  if (profiles.empty()) throw std::invalid_argument("no profiles to sweep");
  std::vector<TradeoffRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const RuleSpec rule = with_parameter(family, grid[g]);
    rule.Validate();
    TradeoffRow row;
    row.parameter = grid[g];
    row.bound = approximation_bound(rule, profiles.front().num_outcomes());
    row.analytic_ratio = kInf;
    double ratio_sum = 0.0, verified_sum = 0.0, null_sum = 0.0;
    std::size_t ratio_count = 0;
    for (std::size_t p = 0; p < profiles.size(); ++p) {
      const WeightVector w = weight_vector(profiles[p], /*use_truth=*/true);
      const double opt = *std::max_element(w.begin(), w.end());
      const Allocation f = evaluate_rule(rule, w);
      row.additive_gap =
          std::max(row.additive_gap, opt - expected_welfare(w, f));
      null_sum += f.null_mass;
      const std::uint64_t run_seed = mix64(seed ^ mix64(g * 1000003ULL + p));
      const EmpiricalResult emp = empirical_distribution(
          MechanismSpec::Of(rule), profiles[p], trials, run_seed, workers);
      verified_sum += emp.all.mean;
      row.max_verified = std::max(row.max_verified, emp.all.max);
      if (opt > 0.0) {
        row.analytic_ratio =
            std::min(row.analytic_ratio, approximation_ratio(w, f));
        ratio_sum += expected_welfare(w, emp.frequencies) / opt;
        ++ratio_count;
      }
    }
    const double n = static_cast<double>(profiles.size());
    row.measured_ratio = ratio_count ? ratio_sum / double(ratio_count) : 0.0;
    row.mean_verified = verified_sum / n;
    row.null_mass = null_sum / n;
    rows.push_back(row);
  }
  return rows;
}

std::string tradeoff_csv(const std::vector<TradeoffRow>& rows) {
  std::string out =
      "parameter,bound,analytic_ratio,measured_ratio,mean_verified,"
      "max_verified,null_mass,additive_gap\n";
  for (const auto& r : rows) {
    out += FormatDouble(r.parameter) + "," + FormatDouble(r.bound) + "," +
           FormatDouble(r.analytic_ratio) + "," +
           FormatDouble(r.measured_ratio) + "," +
           FormatDouble(r.mean_verified) + "," +
           std::to_string(r.max_verified) + "," + FormatDouble(r.null_mass) +
           "," + FormatDouble(r.additive_gap) + "\n";
  }
  return out;
}

}  // namespace selver
