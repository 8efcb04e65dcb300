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

// selver: experiment runner.
//
//   selver alloc     --mechanism power --l 1 --profile p.json
//   selver simulate  --mechanism partial --l 2 --r 4 --profile p.json
//                    --trials 100000 --seed 7 --out trials.csv
//   selver audit     --kind robustness --mechanism exp --alpha 0.5
//                    --profile p.json
//   selver facility  --mechanism proportional --instance i.json
//   selver tradeoff  --mechanism power --grid 0:20 --m 8 --out sweep.csv
//   selver gen       --kind lower-bound --m 8 --seed 3 --out p.json
//
// Exit codes: 0 success or audit pass, 1 audit or consistency failure,
// 2 usage or I/O error. --config FILE.json overrides flags of the same name.

#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selver/allocations.h"
#include "selver/analysis.h"
#include "selver/core.h"
#include "selver/facility.h"
#include "selver/instances.h"
#include "selver/io.h"
#include "selver/mechanisms.h"

namespace {

using selver::Json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string mechanism = "power";
  int l = 1;
  int r = 2;
  double alpha = 1.0;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::string out;
  double threshold = selver::kDefaultTvThreshold;
  std::size_t parallel = 1;
  std::string config;

  std::vector<std::string> profiles;
  std::string instance;
  std::string kind;
  std::size_t agent = 0;
  std::vector<std::size_t> liars;
  std::string lie = "scale:2";
  std::size_t random_profiles = 0;
  std::size_t n = 5;
  std::size_t m = 4;
  std::string shape = "uniform01";
  std::string grid;
  std::size_t nu = 0;
  double delta = 1e-6;
  double big = 10.0;
  std::size_t points = 8;
  std::size_t k = 2;
  std::size_t resources = 4;
  bool distinct = false;
};

// Overlays keys of a JSON object on the parsed flags.
void ApplyConfig(RunConfig& c) {
  if (c.config.empty()) return;
  const Json j = selver::read_json_file(c.config);
  if (!j.is_object()) throw UsageError("--config must hold a JSON object");
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      field = j[key].get<std::remove_reference_t<decltype(field)>>();
    }
  };
  take("mechanism", c.mechanism);
  take("l", c.l);
  take("r", c.r);
  take("alpha", c.alpha);
  take("trials", c.trials);
  take("seed", c.seed);
  take("out", c.out);
  take("threshold", c.threshold);
  take("parallel", c.parallel);
  take("profile", c.profiles);
  take("instance", c.instance);
  take("kind", c.kind);
  take("agent", c.agent);
  take("liars", c.liars);
  take("lie", c.lie);
  take("random_profiles", c.random_profiles);
  take("n", c.n);
  take("m", c.m);
  take("shape", c.shape);
  take("grid", c.grid);
  take("nu", c.nu);
  take("delta", c.delta);
  take("big", c.big);
  take("points", c.points);
  take("k", c.k);
  take("resources", c.resources);
  take("distinct", c.distinct);
}

// "power" plus --l, or a full spec such as "partial:2:4" or "leaky:3".
selver::MechanismSpec Mechanism(const RunConfig& c) {
  if (c.mechanism.find(':') != std::string::npos) {
    return selver::ParseMechanismSpec(c.mechanism);
  }
  const std::string& name = c.mechanism;
  if (name == "uniform") return selver::MechanismSpec::Of({});
  if (name == "power") {
    return selver::MechanismSpec::Of(selver::RuleSpec::Power(c.l));
  }
  if (name == "partial" || name == "partial_power") {
    return selver::MechanismSpec::Of(selver::RuleSpec::PartialPower(c.l, c.r));
  }
  if (name == "exp" || name == "exponential") {
    return selver::MechanismSpec::Of(selver::RuleSpec::Exponential(c.alpha));
  }
  if (name == "leaky") return selver::MechanismSpec::LeakyPower(c.l);
  throw UsageError("unknown mechanism '" + name + "'");
}

selver::ValuationProfile LoadProfile(const std::string& path) {
  return selver::profile_from_json(selver::read_json_file(path));
}

std::vector<selver::ValuationProfile> Profiles(const RunConfig& c) {
  std::vector<selver::ValuationProfile> out;
  for (const auto& path : c.profiles) out.push_back(LoadProfile(path));
  selver::RngStream rng(c.seed, selver::hash_label("profiles"));
  const selver::ProfileShape shape = selver::ParseProfileShape(c.shape);
  for (std::size_t i = 0; i < c.random_profiles; ++i) {
    out.push_back(selver::random_profile(c.n, c.m, shape, rng));
  }
  if (out.empty()) {
    throw UsageError("no profiles: pass --profile or --random-profiles");
  }
  return out;
}

selver::ValuationProfile SingleProfile(const RunConfig& c) {
  if (c.profiles.size() != 1) {
    throw UsageError("this command needs exactly one --profile");
  }
  return LoadProfile(c.profiles.front());
}

void Emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
  } else {
    selver::write_text_file(c.out, text);
  }
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

int CmdAlloc(const RunConfig& c) {
  const selver::MechanismSpec mech = Mechanism(c);
  const selver::ValuationProfile profile = SingleProfile(c);
  const selver::WeightVector w = selver::weight_vector(profile);
  const selver::Allocation a = selver::evaluate_rule(mech.rule, w);
  Json j = selver::allocation_to_json(a);
  j["rule"] = mech.rule.ToString();
  j["welfare"] = selver::expected_welfare(w, a);
  double mx = 0.0;
  for (double v : w) mx = std::max(mx, v);
  j["ratio"] = mx > 0.0 ? Json(selver::approximation_ratio(w, a)) : Json();
  Emit(c, Dump(j));
  return kExitPass;
}

std::string Ids(const std::vector<std::size_t>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(ids[i]);
  }
  return s;
}

// Invariants every result must satisfy; returns false on violation.
bool Consistent(const selver::MechanismResult& r,
                const selver::ValuationProfile& profile, bool all_truthful) {
  for (std::size_t id : r.liars_caught) {
    if (std::find(r.verified.begin(), r.verified.end(), id) ==
        r.verified.end()) {
      return false;
    }
  }
  if (r.oracle_calls != r.verified.size()) return false;
  if (r.outcome && *r.outcome >= profile.num_outcomes()) return false;
  if (all_truthful &&
      (!r.liars_caught.empty() || r.recursion_depth != 0 || r.bot_resolved)) {
    return false;
  }
  return true;
}

int CmdSimulate(const RunConfig& c) {
  const selver::MechanismSpec mech = Mechanism(c);
  const selver::ValuationProfile profile = SingleProfile(c);
  const auto results =
      selver::run_trials(mech, profile, c.trials, c.seed, c.parallel);
  bool all_truthful = true;
  for (std::size_t row = 0; row < profile.num_agents(); ++row) {
    all_truthful = all_truthful && profile.is_truthful(row);
  }
  std::ostringstream csv;
  csv << "trial,outcome,null,bot_resolved,num_verified,verified,"
         "liars_caught,depth\n";
  bool ok = true;
  for (std::size_t t = 0; t < results.size(); ++t) {
    const auto& r = results[t];
    ok = ok && Consistent(r, profile, all_truthful);
    csv << t << ',' << (r.outcome ? std::to_string(*r.outcome) : "") << ','
        << (r.is_null() ? 1 : 0) << ',' << (r.bot_resolved ? 1 : 0) << ','
        << r.verified.size() << ',' << Ids(r.verified) << ','
        << Ids(r.liars_caught) << ',' << r.recursion_depth << '\n';
  }
  const selver::EmpiricalResult emp =
      selver::summarize(results, profile.num_outcomes());
  Json summary;
  summary["mechanism"] = mech.ToString();
  summary["trials"] = c.trials;
  summary["seed"] = c.seed;
  summary["frequencies"] = selver::allocation_to_json(emp.frequencies);
  auto stats = [](const selver::VerificationStats& s) {
    Json j;
    j["runs"] = s.runs;
    j["mean"] = s.mean;
    j["stddev"] = s.stddev;
    j["max"] = s.max;
    return j;
  };
  summary["verified"] = stats(emp.all);
  summary["verified_truthful_path"] = stats(emp.truthful);
  summary["verified_bottom_path"] = stats(emp.bottom);
  Json hist = Json::object();
  for (const auto& [count, trials] : emp.liars_caught_histogram) {
    hist[std::to_string(count)] = trials;
  }
  summary["liars_caught_histogram"] = hist;
  summary["consistent"] = ok;
  if (c.out.empty()) {
    std::cout << Dump(summary);
  } else {
    selver::write_text_file(c.out, csv.str());
    std::cout << Dump(summary);
  }
  return ok ? kExitPass : kExitFail;
}

int CmdAudit(const RunConfig& c) {
  const selver::MechanismSpec mech = Mechanism(c);
  selver::AuditReport report;
  if (c.kind == "robustness") {
    report = selver::robustness_audit(mech, SingleProfile(c), c.trials, c.seed,
                                      c.threshold, c.parallel);
  } else if (c.kind == "truthfulness") {
    report = selver::truthfulness_audit(mech, SingleProfile(c), c.agent,
                                        selver::ParseLie(c.lie, {c.agent}),
                                        c.trials, c.seed, c.parallel);
  } else if (c.kind == "participation") {
    report = selver::participation_audit(mech.rule, Profiles(c));
  } else if (c.kind == "approximation") {
    report = selver::approximation_audit(mech.rule, Profiles(c));
  } else if (c.kind == "verification") {
    report = selver::verification_audit(mech, SingleProfile(c), c.trials,
                                        c.seed, c.parallel);
  } else {
    throw UsageError("unknown audit kind '" + c.kind + "'");
  }
  Json j = selver::audit_to_json(report);
  j["mechanism"] = mech.ToString();
  Emit(c, Dump(j));
  return report.pass ? kExitPass : kExitFail;
}

int CmdFacility(const RunConfig& c) {
  if (c.instance.empty()) throw UsageError("facility needs --instance");
  const selver::MetricInstance inst =
      selver::instance_from_json(selver::read_json_file(c.instance));
  const bool greedy = c.mechanism == "greedy";
  if (!greedy && c.mechanism != "proportional") {
    throw UsageError("facility mechanism must be greedy or proportional");
  }
  const selver::MetricInstance truthful = selver::truthful_only(inst);
  const auto& home = truthful.agents_true;
  std::map<std::vector<std::size_t>, std::size_t> counts;
  double verified = 0.0, max_c = 0.0, social_c = 0.0;
  std::size_t max_verified = 0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    selver::RngStream rng(c.seed, t);
    selver::VerificationOracle oracle(inst.truth_bits());
    const selver::FacilityResult r =
        greedy ? selver::run_greedy(inst, oracle, rng)
               : selver::run_proportional(inst, oracle, rng);
    ++counts[r.facilities];
    verified += static_cast<double>(r.verified.size());
    max_verified = std::max(max_verified, r.verified.size());
    max_c += selver::max_cost(home, r.facilities, inst.dist);
    social_c += selver::social_cost(home, r.facilities, inst.dist);
  }
  const double n = static_cast<double>(c.trials);
  Json j;
  j["mechanism"] = c.mechanism;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  Json dist = Json::array();
  for (const auto& [set, count] : counts) {
    Json e;
    e["facilities"] = set;
    e["frequency"] = static_cast<double>(count) / n;
    dist.push_back(e);
  }
  j["distribution"] = dist;
  j["mean_verified"] = verified / n;
  j["max_verified"] = max_verified;
  j["mean_max_cost"] = max_c / n;
  j["mean_social_cost"] = social_c / n;
  if (inst.num_points() <= 16 && (inst.k <= 4 || inst.k >= inst.num_points())) {
    const auto kc = selver::brute_force_kcenter(home, inst.k, inst.dist);
    const auto km = selver::brute_force_kmedian(home, inst.k, inst.dist);
    j["opt_max_cost"] = kc.cost;
    j["opt_max_cost_facilities"] = kc.facilities;
    j["opt_social_cost"] = km.cost;
    j["opt_social_cost_facilities"] = km.facilities;
  }
  Emit(c, Dump(j));
  return kExitPass;
}

std::vector<double> ParseGrid(const std::string& text) {
  std::vector<double> grid;
  if (text.empty()) throw UsageError("tradeoff needs --grid");
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const int lo = std::stoi(text.substr(0, colon));
    const int hi = std::stoi(text.substr(colon + 1));
    for (int v = lo; v <= hi; ++v) grid.push_back(v);
    return grid;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
  return grid;
}

int CmdTradeoff(const RunConfig& c) {
  const selver::MechanismSpec mech = Mechanism(c);
  RunConfig with_default = c;
  if (with_default.profiles.empty() && with_default.random_profiles == 0) {
    with_default.random_profiles = 20;
  }
  const auto rows = selver::tradeoff_sweep(
      mech.rule, Profiles(with_default), ParseGrid(c.grid), c.trials, c.seed,
      c.parallel);
  Emit(c, selver::tradeoff_csv(rows));
  return kExitPass;
}

int CmdGen(const RunConfig& c) {
  selver::RngStream rng(c.seed, selver::hash_label("gen"));
  Json j;
  if (c.kind == "lower-bound") {
    const std::size_t nu = c.nu ? c.nu : selver::default_group_size(c.m);
    j = selver::profile_to_json(
        selver::lower_bound_instance(c.m, nu, c.delta, rng));
  } else if (c.kind == "single-minded") {
    j = selver::profile_to_json(selver::single_minded_instance(c.m, c.big));
  } else if (c.kind == "random") {
    selver::ValuationProfile p = selver::random_profile(
        c.n, c.m, selver::ParseProfileShape(c.shape), rng);
    if (!c.liars.empty()) {
      p = selver::apply_liars(p, selver::ParseLie(c.lie, c.liars));
    }
    j = selver::profile_to_json(p);
  } else if (c.kind == "cppp") {
    selver::CpppSpec spec{c.resources, c.k, {}};
    Json targets = Json::array();
    for (std::size_t i = 0; i < c.n; ++i) {
      std::vector<std::size_t> target;
      for (std::size_t x = 0; x < c.resources; ++x) {
        if (rng.uniform() < 0.5) target.push_back(x);
      }
      targets.push_back(target);
      spec.value_oracles.push_back(selver::coverage_valuation(target));
    }
    const selver::CpppProfile cp = selver::cppp_profile(spec);
    j = selver::profile_to_json(cp.profile);
    j["labels"] = cp.labels;
    j["targets"] = targets;
  } else if (c.kind == "line" || c.kind == "graph") {
    selver::MetricInstance inst =
        c.kind == "line"
            ? selver::random_line_instance(c.n, c.points, c.k, c.distinct, rng)
            : selver::random_graph_instance(c.n, c.points, c.k, c.distinct,
                                            rng);
    j = selver::instance_to_json(inst);
  } else {
    throw UsageError("unknown generator '" + c.kind + "'");
  }
  Emit(c, Dump(j));
  return kExitPass;
}

void AddCommon(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--mechanism", c.mechanism,
                  "uniform|power|partial|exp|leaky|greedy|proportional, or a "
                  "full spec such as partial:2:4");
  cmd->add_option("--l", c.l, "power l");
  cmd->add_option("--r", c.r, "Partial Power repetitions r");
  cmd->add_option("--alpha", c.alpha, "Exponential temperature");
  cmd->add_option("--trials", c.trials, "number of trials");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--out", c.out, "output file (stdout if omitted)");
  cmd->add_option("--threshold", c.threshold, "audit TV threshold");
  cmd->add_option("--parallel", c.parallel, "worker threads");
  cmd->add_option("--config", c.config, "JSON file overriding flags");
  cmd->add_option("--profile", c.profiles, "profile JSON file(s)");
  cmd->add_option("--random-profiles", c.random_profiles,
                  "number of random profiles to generate");
  cmd->add_option("--n", c.n, "agents");
  cmd->add_option("--m", c.m, "outcomes");
  cmd->add_option("--shape", c.shape, "uniform01|sparse:<p>|spiked");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mechanisms with selective verification"};
  app.require_subcommand(1);
  RunConfig c;

  CLI::App* alloc = app.add_subcommand("alloc", "closed-form allocation");
  CLI::App* simulate = app.add_subcommand("simulate", "run a mechanism");
  CLI::App* audit = app.add_subcommand("audit", "run an auditor");
  CLI::App* facility = app.add_subcommand("facility", "facility location");
  CLI::App* tradeoff = app.add_subcommand("tradeoff", "parameter sweep");
  CLI::App* gen = app.add_subcommand("gen", "generate an instance");
  for (CLI::App* cmd : {alloc, simulate, audit, facility, tradeoff, gen}) {
    AddCommon(cmd, c);
  }
  audit->add_option("--kind", c.kind,
                    "robustness|truthfulness|participation|approximation|"
                    "verification");
  audit->add_option("--agent", c.agent, "audited agent (truthfulness)");
  audit->add_option("--lie", c.lie, "scale:<c>|swap:<a>:<b>|constant:<v>");
  facility->add_option("--instance", c.instance, "instance JSON file");
  tradeoff->add_option("--grid", c.grid, "lo:hi integers or a,b,c values");
  gen->add_option("--kind", c.kind,
                  "lower-bound|single-minded|random|cppp|line|graph");
  gen->add_option("--nu", c.nu, "group size (lower-bound)");
  gen->add_option("--delta", c.delta, "small value (lower-bound)");
  gen->add_option("--big", c.big, "big value (single-minded)");
  gen->add_option("--liars", c.liars, "lying agents (random)");
  gen->add_option("--lie", c.lie, "lie applied to --liars");
  gen->add_option("--points", c.points, "metric points (line, graph)");
  gen->add_option("--k", c.k, "facilities or project size");
  gen->add_option("--resources", c.resources, "resources (cppp)");
  gen->add_flag("--distinct", c.distinct, "agents at distinct points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    ApplyConfig(c);
    if (alloc->parsed()) return CmdAlloc(c);
    if (simulate->parsed()) return CmdSimulate(c);
    if (audit->parsed()) return CmdAudit(c);
    if (facility->parsed()) return CmdFacility(c);
    if (tradeoff->parsed()) return CmdTradeoff(c);
    if (gen->parsed()) return CmdGen(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
