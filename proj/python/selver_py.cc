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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "selver/allocations.h"
#include "selver/analysis.h"
#include "selver/core.h"
#include "selver/facility.h"
#include "selver/instances.h"
#include "selver/io.h"
#include "selver/mechanisms.h"

namespace py = pybind11;

namespace {

using Rows = std::vector<std::vector<double>>;

selver::Matrix ToMatrix(const Rows& rows, std::size_t m) {
  return selver::Matrix::FromRows(rows, m);
}

std::size_t Columns(const Rows& rows, std::optional<std::size_t> m) {
  if (m) return *m;
  if (rows.empty()) throw py::value_error("empty profile needs m");
  return rows.front().size();
}

selver::ValuationProfile MakeProfile(const Rows& reported,
                                     const std::optional<Rows>& truth,
                                     std::optional<std::size_t> m) {
  const std::size_t cols = Columns(reported, m);
  selver::Matrix rep = ToMatrix(reported, cols);
  selver::Matrix tru = truth ? ToMatrix(*truth, cols) : rep;
  return selver::ValuationProfile(std::move(rep), std::move(tru));
}

py::dict AllocationDict(const selver::Allocation& a) {
  py::dict d;
  d["probs"] = a.probs;
  d["null"] = a.null_mass;
  return d;
}

py::dict ResultDict(const selver::MechanismResult& r) {
  py::dict d;
  d["outcome"] = r.outcome ? py::object(py::int_(*r.outcome)) : py::none();
  d["bot_resolved"] = r.bot_resolved;
  d["verified"] = r.verified;
  d["liars_caught"] = r.liars_caught;
  d["depth"] = r.recursion_depth;
  return d;
}

selver::MetricInstance LineInstance(
    const std::vector<double>& coords,
    const std::vector<std::size_t>& agents_true,
    std::optional<std::vector<std::size_t>> agents_reported, std::size_t k) {
  return selver::MetricInstance::OnLine(
      coords, agents_true, agents_reported.value_or(agents_true), k);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mechanisms with selective verification";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::domain_error& e) {
      PyErr_SetString(PyExc_ArithmeticError, e.what());
    }
  });

  m.def(
      "weight_vector",
      [](const Rows& reported, std::optional<std::size_t> outcomes) {
        return selver::weight_vector(
            MakeProfile(reported, std::nullopt, outcomes));
      },
      py::arg("rows"), py::arg("m") = py::none());

  m.def(
      "allocation",
      [](const std::string& rule, const std::vector<double>& w) {
        return AllocationDict(
            selver::evaluate_rule(selver::ParseRuleSpec(rule), w));
      },
      py::arg("rule"), py::arg("w"),
      "Closed-form allocation of a rule such as 'power:3' or 'partial:2:4'.");

  m.def(
      "tv_distance",
      [](const std::vector<double>& a, double a_null,
         const std::vector<double>& b, double b_null) {
        return selver::tv_distance({a, a_null}, {b, b_null});
      },
      py::arg("a"), py::arg("a_null"), py::arg("b"), py::arg("b_null"));

  m.def(
      "bot_probabilities",
      [](const std::vector<double>& w, const std::vector<double>& w_t, int l,
         int r) {
        const selver::BotProbabilities b =
            selver::bot_probabilities(w, w_t, l, r);
        py::dict d;
        d["p"] = b.p;
        d["p_null"] = b.p_null;
        d["rho"] = b.rho;
        d["pr_bot"] = b.pr_bot;
        return d;
      },
      py::arg("w"), py::arg("w_truthful"), py::arg("l"), py::arg("r"));

  m.def(
      "run",
      [](const std::string& mechanism, const Rows& reported,
         const std::optional<Rows>& truth, std::uint64_t seed,
         std::uint64_t stream, std::optional<std::size_t> outcomes) {
        selver::RngStream rng(seed, stream);
        return ResultDict(
            selver::run_mechanism(selver::ParseMechanismSpec(mechanism),
                                  MakeProfile(reported, truth, outcomes), rng));
      },
      py::arg("mechanism"), py::arg("reported"), py::arg("truth") = py::none(),
      py::arg("seed") = 0, py::arg("stream") = 0, py::arg("m") = py::none());

  m.def(
      "empirical_distribution",
      [](const std::string& mechanism, const Rows& reported,
         const std::optional<Rows>& truth, std::size_t trials,
         std::uint64_t seed, std::size_t workers,
         std::optional<std::size_t> outcomes) {
        const selver::EmpiricalResult e = selver::empirical_distribution(
            selver::ParseMechanismSpec(mechanism),
            MakeProfile(reported, truth, outcomes), trials, seed, workers);
        py::dict d = AllocationDict(e.frequencies);
        d["mean_verified"] = e.all.mean;
        d["max_verified"] = e.all.max;
        return d;
      },
      py::arg("mechanism"), py::arg("reported"), py::arg("truth") = py::none(),
      py::arg("trials") = 10000, py::arg("seed") = 0, py::arg("workers") = 1,
      py::arg("m") = py::none());

  m.def(
      "robustness_audit",
      [](const std::string& mechanism, const Rows& reported,
         const std::optional<Rows>& truth, std::size_t trials,
         std::uint64_t seed, double threshold, std::size_t workers) {
        const selver::AuditReport a =
            selver::robustness_audit(selver::ParseMechanismSpec(mechanism),
                                     MakeProfile(reported, truth, std::nullopt),
                                     trials, seed, threshold, workers);
        return selver::audit_to_json(a).dump();
      },
      py::arg("mechanism"), py::arg("reported"), py::arg("truth") = py::none(),
      py::arg("trials") = 200000, py::arg("seed") = 0,
      py::arg("threshold") = selver::kDefaultTvThreshold,
      py::arg("workers") = 1, "Returns the audit report as a JSON string.");

  m.def(
      "participation_margin",
      [](const std::string& rule, const Rows& rows, std::size_t agent) {
        return selver::participation_margin(
            selver::ParseRuleSpec(rule),
            MakeProfile(rows, std::nullopt, std::nullopt), agent);
      },
      py::arg("rule"), py::arg("rows"), py::arg("agent"));

  m.def(
      "lower_bound_instance",
      [](std::size_t outcomes, std::size_t nu, double delta,
         std::uint64_t seed) {
        selver::RngStream rng(seed, selver::hash_label("gen"));
        return selver::lower_bound_instance(outcomes, nu, delta, rng)
            .reported()
            .ToRows();
      },
      py::arg("m"), py::arg("nu"), py::arg("delta") = 1e-6,
      py::arg("seed") = 0);

  m.def(
      "greedy_on_line",
      [](const std::vector<double>& coords,
         const std::vector<std::size_t>& agents_true,
         std::optional<std::vector<std::size_t>> agents_reported,
         std::size_t k) {
        const auto inst =
            LineInstance(coords, agents_true, std::move(agents_reported), k);
        selver::VerificationOracle oracle(inst.truth_bits());
        selver::RngStream rng;
        const auto r = selver::run_greedy(inst, oracle, rng);
        return std::make_pair(r.facilities, r.verified);
      },
      py::arg("coords"), py::arg("agents_true"),
      py::arg("agents_reported") = py::none(), py::arg("k"),
      "Returns (facility points, verified agents).");

  m.def(
      "proportional_distribution_on_line",
      [](const std::vector<double>& coords,
         const std::vector<std::size_t>& agents, std::size_t k) {
        const auto inst = LineInstance(coords, agents, std::nullopt, k);
        py::dict out;
        for (const auto& [set, p] :
             selver::proportional_distribution(agents, k, inst.dist)) {
          out[py::tuple(py::cast(set))] = p;
        }
        return out;
      },
      py::arg("coords"), py::arg("agents"), py::arg("k"));
}
