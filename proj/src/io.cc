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

#include "selver/io.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace selver {
namespace {

Matrix MatrixFromJson(const Json& rows, std::size_t cols, const char* what) {
  if (!rows.is_array()) {
    throw std::invalid_argument(std::string(what) + " must be an array");
  }
  std::vector<std::vector<double>> data;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != cols) {
      throw std::invalid_argument(std::string(what) + " rows must have " +
                                  std::to_string(cols) + " numbers");
    }
    std::vector<double>& out = data.emplace_back();
    for (const auto& v : row) {
      if (!v.is_number()) {
        throw std::invalid_argument(std::string(what) + " entry not a number");
      }
      out.push_back(v.get<double>());
    }
  }
  return Matrix::FromRows(data, cols);
}

std::vector<std::size_t> IndexList(const Json& j, const char* what) {
  if (!j.is_array()) {
    throw std::invalid_argument(std::string(what) + " must be an array");
  }
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) {
      throw std::invalid_argument(std::string(what) +
                                  " entries must be nonnegative integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

Json OutcomeJson(const std::optional<std::size_t>& outcome) {
  return outcome ? Json(*outcome) : Json(nullptr);
}

}  // namespace

ValuationProfile profile_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("m") || !j.contains("reported")) {
    throw std::invalid_argument("profile needs \"m\" and \"reported\"");
  }
  if (!j["m"].is_number_unsigned()) {
    throw std::invalid_argument("\"m\" must be a nonnegative integer");
  }
  const std::size_t m = j["m"].get<std::size_t>();
  Matrix reported = MatrixFromJson(j["reported"], m, "reported");
  Matrix truth = j.contains("truth") ? MatrixFromJson(j["truth"], m, "truth")
                                     : reported;
  return ValuationProfile(std::move(reported), std::move(truth));
}

Json profile_to_json(const ValuationProfile& profile) {
  Json j;
  j["m"] = profile.num_outcomes();
  j["reported"] = profile.reported().ToRows();
  j["truth"] = profile.truth().ToRows();
  return j;
}

MetricInstance instance_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("instance must be an object");
  for (const char* key : {"dist", "agents_true", "k"}) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("instance needs \"") + key +
                                  "\"");
    }
  }
  if (!j["k"].is_number_unsigned()) {
    throw std::invalid_argument("\"k\" must be a positive integer");
  }
  std::vector<std::size_t> agents_true = IndexList(j["agents_true"],
                                                   "agents_true");
  std::vector<std::size_t> agents_reported =
      j.contains("agents_reported")
          ? IndexList(j["agents_reported"], "agents_reported")
          : agents_true;
  const std::size_t k = j["k"].get<std::size_t>();

  MetricInstance inst;
  const Json& d = j["dist"];
  if (d.is_object()) {
    if (!d.contains("line") || !d["line"].is_array()) {
      throw std::invalid_argument("\"dist\" object needs a \"line\" array");
    }
    std::vector<double> coords;
    for (const auto& v : d["line"]) {
      if (!v.is_number()) {
        throw std::invalid_argument("line coordinates must be numbers");
      }
      coords.push_back(v.get<double>());
    }
    inst = MetricInstance::OnLine(coords, agents_true, agents_reported, k);
  } else {
    const std::size_t p = d.is_array() ? d.size() : 0;
    inst.dist = MatrixFromJson(d, p, "dist");
    inst.agents_true = std::move(agents_true);
    inst.agents_reported = std::move(agents_reported);
    inst.k = k;
    inst.points.resize(p);
    for (std::size_t a = 0; a < p; ++a) inst.points[a] = std::to_string(a);
  }
  if (j.contains("points")) {
    const Json& pts = j["points"];
    if (!pts.is_array() || pts.size() != inst.dist.rows()) {
      throw std::invalid_argument("\"points\" must list one label per point");
    }
    for (std::size_t a = 0; a < pts.size(); ++a) {
      inst.points[a] = pts[a].is_string() ? pts[a].get<std::string>()
                                          : pts[a].dump();
    }
  }
  inst.Validate();
  return inst;
}

Json instance_to_json(const MetricInstance& instance) {
  Json j;
  j["points"] = instance.points;
  j["dist"] = instance.dist.ToRows();
  j["agents_true"] = instance.agents_true;
  j["agents_reported"] = instance.agents_reported;
  j["k"] = instance.k;
  return j;
}

Json allocation_to_json(const Allocation& a) {
  Json j;
  j["probs"] = a.probs;
  j["null"] = a.null_mass;
  return j;
}

Json result_to_json(const MechanismResult& r) {
  Json j;
  j["outcome"] = OutcomeJson(r.outcome);
  j["null"] = r.is_null();
  j["bot_resolved"] = r.bot_resolved;
  j["verified"] = r.verified;
  j["liars_caught"] = r.liars_caught;
  j["depth"] = r.recursion_depth;
  return j;
}

Json result_to_json(const FacilityResult& r) {
  Json j;
  j["facilities"] = r.facilities;
  j["verified"] = r.verified;
  j["liars_caught"] = r.liars_caught;
  j["depth"] = r.recursion_depth;
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace selver
