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

// JSON file formats.
//
// Profile:  {"m": 3, "reported": [[...], ...], "truth": [[...], ...]}
//           ("truth" defaults to "reported").
// Instance: {"points": [...], "dist": [[...]] or {"line": [x_0, ...]},
//            "agents_true": [...], "agents_reported": [...], "k": 2}
//           Agent locations are indices into "points"; "agents_reported"
//           defaults to "agents_true".

#ifndef SELVER_IO_H_
#define SELVER_IO_H_

#include <string>

#include "json.hpp"
#include "selver/core.h"
#include "selver/facility.h"
#include "selver/mechanisms.h"

namespace selver {

using Json = nlohmann::ordered_json;

// Throw std::invalid_argument on malformed input.
ValuationProfile profile_from_json(const Json& j);
Json profile_to_json(const ValuationProfile& profile);

MetricInstance instance_from_json(const Json& j);
Json instance_to_json(const MetricInstance& instance);

Json allocation_to_json(const Allocation& a);
// {outcome, null, bot_resolved, verified, liars_caught, depth}
Json result_to_json(const MechanismResult& r);
Json result_to_json(const FacilityResult& r);

// Throws std::runtime_error when the file cannot be read or parsed.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace selver

#endif  // SELVER_IO_H_
