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

#include "selver/core.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace selver {

Matrix Matrix::FromRows(const std::vector<std::vector<double>>& rows,
                        std::size_t cols) {
  Matrix out(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw std::invalid_argument("row " + std::to_string(r) + " has " +
                                  std::to_string(rows[r].size()) +
                                  " entries, expected " + std::to_string(cols));
    }
    std::copy(rows[r].begin(), rows[r].end(), out.row(r).begin());
  }
  return out;
}

std::vector<std::vector<double>> Matrix::ToRows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto src = row(r);
    out[r].assign(src.begin(), src.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// ValuationProfile

namespace {

std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

}  // namespace

ValuationProfile::ValuationProfile(Matrix reported)
    : reported_(reported), truth_(std::move(reported)) {
  agent_ids_ = Iota(reported_.rows());
  Validate();
}

ValuationProfile::ValuationProfile(Matrix reported, Matrix truth)
    : reported_(std::move(reported)), truth_(std::move(truth)) {
  agent_ids_ = Iota(reported_.rows());
  Validate();
}

ValuationProfile::ValuationProfile(Matrix reported, Matrix truth,
                                   std::vector<std::size_t> agent_ids)
    : reported_(std::move(reported)),
      truth_(std::move(truth)),
      agent_ids_(std::move(agent_ids)) {
  Validate();
}

ValuationProfile ValuationProfile::Empty(std::size_t num_outcomes) {
  return ValuationProfile(Matrix(0, num_outcomes));
}

void ValuationProfile::Validate() const {
  if (reported_.rows() != truth_.rows() || reported_.cols() != truth_.cols()) {
    throw std::invalid_argument(
        "reported and true valuation matrices differ in shape");
  }
  if (agent_ids_.size() != reported_.rows()) {
    throw std::invalid_argument("agent id list does not match row count");
  }
  for (const Matrix* m : {&reported_, &truth_}) {
    for (std::size_t r = 0; r < m->rows(); ++r) {
      for (double v : m->row(r)) {
        if (!std::isfinite(v) || v < 0.0) {
          throw std::invalid_argument(
              "valuations must be finite and nonnegative");
        }
      }
    }
  }
  std::vector<std::size_t> sorted = agent_ids_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("duplicate agent id");
  }
}

bool ValuationProfile::is_truthful(std::size_t row) const {
  auto a = reported_.row(row);
  auto b = truth_.row(row);
  return std::equal(a.begin(), a.end(), b.begin());
}

std::vector<bool> ValuationProfile::truth_bits() const {
  std::vector<bool> bits(num_agents());
  for (std::size_t i = 0; i < num_agents(); ++i) bits[i] = is_truthful(i);
  return bits;
}

std::size_t ValuationProfile::row_of(std::size_t id) const {
  auto it = std::find(agent_ids_.begin(), agent_ids_.end(), id);
  if (it == agent_ids_.end()) {
    throw std::out_of_range("unknown agent id " + std::to_string(id));
  }
  return static_cast<std::size_t>(it - agent_ids_.begin());
}

std::size_t ValuationProfile::id_bound() const {
  std::size_t bound = 0;
  for (std::size_t id : agent_ids_) bound = std::max(bound, id + 1);
  return bound;
}

WeightVector weight_vector(const ValuationProfile& profile, bool use_truth) {
  const Matrix& m = use_truth ? profile.truth() : profile.reported();
  WeightVector w(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t j = 0; j < m.cols(); ++j) w[j] += row[j];
  }
  return w;
}

ValuationProfile exclude(const ValuationProfile& profile,
                         std::span<const std::size_t> rows) {
  const std::size_t n = profile.num_agents();
  std::vector<bool> drop(n, false);
  for (std::size_t r : rows) {
    if (r >= n) {
      throw std::out_of_range("cannot exclude row " + std::to_string(r) +
                              " of a " + std::to_string(n) + "-agent profile");
    }
    drop[r] = true;
  }
  std::size_t keep = 0;
  for (std::size_t r = 0; r < n; ++r) keep += drop[r] ? 0 : 1;
  const std::size_t m = profile.num_outcomes();
  Matrix reported(keep, m), truth(keep, m);
  std::vector<std::size_t> ids;
  ids.reserve(keep);
  std::size_t out = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (drop[r]) continue;
    std::ranges::copy(profile.reported().row(r), reported.row(out).begin());
    std::ranges::copy(profile.truth().row(r), truth.row(out).begin());
    ids.push_back(profile.agent_ids()[r]);
    ++out;
  }
  return ValuationProfile(std::move(reported), std::move(truth),
                          std::move(ids));
}

ValuationProfile exclude_ids(const ValuationProfile& profile,
                             std::span<const std::size_t> ids) {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (std::size_t id : ids) rows.push_back(profile.row_of(id));
  return exclude(profile, rows);
}

ValuationProfile truthful_part(const ValuationProfile& profile) {
  std::vector<std::size_t> liars;
  for (std::size_t r = 0; r < profile.num_agents(); ++r) {
    if (!profile.is_truthful(r)) liars.push_back(r);
  }
  return exclude(profile, liars);
}

ValuationProfile concat(const ValuationProfile& a, const ValuationProfile& b) {
  if (a.num_outcomes() != b.num_outcomes()) {
    throw std::invalid_argument(
        "cannot concatenate profiles over different "
        "outcome sets");
  }
  const std::size_t m = a.num_outcomes();
  const std::size_t n = a.num_agents() + b.num_agents();
  Matrix reported(n, m), truth(n, m);
  std::vector<std::size_t> ids = a.agent_ids();
  const std::size_t offset = a.id_bound();
  for (std::size_t r = 0; r < a.num_agents(); ++r) {
    std::ranges::copy(a.reported().row(r), reported.row(r).begin());
    std::ranges::copy(a.truth().row(r), truth.row(r).begin());
  }
  for (std::size_t r = 0; r < b.num_agents(); ++r) {
    std::ranges::copy(b.reported().row(r),
                      reported.row(a.num_agents() + r).begin());
    std::ranges::copy(b.truth().row(r), truth.row(a.num_agents() + r).begin());
    ids.push_back(offset + b.agent_ids()[r]);
  }
  return ValuationProfile(std::move(reported), std::move(truth),
                          std::move(ids));
}

// ---------------------------------------------------------------------------
// Allocation

double Allocation::total() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s;
}

void Allocation::Validate(double tol) const {
  for (double p : probs) {
    if (!(p >= -tol && p <= 1.0 + tol)) {
      throw std::invalid_argument("allocation probability outside [0,1]");
    }
  }
  if (!(null_mass >= -tol && null_mass <= 1.0 + tol)) {
    throw std::invalid_argument("null mass outside [0,1]");
  }
  if (std::abs(total() + null_mass - 1.0) > tol) {
    throw std::invalid_argument("allocation masses do not sum to one");
  }
}

Allocation Allocation::Uniform(std::size_t m) {
  if (m == 0) throw std::invalid_argument("uniform allocation needs m >= 1");
  return {std::vector<double>(m, 1.0 / static_cast<double>(m)), 0.0};
}

Allocation Allocation::AllNull(std::size_t m) {
  return {std::vector<double>(m, 0.0), 1.0};
}

double tv_distance(const Allocation& a, const Allocation& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("tv_distance: allocations differ in size");
  }
  double s = std::abs(a.null_mass - b.null_mass);
  for (std::size_t j = 0; j < a.size(); ++j) {
    s += std::abs(a.probs[j] - b.probs[j]);
  }
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// VerificationOracle

VerificationOracle::VerificationOracle(const ValuationProfile& profile)
    : truth_bits_(profile.id_bound(), true) {
  for (std::size_t r = 0; r < profile.num_agents(); ++r) {
    truth_bits_[profile.agent_ids()[r]] = profile.is_truthful(r);
  }
}

bool VerificationOracle::peek(std::size_t id) const {
  if (id >= truth_bits_.size()) {
    throw std::out_of_range("oracle queried for unknown agent " +
                            std::to_string(id));
  }
  return truth_bits_[id];
}

bool VerificationOracle::verify(std::size_t id) {
  bool bit = peek(id);
  call_log_.push_back(id);
  return bit;
}

// ---------------------------------------------------------------------------
// RngStream

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) {
  // FNV-1a, then mixed; stable across platforms unlike std::hash.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

namespace {

inline std::uint64_t Rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t s = mix64(seed) ^ mix64(stream_id ^ 0x5851f42d4c957f2dULL);
  for (auto& word : state_) {
    s += 0x9e3779b97f4a7c15ULL;
    word = mix64(s);
  }
}

RngStream RngStream::derive(std::uint64_t label) const {
  return RngStream(seed_,
                   mix64(stream_id_ ^ mix64(label + 0x632be59bd9b4e019ULL)));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = Rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = Rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Lemire's multiply-shift with rejection.
  const std::uint64_t bound = n;
  std::uint64_t x = next_u64();
  unsigned __int128 prod = static_cast<unsigned __int128>(x) * bound;
  std::uint64_t low = static_cast<std::uint64_t>(prod);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      prod = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(prod);
    }
  }
  return static_cast<std::size_t>(prod >> 64);
}

double RngStream::normal() {
  // Box-Muller; one draw per call keeps the stream position simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::exponential() {
  double u = uniform();
  while (u <= 0.0) u = uniform();
  return -std::log(u);
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson: mean must be finite and >= 0");
  }
  // exp(-mean) underflows near 745; sums of independent Poissons are Poisson.
  constexpr double kChunk = 500.0;
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double lambda = std::min(mean, kChunk);
    mean -= lambda;
    double p = std::exp(-lambda);
    double cdf = p;
    const double u = uniform();
    std::uint64_t k = 0;
    while (u >= cdf) {
      ++k;
      p *= lambda / static_cast<double>(k);
      const double next = cdf + p;
      if (next == cdf) break;  // remaining tail below double resolution
      cdf = next;
    }
    total += k;
  }
  return total;
}

std::size_t RngStream::weighted_index(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  return weighted_index(weights, total);
}

std::size_t RngStream::weighted_index(std::span<const double> weights,
                                      double total) {
  if (!(total > 0.0)) {
    throw std::invalid_argument("weighted_index: weights sum to zero");
  }
  const double target = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  // Rounding can leave target marginally above the accumulated sum.
  return last_positive;
}

}  // namespace selver
