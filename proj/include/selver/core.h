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

// Domain types shared by every mechanism: valuation profiles, weight vectors,
// (partial) allocations, the verification oracle and seeded random streams.

#ifndef SELVER_CORE_H_
#define SELVER_CORE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace selver {

// Absolute tolerance for probability identities.
inline constexpr double kProbTolerance = 1e-12;

// Dense row-major matrix of doubles. Rows are agents, columns outcomes.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Builds from nested rows; every row must have `cols` entries.
  static Matrix FromRows(const std::vector<std::vector<double>>& rows,
                         std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::vector<std::vector<double>> ToRows() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Length-m vector of total valuations per outcome.
using WeightVector = std::vector<double>;

// Reported and true valuations of n agents over m outcomes. Agent ids are
// stable: excluding agents keeps the original ids of the remaining rows so
// verification logs stay meaningful through recursion.
class ValuationProfile {
 public:
  ValuationProfile() = default;
  // Truthful profile (truth == reported).
  explicit ValuationProfile(Matrix reported);
  ValuationProfile(Matrix reported, Matrix truth);
  ValuationProfile(Matrix reported, Matrix truth,
                   std::vector<std::size_t> agent_ids);
  // Empty profile with m outcomes.
  static ValuationProfile Empty(std::size_t num_outcomes);

  std::size_t num_agents() const { return reported_.rows(); }
  std::size_t num_outcomes() const { return reported_.cols(); }
  const Matrix& reported() const { return reported_; }
  const Matrix& truth() const { return truth_; }
  const std::vector<std::size_t>& agent_ids() const { return agent_ids_; }

  // Row `row` is truthful iff its reported and true rows agree exactly.
  bool is_truthful(std::size_t row) const;
  std::vector<bool> truth_bits() const;
  // Row position of the agent with stable id `id`.
  std::size_t row_of(std::size_t id) const;

  // Largest stable agent id plus one (0 for an empty profile).
  std::size_t id_bound() const;

  bool operator==(const ValuationProfile&) const = default;

 private:
  void Validate() const;

  Matrix reported_;
  Matrix truth_;
  std::vector<std::size_t> agent_ids_;
};

// w_j = sum_i x_i(j) over the reported (or true) matrix.
WeightVector weight_vector(const ValuationProfile& profile,
                           bool use_truth = false);

// Removes the rows at the given positions. Throws std::out_of_range for an
// invalid position.
ValuationProfile exclude(const ValuationProfile& profile,
                         std::span<const std::size_t> rows);

// Removes the agents with the given stable ids.
ValuationProfile exclude_ids(const ValuationProfile& profile,
                             std::span<const std::size_t> ids);

// Truthful agents only, reporting their true rows. Its weight vector is w_T.
ValuationProfile truthful_part(const ValuationProfile& profile);

// Appends the rows of `b` to `a` (ids of `b` are shifted past `a`).
ValuationProfile concat(const ValuationProfile& a, const ValuationProfile& b);

// A (possibly partial) distribution over m outcomes plus a null outcome.
struct Allocation {
  std::vector<double> probs;
  double null_mass = 0.0;

  std::size_t size() const { return probs.size(); }
  double total() const;  // sum of probs (excludes null)
  bool is_full() const { return null_mass == 0.0; }
  // Throws std::invalid_argument unless entries lie in [0,1] and the masses
  // sum to one within `tol`.
  void Validate(double tol = 1e-9) const;

  static Allocation Uniform(std::size_t m);
  static Allocation AllNull(std::size_t m);
};

// Total variation distance; the null mass is treated as outcome index m.
double tv_distance(const Allocation& a, const Allocation& b);

// The oracle answers ver(i) = s_i and logs every call.
class VerificationOracle {
 public:
  VerificationOracle() = default;
  explicit VerificationOracle(const ValuationProfile& profile);
  // truth_bits[id] is s_id.
  explicit VerificationOracle(std::vector<bool> truth_bits)
      : truth_bits_(std::move(truth_bits)) {}

  // `id` is a stable agent id.
  bool verify(std::size_t id);
  // Answer without logging; used by analytic code.
  bool peek(std::size_t id) const;

  const std::vector<std::size_t>& call_log() const { return call_log_; }
  std::size_t num_calls() const { return call_log_.size(); }

 private:
  std::vector<bool> truth_bits_;  // indexed by stable id
  std::vector<std::size_t> call_log_;
};

// Deterministic random stream. Identical (seed, stream_id) pairs yield
// identical draws; the engine is xoshiro256** seeded through splitmix64, so
// draws are bit-exact across platforms and standard libraries.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream whose id is a hash of this stream's id and `label`.
  RngStream derive(std::uint64_t label) const;

  std::uint64_t next_u64();
  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n). Requires n > 0.
  std::size_t uniform_index(std::size_t n);
  double normal();
  double exponential();
  // Poisson(mean) by sequential inversion, split into chunks for large means.
  std::uint64_t poisson(double mean);
  // Index drawn proportionally to nonnegative `weights` (sum must be > 0).
  std::size_t weighted_index(std::span<const double> weights);
  std::size_t weighted_index(std::span<const double> weights, double total);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];
};

// splitmix64 finalizer, exposed for stable label hashing.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

}  // namespace selver

#endif  // SELVER_CORE_H_
