// Copyright 2026 The qcommit-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Binding side: runs a cheating unitary on the reveal register of |psi_0>
// and feeds the resulting R3 distribution to Ver, with the exact value of
// every step of the success-probability chain.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "qcl/commit.hpp"
#include "qcl/extractor.hpp"
#include "qcl/owsg.hpp"

namespace qcl::reduction {

using owsg::Key;

/// A cheating unitary on R (x) Z with advice state tau on Z. Either block
/// diagonal in R1 = (h, y) (blocks on (R2, R3, Z)) or one dense matrix on
/// (R1, R2, R3, Z), R1 index h * |Y| + y.
class CheatingAttack {
 public:
  static CheatingAttack from_blocks(extractor::BlockAttackUnitary u, qla::ComplexVector tau);
  static CheatingAttack from_dense(qla::ComplexMatrix u, std::size_t n_hash, std::size_t range,
                                   std::size_t dim_r2, std::size_t dim_r3, qla::ComplexVector tau);
  /// U = I, Z trivial: R3 stays 0...0.
  static CheatingAttack identity(std::size_t n_hash, std::size_t range, std::size_t dim_r2, std::size_t dim_r3);
  /// The Naimark / CNOT extractor unitary with tau = |0>.
  static CheatingAttack extractor(const extractor::ExtractorPOVM& povm);

  bool is_dense() const { return dense_.has_value(); }
  std::size_t n_hash() const { return n_hash_; }
  std::size_t range() const { return range_; }
  std::size_t dim_r2() const { return dim_r2_; }
  std::size_t dim_r3() const { return dim_r3_; }
  std::size_t dim_z() const { return dim_z_; }
  const qla::ComplexVector& tau() const { return tau_; }
  /// Largest |U^dagger U - I| entry over the stored matrices.
  double unitarity_defect() const;

  /// U (|h, y> |x>_R2 |0>_R3 |tau>_Z). Returns one vector on (R2, R3, Z) per
  /// R1 value in the output, as (R1 index, vector) pairs.
  std::vector<std::pair<std::size_t, qla::ComplexVector>> apply(std::uint32_t h_index, std::uint32_t y,
                                                                 const qla::ComplexVector& x) const;

 private:
  CheatingAttack() = default;

  std::size_t n_hash_ = 0;
  std::size_t range_ = 0;
  std::size_t dim_r2_ = 0;
  std::size_t dim_r3_ = 0;
  std::size_t dim_z_ = 0;
  qla::ComplexVector tau_;
  std::optional<extractor::BlockAttackUnitary> blocks_;
  std::optional<qla::ComplexMatrix> dense_;
};

/// Binary dense-unitary format: uint64 little-endian dimension N, then N*N
/// entries in row-major order, each as two little-endian IEEE-754 doubles
/// (real, imaginary).
void write_dense_unitary(const std::filesystem::path& path, const qla::ComplexMatrix& u);
/// Throws std::runtime_error on malformed files.
qla::ComplexMatrix read_dense_unitary(const std::filesystem::path& path);

struct ChainStages {
  double binding = 0.0;      // |<psi_1|<tau| U |psi_0>|tau>|^2 = 1/q
  double triangle = 0.0;     // (sum_{k,h} w ||z_{k,h}||)^2
  double cauchy = 0.0;       // sum_{k,h} w ||z_{k,h}||^2
  double restricted = 0.0;   // sum_{k,h} w ||(<k|_R3 (x) I) U |h,h(k)>|Phi^t>|0>|tau>||^2
  double restricted_good = 0.0;  // keys in G only
  double restricted_bad = 0.0;   // keys outside G
  bool monotone = false;     // binding <= triangle <= cauchy <= restricted
};

struct AdversaryReport {
  double q = 0.0;                     // 1 / binding value (or the override)
  double overlap = 0.0;               // |<psi_1|<tau| U |psi_0>|tau>|
  std::vector<Key> good_keys;         // G = {k : accept(k, k) >= 1/2}
  std::vector<std::vector<double>> output_dist;  // [k][k'] = Pr[R3 = k' | k]
  double success_in_g = 0.0;          // sum_{k in G} Pr[k] Pr[R3 = k | k]
  double success_all = 0.0;           // sum_k Pr[k] Pr[R3 = k | k]
  double win_prob = 0.0;              // sum_k Pr[k] sum_k' Pr[R3 = k' | k] accept(k', k)
  double min_accept_good = 0.0;       // min_{k in G, Pr[k] > 0} accept(k, k)
  ChainStages chain;
  double hash_step_lower = 0.0;       // restricted_good / |Y|
  bool hash_step_holds = false;       // success_in_g >= hash_step_lower
  bool accept_step_holds = false;     // win >= success_in_g min_accept_good >= success_in_g / 2
  double floor_2r = 0.0;              // floor(2^r)
  double bound_tight = 0.0;           // 1 / (4 q floor(2^r))
  double bound_final = 0.0;           // 1 / (8 q floor(2^r))
  double bound_range = 0.0;           // 1 / (2 q |Y|)
  bool success_meets_tight = false;   // success_in_g >= bound_tight
  bool win_meets_final = false;       // win_prob >= bound_final
  bool win_meets_range = false;       // win_prob >= bound_range
  double two_to_minus_delta = 0.0;    // uniform-guess win probability of the instance
  bool beats_uniform_guess = false;   // win_prob > two_to_minus_delta
  double unitarity_defect = 0.0;
  bool chain_holds() const { return chain.monotone && hash_step_holds && accept_step_holds; }
};

/// Exact run of the reduction: measures R3 of U|psi_0>|tau> for every key and
/// hash function and scores the outcome with Ver. `q_override` replaces 1/binding
/// in the reported bounds.
AdversaryReport run_adversary(const owsg::IVOWSG& inst, const commit::CommitmentParams& params,
                              const CheatingAttack& attack, std::optional<double> q_override = std::nullopt);

struct ContradictionVerdict {
  double delta = 0.0;
  double q = 0.0;
  double r = 0.0;
  double floor_2r = 0.0;
  double lhs = 0.0;         // 1 / (8 q floor(2^r))
  double rhs = 0.0;         // 2^-delta
  double log2_margin = 0.0; // delta - log2(8 q floor(2^r)), > 0 iff lhs > rhs
  bool positive = false;
};

/// Sign of 1/(8 q floor(2^r)) - 2^-delta, computed in the log domain.
ContradictionVerdict contradiction_check(double delta, double q, double r);

struct ContradictionPoint {
  int lambda = 0;
  /// log2 of 2^{(0.5+D)lambda} over 8 q 2^{(0.5+D/2)lambda}: the asymptotic
  /// numerator is positive iff this is positive.
  double symbolic_log2_margin = 0.0;
  bool symbolic_positive = false;
  /// Concrete check with delta = (0.5 + D) lambda and r = (0.5 + D/2) lambda.
  ContradictionVerdict concrete;
};

struct ContradictionScan {
  double D = 0.0;
  double q = 0.0;
  std::vector<ContradictionPoint> points;
  /// Smallest grid lambda from which the concrete check stays positive.
  std::optional<int> crossover;
};

ContradictionScan contradiction_scan(double D, double q, int lambda_min, int lambda_max);

}  // namespace qcl::reduction
