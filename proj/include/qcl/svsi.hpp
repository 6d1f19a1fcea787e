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

// Secretly-verifiable, statistically-invertible OWSGs and their conversion
// to IV-OWSGs (Ver measures the inverting POVM and accepts iff the outcome is
// the claimed key).

#include <vector>

#include "qcl/owsg.hpp"

namespace qcl::svsi {

using owsg::Key;

class SVSIOWSG {
 public:
  /// `inv_povm` has one element per key (label = key) and optionally a
  /// kBottom residual. Validates completeness and the invertibility bounds
  /// Tr(Pi_k phi_k) >= 1 - tol_inv, Tr(Pi_k' phi_k) <= tol_inv (k' != k).
  SVSIOWSG(int lambda, std::vector<double> key_probs, std::vector<qla::DensityMatrix> states,
           qla::POVM inv_povm, double tol_inv);

  int lambda() const { return lambda_; }
  std::uint32_t key_count() const { return 1u << lambda_; }
  const std::vector<double>& key_probs() const { return key_probs_; }
  const std::vector<qla::DensityMatrix>& states() const { return states_; }
  const qla::POVM& inv_povm() const { return inv_povm_; }
  double tol_inv() const { return tol_inv_; }
  /// The element Pi_k (positions resolved by label).
  const qla::ComplexMatrix& inverter(Key k) const;
  /// Tr(Pi_guess phi_k).
  double invert_prob(Key guess, Key k) const;

 private:
  int lambda_;
  std::vector<double> key_probs_;
  std::vector<qla::DensityMatrix> states_;
  qla::POVM inv_povm_;
  double tol_inv_;
  std::vector<std::size_t> position_;  // key -> element index
};

/// phi_k = |k><k| on lambda qubits with the computational-basis measurement.
SVSIOWSG orthogonal_instance(int lambda, double tol_inv = 0.0);

/// Four pure states on two qubits with pairwise inner product `overlap`
/// (Gram matrix (1-overlap) I + overlap J), inverted by the pretty-good
/// measurement. lambda = 2.
SVSIOWSG near_orthogonal_instance(double overlap, double tol_inv);

/// Same KeyGen/StateGen, Ver accepting k' iff the inverting POVM outputs k'.
/// Purifications come from the eigendecomposition of each phi_k with B sized
/// to the largest rank; the states themselves are carried over unchanged.
owsg::IVOWSG to_ivowsg(const SVSIOWSG& svsi);

struct SecurityAccounting {
  double total = 0.0;           // sum_k Pr[k] sum_k' P(k'|k) Tr(Pi_k' phi_k)
  double diagonal = 0.0;        // k' = k part
  double off_diagonal = 0.0;    // k' != k part
  double exact_guess = 0.0;     // sum_k Pr[k] P(k|k), bounds the diagonal
  double off_diagonal_bound = 0.0;  // sum_k Pr[k] (1 - P(k|k)) tol_inv
  double bound = 0.0;           // exact_guess + tol_inv
  bool holds = false;
};

/// `guesses[k][k']` is the adversary's probability of answering k' given
/// copies of phi_k; each row must sum to 1.
SecurityAccounting security_accounting(const SVSIOWSG& svsi,
                                       const std::vector<std::vector<double>>& guesses);

}  // namespace qcl::svsi
