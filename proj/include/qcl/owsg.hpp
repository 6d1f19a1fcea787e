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

// Finite inefficiently-verifiable one-way state generators: key distribution,
// purifications |Phi_k> on (A, B), and acceptance operators E_k' on A. All
// verification probabilities are exact traces.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcl/qla.hpp"

namespace qcl::owsg {

/// A lambda-bit key; bit lambda-1 (the most significant) is the first
/// character of its binary string.
using Key = std::uint32_t;

std::string key_string(Key k, int lambda);

class IVOWSG {
 public:
  /// Builds the instance from purifications; phi_k = Tr_B |Phi_k><Phi_k|.
  IVOWSG(int lambda, std::vector<double> key_probs, std::size_t dim_a, std::size_t dim_b,
         std::vector<qla::ComplexVector> purifications,
         std::vector<qla::ComplexMatrix> acceptance);

  /// As above, but keeps the given states verbatim after checking they match
  /// Tr_B of the purifications within tolerance.
  IVOWSG(int lambda, std::vector<double> key_probs, std::size_t dim_a, std::size_t dim_b,
         std::vector<qla::ComplexVector> purifications, std::vector<qla::DensityMatrix> states,
         std::vector<qla::ComplexMatrix> acceptance);

  int lambda() const { return lambda_; }
  std::uint32_t key_count() const { return 1u << lambda_; }
  double key_prob(Key k) const { return key_probs_[k]; }
  const std::vector<double>& key_probs() const { return key_probs_; }
  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }
  /// Layout of |Phi_k>: registers A then B.
  qla::RegisterLayout purification_layout() const;

  const qla::ComplexVector& purification(Key k) const { return purifications_[k]; }
  const qla::DensityMatrix& state(Key k) const { return states_[k]; }
  const qla::ComplexMatrix& acceptance(Key k_guess) const { return acceptance_[k_guess]; }

  /// Tr(E_{k_guess} phi_k), precomputed.
  double accept(Key k_guess, Key k) const { return accept_[k][k_guess]; }

 private:
  void validate_and_tabulate();

  int lambda_;
  std::vector<double> key_probs_;
  std::size_t dim_a_;
  std::size_t dim_b_;
  std::vector<qla::ComplexVector> purifications_;
  std::vector<qla::DensityMatrix> states_;
  std::vector<qla::ComplexMatrix> acceptance_;
  std::vector<std::vector<double>> accept_;  // [k][k_guess]
};

enum class ToyKind { kBb84Pure, kBb84Depolarized, kConstant, kOrthogonal };

std::string_view to_string(ToyKind kind);
/// Throws std::invalid_argument for unknown names.
ToyKind parse_kind(std::string_view name);

/// Concrete instantiation:
///  - bb84-pure: bit i of k prepares |0> (0) or |+> (1) on qubit i; Ver
///    projects onto the product state of k'.
///  - bb84-depolarized(eta): each qubit of bb84-pure passed through the
///    depolarizing channel rho -> (1-eta) rho + eta I/2, purified on B.
///  - constant: every key maps to |0> on one qubit; Ver always accepts.
///  - orthogonal: phi_k = |k><k| on lambda qubits; Ver projects onto |k'>.
struct ToyInstance {
  ToyKind kind = ToyKind::kBb84Pure;
  int lambda = 2;
  double eta = 0.0;
  /// Uniform when absent.
  std::optional<std::vector<double>> key_probs;
};

IVOWSG make_instance(const ToyInstance& spec);

/// Tr(E_{k_guess} phi_k).
double accept_prob(const IVOWSG& inst, Key k_guess, Key k);
/// sum_k Pr[k] accept_prob(k, k).
double correctness_prob(const IVOWSG& inst);
/// {k' : accept_prob(k', k) >= 1 - 1/p}, ties resolved in favour of
/// membership within tolerances().probability. Requires p > 1.
std::vector<Key> good_set(const IVOWSG& inst, Key k, double p);
/// Success of the guess-uniformly attack: sum_{k,k'} Pr[k] 2^-lambda accept_prob(k', k).
double uniform_guess_winprob(const IVOWSG& inst);

inline constexpr double kInfiniteDelta = std::numeric_limits<double>::infinity();
/// -log2(uniform_guess_winprob); kInfiniteDelta when the win probability is 0.
double empirical_delta(const IVOWSG& inst);

struct GoodSetReport {
  double p = 0.0;
  double r = 0.0;
  double threshold = 0.0;                   // 1 - 1/p
  std::vector<std::vector<Key>> good_sets;  // G_k for every key
  std::vector<Key> large_keys;              // T = {k : |G_k| > 2^r}
  double mass_large = 0.0;                  // sum_{k in T} Pr[k]
  double winprob = 0.0;                     // uniform_guess_winprob
  double delta_emp = 0.0;
  // Chain mass(T) 2^r 2^-lambda (1-1/p) <= sum_{k in T} Pr[k] sum_{k' in G_k}
  // 2^-lambda accept <= winprob.
  double chain_lhs = 0.0;
  double chain_middle = 0.0;
  bool chain_holds = false;
  /// 2^-delta_emp 2^lambda / (2^r (1 - 1/p)); vacuous when >= 1.
  double mass_bound = 0.0;
  bool mass_bound_holds = false;
  bool vacuous = false;
  double prob_nonempty_small = 0.0;  // Pr[1 <= |G_k| <= 2^r]
  double prob_self_small = 0.0;      // Pr[k in G_k and |G_k| <= 2^r]
  bool sandwich_holds = false;       // first >= second
};

/// Exact accounting of the key-counting lemma for one instance. Requires
/// p > 1 and r >= 0.
GoodSetReport lemma1_report(const IVOWSG& inst, double p, double r);

}  // namespace qcl::owsg
