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

// Key extraction used by the hiding argument: shadow estimates of every
// acceptance probability, the 3/4-threshold list, hash disambiguation, a
// concrete POVM realising the extractor, and the Naimark / CNOT unitary whose
// overlap certifies hiding through Uhlmann's theorem.

#include <cstdint>
#include <optional>
#include <vector>

#include "qcl/commit.hpp"
#include "qcl/hashfam.hpp"
#include "qcl/owsg.hpp"

namespace qcl::extractor {

using owsg::Key;

enum class Backend { kExact, kSampled };

std::string_view to_string(Backend b);
Backend parse_backend(std::string_view name);

struct ShadowConfig {
  double epsilon = 0.125;
  double omega = 0.25;
  double threshold = 0.75;
  Backend backend = Backend::kExact;
  std::uint64_t t_samples = 0;  // sampled backend; 0 = Hoeffding count
  std::uint64_t seed = 0;

  /// epsilon = 1/8, omega = 2^-lambda, threshold = 3/4.
  static ShadowConfig for_lambda(int lambda, Backend backend = Backend::kExact, std::uint64_t seed = 0);
  /// Throws std::invalid_argument unless 0 < epsilon < threshold < 1, 0 < omega < 1.
  void validate() const;
  /// t_samples, or the Hoeffding count when it is 0.
  std::uint64_t samples(int lambda) const;
};

/// ceil(ln(2 * 2^lambda / omega) / (2 epsilon^2)): with this many Bernoulli
/// trials per hypothesis, Pr[exists k': |b_k' - p_k'| > epsilon] <= omega.
std::uint64_t hoeffding_samples(int lambda, double epsilon, double omega);

/// b[k'] estimates accept_prob(k', k).
using ShadowEstimates = std::vector<double>;

/// Exact backend: b = accept_prob. Sampled backend: empirical mean of
/// `samples` Bernoulli(accept_prob) draws per k', one RNG stream per
/// (seed, run, k, k').
ShadowEstimates shadow_estimate(const owsg::IVOWSG& inst, Key k, const ShadowConfig& cfg,
                                std::uint64_t run = 0);

using ExtractionList = std::vector<Key>;

/// {k' : b_k' >= threshold}.
ExtractionList build_list(const ShadowEstimates& est, const ShadowConfig& cfg);

/// The unique k* in `list` with h(k*) = y, else nullopt.
std::optional<Key> extract(const hashfam::HashFn& h, std::uint32_t y, const ExtractionList& list);

struct KeyExtraction {
  Key key = 0;
  double prior = 0.0;
  std::size_t good_size = 0;  // |G_k|, threshold 1/2
  std::size_t list_size = 0;  // |L|
  bool in_list = false;       // k in L
  bool list_in_good = false;  // L subset of G_k
  bool sandwich = false;      // {p >= 7/8} subset of L subset of {p >= 1/2}
  double success = 0.0;       // Pr_h[L cap h^-1(h(k)) = {k}]
  double pairwise_bound = 0.0;  // 1 - (|G_k| - 1)/|Y|
};

struct ExtractionReport {
  std::vector<KeyExtraction> per_key;
  double success = 0.0;          // sum_k Pr[k] success_k
  double prob_list_sandwich = 0.0;  // Pr[k in L subset G_k]
  double pairwise_lower = 0.0;   // sum_k Pr[k] 1[k in L subset G_k] pairwise_bound_k
  bool sandwich_all = false;
  bool small_good_sets = false;  // |G_k| <= |Y|/2 for every key with Pr[k] > 0
};

/// Full enumeration over keys and hash functions of the list-then-hash
/// extractor's success probability, with the intermediate quantities.
ExtractionReport success_prob_exact(const owsg::IVOWSG& inst, const hashfam::HashFamily& family,
                                    const ShadowConfig& cfg);

/// Z basis: index a < 2^lambda is key a, index 2^lambda is the failure
/// outcome.
std::size_t z_dim(int lambda);

/// The extractor POVM {Pi^(a)} on R1 (x) R2, block diagonal in R1 = (h, y):
/// a pretty-good measurement over {phi_k^{(x)t}} (priors Pr[k]) whose outcome
/// kappa is kept if h(kappa) = y and turned into failure otherwise.
class ExtractorPOVM {
 public:
  ExtractorPOVM(const owsg::IVOWSG& inst, const commit::CommitmentParams& params);

  const hashfam::HashFamily& family() const { return family_; }
  int lambda() const { return lambda_; }
  std::size_t dim_r2() const { return dim_r2_; }
  const qla::POVM& pgm() const { return pgm_; }

  /// POVM on R2 for register value (h, y); element a is outcome Z index a.
  qla::POVM block(std::uint32_t h_index, std::uint32_t y) const;
  /// Keys kappa (with a PGM element) satisfying h(kappa) = y, as a bit mask.
  std::uint64_t pattern(std::uint32_t h_index, std::uint32_t y) const;
  qla::POVM block_for_pattern(std::uint64_t pattern) const;
  /// The full POVM on R1 (x) R2, R1 index h * |Y| + y. Subject to the dense cap.
  qla::POVM dense() const;

 private:
  hashfam::HashFamily family_;
  int lambda_;
  std::size_t dim_r2_;
  std::vector<std::vector<std::uint32_t>> table_;
  qla::POVM pgm_;
  std::vector<std::size_t> pgm_position_;  // key -> PGM element index, or size() if none
};

ExtractorPOVM build_extractor_povm(const owsg::IVOWSG& inst, const commit::CommitmentParams& params);

struct SummaryOverlap {
  double summary_sum = 0.0;  // sum_{k,h} Pr[k]/|H| <Pi^(k)> on |h,h(k)>|Phi_k^t>
  double coincidence = 0.0;  // failure-outcome term at k = 0...0 (CNOT leaves R3 = 0)
  double total() const { return summary_sum + coincidence; }
};

SummaryOverlap summary_overlap(const owsg::IVOWSG& inst, const ExtractorPOVM& povm, int t);

/// CNOT_{Z -> R3} on (R3, Z): r3 <- r3 xor z for key outcomes, identity on
/// the failure outcome. A permutation and an involution.
qla::ComplexMatrix cnot_z_to_r3(int lambda);

/// Unitary on R (x) Z, block diagonal in R1 = (h, y). Each block acts on
/// (R2, R3, Z); blocks are shared between (h, y) values with the same
/// hash-collision pattern.
struct BlockAttackUnitary {
  std::size_t n_hash = 0;
  std::size_t range = 0;
  std::size_t dim_r2 = 0;
  std::size_t dim_r3 = 0;
  std::size_t dim_z = 0;
  std::vector<std::uint32_t> block_of;  // h * range + y -> blocks index
  std::vector<qla::ComplexMatrix> blocks;

  std::size_t block_dim() const { return dim_r2 * dim_r3 * dim_z; }
  const qla::ComplexMatrix& block(std::uint32_t h_index, std::uint32_t y) const {
    return blocks[block_of[h_index * range + y]];
  }
  /// Dense matrix on (R1, R2, R3, Z). Subject to the dense cap.
  qla::ComplexMatrix to_dense() const;
};

/// U = V^dagger CNOT_{Z->R3} V with V the Naimark dilation of each POVM block.
BlockAttackUnitary extractor_unitary(const ExtractorPOVM& povm);

struct UhlmannOverlap {
  double overlap = 0.0;  // <psi_1|<0|_Z U |psi_0>|0>_Z (real part; imaginary part reported)
  double imag = 0.0;
  double max_unitarity_defect = 0.0;
  bool fallback = false;  // dense path over cap, overlap taken from the POVM sum
};

/// Overlap through the materialised block unitaries, contracted against the
/// labeled commitment states.
UhlmannOverlap uhlmann_unitary_overlap(const commit::CommitmentPair& pair, const BlockAttackUnitary& u);
UhlmannOverlap uhlmann_unitary_overlap(const owsg::IVOWSG& inst, const commit::CommitmentPair& pair,
                                       const ExtractorPOVM& povm);

/// Same overlap through the Naimark dilation of the dense POVM on R1 (x) R2
/// (one global V), applied to vectors. Throws DimensionCapError when the
/// dense dilation does not fit.
UhlmannOverlap uhlmann_unitary_overlap_dense(const commit::CommitmentPair& pair, const ExtractorPOVM& povm);

}  // namespace qcl::extractor
