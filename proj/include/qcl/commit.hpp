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

// The canonical commitment built from an IV-OWSG:
//
//   |psi_b> = sum_{k,h} sqrt(Pr[k]/|H|) |k,h>_C1 |h,h(k)>_R1
//             |Phi_k^{(x)t}>_{C2,R2} |r3_b(k)>_R3
//
// with r3_0(k) = 0...0 and r3_1(k) = k. C = (C1, C2) is the commitment
// register, R = (R1, R2, R3) the reveal register. C1 is split into its key
// and hash labels (C1.k, C1.h), R1 into (R1.h, R1.y); C2 = B^t, R2 = A^t.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcl/hashfam.hpp"
#include "qcl/labeled_state.hpp"
#include "qcl/owsg.hpp"

namespace qcl::commit {

inline const std::string kC1Key = "C1.k";
inline const std::string kC1Hash = "C1.h";
inline const std::string kR1Hash = "R1.h";
inline const std::string kR1Value = "R1.y";
inline const std::string kR3 = "R3";
inline const std::string kC2 = "C2";
inline const std::string kR2 = "R2";

/// Registers making up C, in reduced-state order.
std::vector<std::string> commitment_registers();

struct CommitmentParams {
  int lambda = 1;
  double D = 1.0;
  int t = 1;
  int m = 1;     // hash output bits, |Y| = 2^m
  double p = 2;  // good-set threshold parameter

  /// r = (0.5 + D/2) lambda.
  double r() const { return (0.5 + D / 2.0) * lambda; }
  std::uint32_t range_size() const { return 1u << m; }
  hashfam::HashFamily family() const { return hashfam::HashFamily(lambda, m); }

  /// Smallest m with 2^m >= 2 * 2^r, i.e. ceil(r) + 1.
  static int default_m(int lambda, double D);
  /// Validates and fills m from default_m when not overridden.
  static CommitmentParams make(int lambda, double D, int t, std::optional<int> m = std::nullopt,
                               double p = 2.0);
};

struct CommitmentPair {
  qla::LabeledState psi0;
  qla::LabeledState psi1;
  CommitmentParams params;
};

/// |Phi_k>^{(x)t} with registers reordered to (B_1..B_t, A_1..A_t) = (C2, R2).
qla::ComplexVector copies(const owsg::IVOWSG& inst, owsg::Key k, int t);

/// Both commitment states as labeled superpositions. One block per (k, h)
/// with Pr[k] > 0.
CommitmentPair build_pair(const owsg::IVOWSG& inst, const CommitmentParams& params);

/// rho_b = Tr_R |psi_b><psi_b| through the blockwise reduction.
std::pair<qla::DensityMatrix, qla::DensityMatrix> reduced_commitments(const CommitmentPair& pair);

/// rho_b from the closed form: entries vanish unless h = h' and h(k) = h(k')
/// (and k = k' for b = 1), otherwise sqrt(Pr[k]Pr[k'])/|H| Tr_A(|Phi_k><Phi_k'|)^{(x)t}.
/// Needs no purification copies, so t may be large when B is small.
qla::DensityMatrix reduced_commitment_factored(const owsg::IVOWSG& inst,
                                               const CommitmentParams& params, int bit);

struct HidingMetrics {
  double td = 0.0;   // TD(rho_0, rho_1)
  double fid = 0.0;  // F(rho_0, rho_1)
  double fvdg_lower_margin = 0.0;  // td - (1 - sqrt(fid))
  double fvdg_upper_margin = 0.0;  // sqrt(1 - fid) - td
  bool fvdg_holds = false;
  std::size_t c_dim = 0;
};

HidingMetrics hiding_metrics(const qla::DensityMatrix& rho0, const qla::DensityMatrix& rho1);
HidingMetrics hiding_metrics(const CommitmentPair& pair);
HidingMetrics hiding_metrics_factored(const owsg::IVOWSG& inst, const CommitmentParams& params);

struct HidingVerdict {
  double s = 0.0;
  double fid_lower = 0.0;  // s^2
  double td_upper = 0.0;   // sqrt(1 - s^2)
  bool fid_ok = false;
  bool td_ok = false;
  bool holds() const { return fid_ok && td_ok; }
};

/// Uhlmann consequence of an extraction overlap s: F >= s^2 and therefore
/// TD <= sqrt(1 - s^2), each within `tol`.
HidingVerdict hiding_threshold_check(const HidingMetrics& metrics, double s, double tol = 1e-9);

}  // namespace qcl::commit
