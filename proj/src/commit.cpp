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

#include "qcl/commit.hpp"

#include <cmath>
#include <stdexcept>

#include "qcl/errors.hpp"
#include "qcl/parallel.hpp"
#include "qcl/tolerances.hpp"

namespace qcl::commit {

using owsg::Key;
using qla::Complex;
using qla::ComplexMatrix;
using qla::ComplexVector;
using qla::DensityMatrix;

std::vector<std::string> commitment_registers() { return {kC1Key, kC1Hash, kC2}; }

int CommitmentParams::default_m(int lambda, double D) {
  const double r = (0.5 + D / 2.0) * lambda;
  return static_cast<int>(std::ceil(r - 1e-12)) + 1;
}

CommitmentParams CommitmentParams::make(int lambda, double D, int t, std::optional<int> m, double p) {
  if (lambda < 1 || lambda > hashfam::kMaxBits) throw std::invalid_argument("lambda out of range");
  if (!(D > 0.0)) throw std::invalid_argument("D must be positive");
  if (t < 0) throw std::invalid_argument("t must be nonnegative");
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  CommitmentParams params;
  params.lambda = lambda;
  params.D = D;
  params.t = t;
  params.p = p;
  params.m = m.value_or(default_m(lambda, D));
  hashfam::HashFamily(lambda, params.m);  // validates the range
  return params;
}

ComplexVector copies(const owsg::IVOWSG& inst, Key k, int t) {
  const ComplexVector& phi = inst.purification(k);
  if (t == 0) return ComplexVector::Ones(1);
  const ComplexVector product = qla::kron_power(phi, t);
  // (A1 B1 A2 B2 ...) -> (B1..Bt A1..At)
  std::vector<std::size_t> dims, perm;
  for (int j = 0; j < t; ++j) {
    dims.push_back(inst.dim_a());
    dims.push_back(inst.dim_b());
  }
  for (int j = 0; j < t; ++j) perm.push_back(static_cast<std::size_t>(2 * j + 1));
  for (int j = 0; j < t; ++j) perm.push_back(static_cast<std::size_t>(2 * j));
  return qla::permute_subsystems(product, dims, perm);
}

namespace {

std::size_t int_pow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

void check_params(const owsg::IVOWSG& inst, const CommitmentParams& params) {
  if (inst.lambda() != params.lambda) throw std::invalid_argument("instance / params lambda mismatch");
}

}  // namespace

CommitmentPair build_pair(const owsg::IVOWSG& inst, const CommitmentParams& params) {
  check_params(inst, params);
  const auto family = params.family();
  const auto hashes = hashfam::enumerate(family);
  const std::size_t keys = inst.key_count();
  const std::size_t dim_c2 = int_pow(inst.dim_b(), params.t);
  const std::size_t dim_r2 = int_pow(inst.dim_a(), params.t);
  qla::check_dense_cap(dim_c2 * dim_r2, kR2);

  std::vector<Key> support;
  for (Key k = 0; k < keys; ++k)
    if (inst.key_prob(k) > 0.0) support.push_back(k);
  qla::check_dense_cap(support.size() * hashes.size() * dim_c2 * dim_r2, kC1Hash);

  const qla::RegisterLayout classical({{kC1Key, keys},
                                       {kC1Hash, family.size()},
                                       {kR1Hash, family.size()},
                                       {kR1Value, family.range_size()},
                                       {kR3, keys}});
  const qla::RegisterLayout quantum({{kC2, dim_c2}, {kR2, dim_r2}});

  std::vector<ComplexVector> copy_vectors(support.size());
  parallel_for(support.size(), [&](std::size_t i) { copy_vectors[i] = copies(inst, support[i], params.t); });

  std::map<qla::Labels, ComplexVector> blocks0, blocks1;
  const double inv_h = 1.0 / static_cast<double>(family.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    const Key k = support[i];
    const ComplexVector amp = std::sqrt(inst.key_prob(k) * inv_h) * copy_vectors[i];
    for (const auto& h : hashes) {
      const std::uint32_t hi = h.index();
      blocks0.emplace(qla::Labels{k, hi, hi, h(k), 0u}, amp);
      blocks1.emplace(qla::Labels{k, hi, hi, h(k), k}, amp);
    }
  }
  return CommitmentPair{qla::LabeledState(classical, quantum, std::move(blocks0)),
                        qla::LabeledState(classical, quantum, std::move(blocks1)), params};
}

std::pair<DensityMatrix, DensityMatrix> reduced_commitments(const CommitmentPair& pair) {
  const auto keep = commitment_registers();
  return {qla::reduce_labeled(pair.psi0, keep), qla::reduce_labeled(pair.psi1, keep)};
}

DensityMatrix reduced_commitment_factored(const owsg::IVOWSG& inst, const CommitmentParams& params,
                                          int bit) {
  check_params(inst, params);
  if (bit != 0 && bit != 1) throw std::invalid_argument("bit must be 0 or 1");
  const auto family = params.family();
  const auto table = hashfam::value_table(family);
  const std::size_t keys = inst.key_count();
  const std::size_t n_hash = family.size();
  const std::size_t dim_c2 = int_pow(inst.dim_b(), params.t);
  const std::size_t dim = keys * n_hash * dim_c2;
  qla::check_dense_cap(dim * dim, kC1Key);

  // Tr_A(|Phi_k><Phi_k'|)^{(x)t}, only for the pairs that can appear.
  const auto layout = inst.purification_layout();
  std::vector<std::vector<ComplexMatrix>> cross(keys, std::vector<ComplexMatrix>(keys));
  parallel_for(keys, [&](std::size_t k) {
    for (std::size_t kp = 0; kp < keys; ++kp) {
      if (bit == 1 && kp != k) continue;
      const ComplexMatrix x =
          qla::partial_trace_outer(inst.purification(static_cast<Key>(k)),
                                   inst.purification(static_cast<Key>(kp)), layout, {"B"});
      if (x.size() == 1) {
        cross[k][kp] = ComplexMatrix::Constant(1, 1, std::pow(x(0, 0), params.t));
      } else {
        cross[k][kp] = qla::kron_power(x, params.t);
      }
    }
  });

  const auto dc = static_cast<Eigen::Index>(dim_c2);
  ComplexMatrix rho = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t h = 0; h < n_hash; ++h) {
    for (std::size_t k = 0; k < keys; ++k) {
      if (inst.key_prob(static_cast<Key>(k)) == 0.0) continue;
      for (std::size_t kp = 0; kp < keys; ++kp) {
        if (inst.key_prob(static_cast<Key>(kp)) == 0.0) continue;
        if (bit == 1 && kp != k) continue;
        if (table[h][k] != table[h][kp]) continue;
        const double w = std::sqrt(inst.key_prob(static_cast<Key>(k)) * inst.key_prob(static_cast<Key>(kp))) /
                         static_cast<double>(n_hash);
        const auto row = static_cast<Eigen::Index>(k * n_hash + h) * dc;
        const auto col = static_cast<Eigen::Index>(kp * n_hash + h) * dc;
        rho.block(row, col, dc, dc) = w * cross[k][kp];
      }
    }
  }
  return DensityMatrix((rho + rho.adjoint()) / 2.0);
}

HidingMetrics hiding_metrics(const DensityMatrix& rho0, const DensityMatrix& rho1) {
  HidingMetrics m;
  m.td = qla::trace_distance(rho0, rho1);
  m.fid = qla::fidelity(rho0, rho1);
  m.fvdg_lower_margin = m.td - (1.0 - std::sqrt(m.fid));
  m.fvdg_upper_margin = std::sqrt(1.0 - m.fid) - m.td;
  m.fvdg_holds = m.fvdg_lower_margin >= -1e-9 && m.fvdg_upper_margin >= -1e-9;
  m.c_dim = rho0.dim();
  return m;
}

HidingMetrics hiding_metrics(const CommitmentPair& pair) {
  const auto [rho0, rho1] = reduced_commitments(pair);
  return hiding_metrics(rho0, rho1);
}

HidingMetrics hiding_metrics_factored(const owsg::IVOWSG& inst, const CommitmentParams& params) {
  return hiding_metrics(reduced_commitment_factored(inst, params, 0),
                        reduced_commitment_factored(inst, params, 1));
}

HidingVerdict hiding_threshold_check(const HidingMetrics& metrics, double s, double tol) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("extractor success must be in [0, 1]");
  HidingVerdict v;
  v.s = s;
  v.fid_lower = s * s;
  v.td_upper = std::sqrt(1.0 - s * s);
  v.fid_ok = metrics.fid >= v.fid_lower - tol;
  v.td_ok = metrics.td <= v.td_upper + tol;
  return v;
}

}  // namespace qcl::commit
