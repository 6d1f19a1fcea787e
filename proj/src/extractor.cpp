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

#include "qcl/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "qcl/errors.hpp"
#include "qcl/parallel.hpp"
#include "qcl/rng.hpp"
#include "qcl/tolerances.hpp"

namespace qcl::extractor {

using qla::Complex;
using qla::ComplexMatrix;
using qla::ComplexVector;

namespace {

/// Z basis labels: keys 0..2^lambda-1, then the failure outcome.
std::vector<qla::Outcome> z_labels(int lambda) {
  std::vector<qla::Outcome> labels;
  for (std::size_t k = 0; k < (std::size_t{1} << lambda); ++k) labels.push_back(static_cast<qla::Outcome>(k));
  labels.push_back(qla::kBottom);
  return labels;
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::kExact ? "exact" : "sampled"; }

Backend parse_backend(std::string_view name) {
  if (name == "exact") return Backend::kExact;
  if (name == "sampled") return Backend::kSampled;
  throw std::invalid_argument("unknown backend '" + std::string(name) + "' (expected exact or sampled)");
}

ShadowConfig ShadowConfig::for_lambda(int lambda, Backend backend, std::uint64_t seed) {
  ShadowConfig cfg;
  cfg.omega = std::ldexp(1.0, -lambda);
  cfg.backend = backend;
  cfg.seed = seed;
  return cfg;
}

void ShadowConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < threshold && threshold < 1.0))
    throw std::invalid_argument("shadow: need 0 < epsilon < threshold < 1");
  if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("shadow: need 0 < omega < 1");
}

std::uint64_t ShadowConfig::samples(int lambda) const {
  return t_samples != 0 ? t_samples : hoeffding_samples(lambda, epsilon, omega);
}

std::uint64_t hoeffding_samples(int lambda, double epsilon, double omega) {
  if (!(epsilon > 0.0) || !(omega > 0.0 && omega < 1.0))
    throw std::invalid_argument("hoeffding_samples: need epsilon > 0, 0 < omega < 1");
  const double n = (std::log(2.0) * (lambda + 1) - std::log(omega)) / (2.0 * epsilon * epsilon);
  return static_cast<std::uint64_t>(std::ceil(n - 1e-9));
}

ShadowEstimates shadow_estimate(const owsg::IVOWSG& inst, Key k, const ShadowConfig& cfg, std::uint64_t run) {
  cfg.validate();
  const std::uint32_t keys = inst.key_count();
  if (k >= keys) throw std::invalid_argument("shadow_estimate: key out of range");
  ShadowEstimates b(keys);
  if (cfg.backend == Backend::kExact) {
    for (Key kp = 0; kp < keys; ++kp) b[kp] = inst.accept(kp, k);
    return b;
  }
  const std::uint64_t n = cfg.samples(inst.lambda());
  parallel_for(keys, [&](std::size_t kp) {
    auto rng = stream_engine(cfg.seed, {run, k, kp});
    const double p = inst.accept(static_cast<Key>(kp), k);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i) hits += uniform01(rng) < p ? 1 : 0;
    b[kp] = static_cast<double>(hits) / static_cast<double>(n);
  });
  return b;
}

ExtractionList build_list(const ShadowEstimates& est, const ShadowConfig& cfg) {
  ExtractionList list;
  for (std::size_t kp = 0; kp < est.size(); ++kp)
    if (est[kp] >= cfg.threshold) list.push_back(static_cast<Key>(kp));
  return list;
}

std::optional<Key> extract(const hashfam::HashFn& h, std::uint32_t y, const ExtractionList& list) {
  std::optional<Key> found;
  for (Key k : list) {
    if (h(k) != y) continue;
    if (found) return std::nullopt;
    found = k;
  }
  return found;
}

ExtractionReport success_prob_exact(const owsg::IVOWSG& inst, const hashfam::HashFamily& family,
                                    const ShadowConfig& cfg) {
  cfg.validate();
  if (family.lambda() != inst.lambda()) throw std::invalid_argument("hash family / instance lambda mismatch");
  const auto hashes = hashfam::enumerate(family);
  const std::uint32_t keys = inst.key_count();
  const double range = family.range_size();
  const double tol = tolerances().probability;

  ExtractionReport report;
  report.per_key.resize(keys);
  parallel_for(keys, [&](std::size_t ki) {
    const auto k = static_cast<Key>(ki);
    KeyExtraction& e = report.per_key[ki];
    e.key = k;
    e.prior = inst.key_prob(k);
    const auto list = build_list(shadow_estimate(inst, k, cfg), cfg);
    e.list_size = list.size();
    for (Key kp = 0; kp < keys; ++kp)
      if (inst.accept(kp, k) >= 0.5 - tol) ++e.good_size;
    e.in_list = false;
    e.list_in_good = true;
    for (Key kp : list) {
      if (kp == k) e.in_list = true;
      if (inst.accept(kp, k) < 0.5 - tol) e.list_in_good = false;
    }
    bool high_in_list = true;
    for (Key kp = 0; kp < keys; ++kp) {
      if (inst.accept(kp, k) >= 0.875 + tol &&
          std::find(list.begin(), list.end(), kp) == list.end())
        high_in_list = false;
    }
    e.sandwich = high_in_list && e.list_in_good;
    std::size_t hits = 0;
    for (const auto& h : hashes) {
      const auto got = extract(h, h(k), list);
      if (got && *got == k) ++hits;
    }
    e.success = static_cast<double>(hits) / static_cast<double>(hashes.size());
    e.pairwise_bound = 1.0 - (static_cast<double>(e.good_size) - 1.0) / range;
  });

  report.sandwich_all = true;
  report.small_good_sets = true;
  for (const auto& e : report.per_key) {
    report.success += e.prior * e.success;
    if (e.prior <= 0.0) continue;
    const bool sandwiched = e.in_list && e.list_in_good;
    if (sandwiched) {
      report.prob_list_sandwich += e.prior;
      report.pairwise_lower += e.prior * e.pairwise_bound;
    }
    report.sandwich_all = report.sandwich_all && e.sandwich;
    report.small_good_sets = report.small_good_sets && 2.0 * static_cast<double>(e.good_size) <= range;
  }
  return report;
}

std::size_t z_dim(int lambda) { return (std::size_t{1} << lambda) + 1; }

ExtractorPOVM::ExtractorPOVM(const owsg::IVOWSG& inst, const commit::CommitmentParams& params)
    : family_(params.family()),
      lambda_(inst.lambda()),
      dim_r2_(1),
      table_(hashfam::value_table(family_)),
      pgm_({qla::kBottom}, {ComplexMatrix::Identity(1, 1)}) {
  if (inst.lambda() != params.lambda) throw std::invalid_argument("instance / params lambda mismatch");
  if (inst.key_count() > 64) throw std::invalid_argument("extractor POVM supports at most 64 keys");
  for (int j = 0; j < params.t; ++j) dim_r2_ *= inst.dim_a();
  qla::check_dense_cap(dim_r2_ * dim_r2_ * inst.key_count(), commit::kR2);

  std::vector<qla::DensityMatrix> states;
  std::vector<double> priors;
  std::vector<Key> support;
  for (Key k = 0; k < inst.key_count(); ++k) {
    if (inst.key_prob(k) <= 0.0) continue;
    support.push_back(k);
    priors.push_back(inst.key_prob(k));
    states.emplace_back(qla::kron_power(inst.state(k).matrix(), params.t));
  }
  pgm_ = qla::pgm(states, priors);
  pgm_position_.assign(inst.key_count(), pgm_.size());
  for (std::size_t i = 0; i < support.size(); ++i) pgm_position_[support[i]] = pgm_.find(static_cast<qla::Outcome>(i));
}

std::uint64_t ExtractorPOVM::pattern(std::uint32_t h_index, std::uint32_t y) const {
  std::uint64_t mask = 0;
  const auto& row = table_.at(h_index);
  for (std::size_t k = 0; k < row.size(); ++k)
    if (row[k] == y && pgm_position_[k] < pgm_.size()) mask |= std::uint64_t{1} << k;
  return mask;
}

qla::POVM ExtractorPOVM::block_for_pattern(std::uint64_t mask) const {
  const std::size_t keys = std::size_t{1} << lambda_;
  const auto d = static_cast<Eigen::Index>(dim_r2_);
  std::vector<ComplexMatrix> elements;
  ComplexMatrix fail = ComplexMatrix::Zero(d, d);
  const std::size_t bottom = pgm_.find(qla::kBottom);
  if (bottom < pgm_.size()) fail += pgm_.element(bottom);
  for (std::size_t k = 0; k < keys; ++k) {
    const std::size_t pos = pgm_position_[k];
    if (pos < pgm_.size() && ((mask >> k) & 1u)) {
      elements.push_back(pgm_.element(pos));
    } else {
      elements.push_back(ComplexMatrix::Zero(d, d));
      if (pos < pgm_.size()) fail += pgm_.element(pos);
    }
  }
  elements.push_back(fail);
  return qla::POVM(z_labels(lambda_), std::move(elements));
}

qla::POVM ExtractorPOVM::block(std::uint32_t h_index, std::uint32_t y) const {
  return block_for_pattern(pattern(h_index, y));
}

qla::POVM ExtractorPOVM::dense() const {
  const std::size_t n_hash = family_.size();
  const std::size_t range = family_.range_size();
  const std::size_t dim = n_hash * range * dim_r2_;
  const std::size_t outcomes = z_dim(lambda_);
  qla::check_dense_cap(dim * dim * outcomes, commit::kR1Hash);
  const auto d = static_cast<Eigen::Index>(dim_r2_);
  std::vector<ComplexMatrix> elements(outcomes, ComplexMatrix::Zero(static_cast<Eigen::Index>(dim),
                                                                    static_cast<Eigen::Index>(dim)));
  std::map<std::uint64_t, qla::POVM> cache;
  for (std::uint32_t h = 0; h < n_hash; ++h) {
    for (std::uint32_t y = 0; y < range; ++y) {
      const auto mask = pattern(h, y);
      auto it = cache.find(mask);
      if (it == cache.end()) it = cache.emplace(mask, block_for_pattern(mask)).first;
      const auto off = static_cast<Eigen::Index>(h * range + y) * d;
      for (std::size_t a = 0; a < outcomes; ++a) elements[a].block(off, off, d, d) = it->second.element(a);
    }
  }
  return qla::POVM(z_labels(lambda_), std::move(elements));
}

ExtractorPOVM build_extractor_povm(const owsg::IVOWSG& inst, const commit::CommitmentParams& params) {
  return ExtractorPOVM(inst, params);
}

SummaryOverlap summary_overlap(const owsg::IVOWSG& inst, const ExtractorPOVM& povm, int t) {
  const auto hashes = hashfam::enumerate(povm.family());
  const double inv_h = 1.0 / static_cast<double>(hashes.size());
  const std::size_t bottom = z_dim(povm.lambda()) - 1;
  std::map<std::uint64_t, qla::POVM> cache;
  SummaryOverlap out;
  for (Key k = 0; k < inst.key_count(); ++k) {
    const double prior = inst.key_prob(k);
    if (prior <= 0.0) continue;
    const ComplexMatrix rho = qla::kron_power(inst.state(k).matrix(), t);
    if (static_cast<std::size_t>(rho.rows()) != povm.dim_r2())
      throw std::invalid_argument("summary_overlap: copy count does not match the POVM");
    for (const auto& h : hashes) {
      const auto mask = povm.pattern(h.index(), h(k));
      auto it = cache.find(mask);
      if (it == cache.end()) it = cache.emplace(mask, povm.block_for_pattern(mask)).first;
      out.summary_sum += prior * inv_h * it->second.probability(k, rho);
      if (k == 0) out.coincidence += prior * inv_h * it->second.probability(bottom, rho);
    }
  }
  return out;
}

ComplexMatrix cnot_z_to_r3(int lambda) {
  const std::size_t keys = std::size_t{1} << lambda;
  const std::size_t dz = z_dim(lambda);
  const auto dim = static_cast<Eigen::Index>(keys * dz);
  ComplexMatrix c = ComplexMatrix::Zero(dim, dim);
  for (std::size_t r = 0; r < keys; ++r) {
    for (std::size_t z = 0; z < dz; ++z) {
      const std::size_t out = z < keys ? (r ^ z) : r;
      c(static_cast<Eigen::Index>(out * dz + z), static_cast<Eigen::Index>(r * dz + z)) = 1.0;
    }
  }
  return c;
}

namespace {

/// V^dagger (I_R2 (x) CNOT) V on (R2, R3, Z), V acting on (R2, Z).
ComplexMatrix conjugated_cnot(const ComplexMatrix& v, std::size_t dr2, std::size_t dr3, std::size_t dz) {
  const std::size_t keys = dr3;
  const auto bd = static_cast<Eigen::Index>(dr2 * dr3 * dz);
  auto idx = [&](std::size_t a, std::size_t r, std::size_t z) {
    return static_cast<Eigen::Index>((a * dr3 + r) * dz + z);
  };
  ComplexMatrix w = ComplexMatrix::Zero(bd, bd);
  for (std::size_t a = 0; a < dr2; ++a)
    for (std::size_t z = 0; z < dz; ++z)
      for (std::size_t ap = 0; ap < dr2; ++ap)
        for (std::size_t zp = 0; zp < dz; ++zp) {
          const Complex x = v(static_cast<Eigen::Index>(a * dz + z), static_cast<Eigen::Index>(ap * dz + zp));
          if (x == Complex(0.0)) continue;
          for (std::size_t r = 0; r < dr3; ++r) w(idx(a, r, z), idx(ap, r, zp)) = x;
        }
  ComplexMatrix cw(bd, bd);
  for (std::size_t a = 0; a < dr2; ++a)
    for (std::size_t r = 0; r < dr3; ++r)
      for (std::size_t z = 0; z < dz; ++z) {
        const std::size_t rout = z < keys ? (r ^ z) : r;
        cw.row(idx(a, rout, z)) = w.row(idx(a, r, z));
      }
  return w.adjoint() * cw;
}

}  // namespace

BlockAttackUnitary extractor_unitary(const ExtractorPOVM& povm) {
  BlockAttackUnitary u;
  u.n_hash = povm.family().size();
  u.range = povm.family().range_size();
  u.dim_r2 = povm.dim_r2();
  u.dim_r3 = std::size_t{1} << povm.lambda();
  u.dim_z = z_dim(povm.lambda());
  const std::size_t bd = u.block_dim();
  qla::check_dense_cap(bd * bd, commit::kR3);

  std::map<std::uint64_t, std::uint32_t> index;
  std::vector<std::uint64_t> masks;
  u.block_of.resize(u.n_hash * u.range);
  for (std::uint32_t h = 0; h < u.n_hash; ++h) {
    for (std::uint32_t y = 0; y < u.range; ++y) {
      const auto mask = povm.pattern(h, y);
      auto [it, inserted] = index.emplace(mask, static_cast<std::uint32_t>(masks.size()));
      if (inserted) masks.push_back(mask);
      u.block_of[h * u.range + y] = it->second;
    }
  }
  qla::check_dense_cap(bd * bd * masks.size(), commit::kR3);
  u.blocks.resize(masks.size());
  parallel_for(masks.size(), [&](std::size_t i) {
    const ComplexMatrix v = qla::naimark_dilate(povm.block_for_pattern(masks[i]));
    u.blocks[i] = conjugated_cnot(v, u.dim_r2, u.dim_r3, u.dim_z);
  });
  return u;
}

ComplexMatrix BlockAttackUnitary::to_dense() const {
  const std::size_t bd = block_dim();
  const std::size_t dim = n_hash * range * bd;
  qla::check_dense_cap(dim * dim, commit::kR1Hash);
  const auto b = static_cast<Eigen::Index>(bd);
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n_hash * range; ++i) {
    const auto off = static_cast<Eigen::Index>(i) * b;
    out.block(off, off, b, b) = blocks[block_of[i]];
  }
  return out;
}

namespace {

struct PairView {
  std::size_t dim_c2;
  std::size_t dim_r2;
  // psi1 blocks keyed by (C1.k, C1.h, R1.h, R1.y); value (R3 label, amplitudes).
  std::multimap<qla::Labels, std::pair<std::uint32_t, const ComplexVector*>> reveal1;
};

PairView view_pair(const commit::CommitmentPair& pair) {
  PairView view;
  const auto& q = pair.psi0.quantum();
  view.dim_c2 = q[q.index_of(commit::kC2)].dim;
  view.dim_r2 = q[q.index_of(commit::kR2)].dim;
  for (const auto& [labels, vec] : pair.psi1.blocks())
    view.reveal1.emplace(qla::Labels(labels.begin(), labels.begin() + 4), std::make_pair(labels[4], &vec));
  return view;
}

/// Amplitudes of a (C2, R2) block as a dim_r2 x dim_c2 matrix (column c is the R2 vector for C2 = c).
ComplexMatrix as_columns(const ComplexVector& v, std::size_t dim_c2, std::size_t dim_r2) {
  return Eigen::Map<const ComplexMatrix>(v.data(), static_cast<Eigen::Index>(dim_r2),
                                         static_cast<Eigen::Index>(dim_c2));
}

}  // namespace

UhlmannOverlap uhlmann_unitary_overlap(const commit::CommitmentPair& pair, const BlockAttackUnitary& u) {
  const PairView view = view_pair(pair);
  if (view.dim_r2 != u.dim_r2) throw std::invalid_argument("attack unitary does not match R2");
  UhlmannOverlap out;
  for (const auto& blk : u.blocks) out.max_unitarity_defect = std::max(out.max_unitarity_defect, qla::unitarity_defect(blk));
  const auto dr2 = static_cast<Eigen::Index>(u.dim_r2);
  Complex total = 0.0;
  for (const auto& [labels, v0] : pair.psi0.blocks()) {
    const qla::Labels head(labels.begin(), labels.begin() + 4);
    const ComplexMatrix& blk = u.block(labels[2], labels[3]);
    const ComplexMatrix x0 = as_columns(v0, view.dim_c2, view.dim_r2);
    auto [lo, hi] = view.reveal1.equal_range(head);
    for (auto it = lo; it != hi; ++it) {
      const auto [r1, v1] = it->second;
      ComplexMatrix s(dr2, dr2);
      for (Eigen::Index a = 0; a < dr2; ++a)
        for (Eigen::Index ap = 0; ap < dr2; ++ap)
          s(a, ap) = blk((a * static_cast<Eigen::Index>(u.dim_r3) + r1) * static_cast<Eigen::Index>(u.dim_z),
                         (ap * static_cast<Eigen::Index>(u.dim_r3) + labels[4]) * static_cast<Eigen::Index>(u.dim_z));
      const ComplexMatrix x1 = as_columns(*v1, view.dim_c2, view.dim_r2);
      total += (x1.adjoint() * s * x0).trace();
    }
  }
  out.overlap = total.real();
  out.imag = total.imag();
  return out;
}

UhlmannOverlap uhlmann_unitary_overlap(const owsg::IVOWSG& inst, const commit::CommitmentPair& pair,
                                       const ExtractorPOVM& povm) {
  try {
    return uhlmann_unitary_overlap(pair, extractor_unitary(povm));
  } catch (const DimensionCapError&) {
    UhlmannOverlap out;
    out.overlap = summary_overlap(inst, povm, pair.params.t).total();
    out.fallback = true;
    return out;
  }
}

UhlmannOverlap uhlmann_unitary_overlap_dense(const commit::CommitmentPair& pair, const ExtractorPOVM& povm) {
  const PairView view = view_pair(pair);
  if (view.dim_r2 != povm.dim_r2()) throw std::invalid_argument("POVM does not match R2");
  const std::size_t keys = std::size_t{1} << povm.lambda();
  const std::size_t dz = z_dim(povm.lambda());
  const std::size_t range = povm.family().range_size();
  const std::size_t d1 = povm.family().size() * range * view.dim_r2;
  qla::check_dense_cap(d1 * dz * d1 * dz, commit::kR1Hash);
  const ComplexMatrix v = qla::naimark_dilate(povm.dense());
  UhlmannOverlap out;
  out.max_unitarity_defect = qla::unitarity_defect(v);

  const auto dr2 = static_cast<Eigen::Index>(view.dim_r2);
  const auto z = static_cast<Eigen::Index>(dz);
  Complex total = 0.0;
  for (const auto& [labels, v0] : pair.psi0.blocks()) {
    const qla::Labels head(labels.begin(), labels.begin() + 4);
    const auto r0 = labels[4];
    const auto base = static_cast<Eigen::Index>(labels[2] * range + labels[3]) * dr2;
    // Columns of V for input (h, y, a, Z = 0).
    ComplexMatrix cols(v.rows(), dr2);
    for (Eigen::Index a = 0; a < dr2; ++a) cols.col(a) = v.col((base + a) * z);
    const ComplexMatrix y0 = cols * as_columns(v0, view.dim_c2, view.dim_r2);
    auto [lo, hi] = view.reveal1.equal_range(head);
    for (auto it = lo; it != hi; ++it) {
      const auto [r1, v1] = it->second;
      const ComplexMatrix y1 = cols * as_columns(*v1, view.dim_c2, view.dim_r2);
      for (std::size_t zz = 0; zz < dz; ++zz) {
        const bool match = zz < keys ? ((r0 ^ zz) == r1) : (r0 == r1);
        if (!match) continue;
        for (Eigen::Index row = static_cast<Eigen::Index>(zz); row < v.rows(); row += z)
          total += y1.row(row).dot(y0.row(row));
      }
    }
  }
  out.overlap = total.real();
  out.imag = total.imag();
  return out;
}

}  // namespace qcl::extractor
