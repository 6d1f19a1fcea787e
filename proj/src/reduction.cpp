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

#include "qcl/reduction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "qcl/errors.hpp"
#include "qcl/parallel.hpp"
#include "qcl/tolerances.hpp"

namespace qcl::reduction {

using qla::Complex;
using qla::ComplexMatrix;
using qla::ComplexVector;

namespace {

void check_tau(const ComplexVector& tau, std::size_t dim_z) {
  if (static_cast<std::size_t>(tau.size()) != dim_z) throw std::invalid_argument("advice state has wrong dimension");
  if (std::abs(tau.norm() - 1.0) > tolerances().norm) throw ValidityError("advice state is not normalized");
}

ComplexVector basis_vector(std::size_t dim, std::size_t i) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

}  // namespace

CheatingAttack CheatingAttack::from_blocks(extractor::BlockAttackUnitary u, ComplexVector tau) {
  check_tau(tau, u.dim_z);
  if (u.block_of.size() != u.n_hash * u.range) throw std::invalid_argument("block map has wrong size");
  const auto bd = static_cast<Eigen::Index>(u.block_dim());
  for (const auto& b : u.blocks)
    if (b.rows() != bd || b.cols() != bd) throw std::invalid_argument("attack block has wrong dimension");
  for (auto i : u.block_of)
    if (i >= u.blocks.size()) throw std::invalid_argument("block map points past the block list");
  CheatingAttack a;
  a.n_hash_ = u.n_hash;
  a.range_ = u.range;
  a.dim_r2_ = u.dim_r2;
  a.dim_r3_ = u.dim_r3;
  a.dim_z_ = u.dim_z;
  a.tau_ = std::move(tau);
  a.blocks_ = std::move(u);
  return a;
}

CheatingAttack CheatingAttack::from_dense(ComplexMatrix u, std::size_t n_hash, std::size_t range,
                                          std::size_t dim_r2, std::size_t dim_r3, ComplexVector tau) {
  const std::size_t base = n_hash * range * dim_r2 * dim_r3;
  const auto n = static_cast<std::size_t>(u.rows());
  if (u.rows() != u.cols() || base == 0 || n % base != 0)
    throw std::invalid_argument("dense attack dimension " + std::to_string(n) +
                                " is not a multiple of dim(R) = " + std::to_string(base));
  const std::size_t dim_z = n / base;
  check_tau(tau, dim_z);
  CheatingAttack a;
  a.n_hash_ = n_hash;
  a.range_ = range;
  a.dim_r2_ = dim_r2;
  a.dim_r3_ = dim_r3;
  a.dim_z_ = dim_z;
  a.tau_ = std::move(tau);
  a.dense_ = std::move(u);
  return a;
}

CheatingAttack CheatingAttack::identity(std::size_t n_hash, std::size_t range, std::size_t dim_r2,
                                        std::size_t dim_r3) {
  extractor::BlockAttackUnitary u;
  u.n_hash = n_hash;
  u.range = range;
  u.dim_r2 = dim_r2;
  u.dim_r3 = dim_r3;
  u.dim_z = 1;
  qla::check_dense_cap(u.block_dim() * u.block_dim(), commit::kR3);
  u.block_of.assign(n_hash * range, 0);
  const auto bd = static_cast<Eigen::Index>(u.block_dim());
  u.blocks.push_back(ComplexMatrix::Identity(bd, bd));
  return from_blocks(std::move(u), basis_vector(1, 0));
}

CheatingAttack CheatingAttack::extractor(const extractor::ExtractorPOVM& povm) {
  auto u = extractor::extractor_unitary(povm);
  const std::size_t dz = u.dim_z;
  return from_blocks(std::move(u), basis_vector(dz, 0));
}

double CheatingAttack::unitarity_defect() const {
  if (dense_) return qla::unitarity_defect(*dense_);
  double worst = 0.0;
  for (const auto& b : blocks_->blocks) worst = std::max(worst, qla::unitarity_defect(b));
  return worst;
}

std::vector<std::pair<std::size_t, ComplexVector>> CheatingAttack::apply(std::uint32_t h_index, std::uint32_t y,
                                                                          const ComplexVector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_r2_) throw std::invalid_argument("R2 vector has wrong dimension");
  const std::size_t bd = dim_r2_ * dim_r3_ * dim_z_;
  const std::size_t r1 = static_cast<std::size_t>(h_index) * range_ + y;
  // |x>_R2 |0>_R3 |tau>_Z
  ComplexVector in = ComplexVector::Zero(static_cast<Eigen::Index>(bd));
  for (std::size_t a = 0; a < dim_r2_; ++a)
    in.segment(static_cast<Eigen::Index>(a * dim_r3_ * dim_z_), static_cast<Eigen::Index>(dim_z_)) =
        x(static_cast<Eigen::Index>(a)) * tau_;
  std::vector<std::pair<std::size_t, ComplexVector>> out;
  if (blocks_) {
    out.emplace_back(r1, blocks_->block(h_index, y) * in);
    return out;
  }
  const auto b = static_cast<Eigen::Index>(bd);
  const ComplexVector full = dense_->middleCols(static_cast<Eigen::Index>(r1) * b, b) * in;
  for (std::size_t i = 0; i < n_hash_ * range_; ++i) {
    auto seg = full.segment(static_cast<Eigen::Index>(i) * b, b);
    if (seg.squaredNorm() > 0.0) out.emplace_back(i, seg);
  }
  return out;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("unitary file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_dense_unitary(const std::filesystem::path& path, const ComplexMatrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("unitary must be square");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  put_u64(os, static_cast<std::uint64_t>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      put_u64(os, std::bit_cast<std::uint64_t>(u(i, j).real()));
      put_u64(os, std::bit_cast<std::uint64_t>(u(i, j).imag()));
    }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

ComplexMatrix read_dense_unitary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open unitary file " + path.string());
  const std::uint64_t n = get_u64(is);
  if (n == 0) throw std::runtime_error("unitary file declares dimension 0");
  if (n > (std::uint64_t{1} << 16)) throw std::runtime_error("unitary file dimension too large");
  qla::check_dense_cap(static_cast<std::size_t>(n * n), "unitary_file");
  const auto d = static_cast<Eigen::Index>(n);
  ComplexMatrix u(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double re = std::bit_cast<double>(get_u64(is));
      const double im = std::bit_cast<double>(get_u64(is));
      u(i, j) = Complex(re, im);
    }
  if (is.peek() != std::char_traits<char>::eof()) throw std::runtime_error("unitary file has trailing bytes");
  return u;
}

namespace {

/// log2(floor(2^r)) without overflow for large r.
double log2_floor_pow2(double r) {
  if (r >= 53.0) return r;
  return std::log2(std::floor(std::exp2(r)));
}

struct KeyResult {
  std::vector<double> dist;
  ComplexVector z_sum;      // sum_h w z_{k,h}
  double norm_sum = 0.0;    // sum_h w ||z_{k,h}||
  double norm_sq_sum = 0.0; // sum_h w ||z_{k,h}||^2
  double restricted = 0.0;  // sum_h w ||<k|_R3 U ...||^2
};

}  // namespace

AdversaryReport run_adversary(const owsg::IVOWSG& inst, const commit::CommitmentParams& params,
                              const CheatingAttack& attack, std::optional<double> q_override) {
  if (inst.lambda() != params.lambda) throw std::invalid_argument("instance / params lambda mismatch");
  const auto family = params.family();
  const auto hashes = hashfam::enumerate(family);
  const std::size_t keys = inst.key_count();
  const std::size_t range = family.range_size();
  std::size_t dim_r2 = 1;
  for (int j = 0; j < params.t; ++j) dim_r2 *= inst.dim_a();
  if (attack.n_hash() != hashes.size() || attack.range() != range || attack.dim_r2() != dim_r2 ||
      attack.dim_r3() != keys)
    throw std::invalid_argument("attack dimensions do not match the commitment registers");
  const std::size_t dz = attack.dim_z();
  const std::size_t dr3 = attack.dim_r3();
  const double inv_h = 1.0 / static_cast<double>(hashes.size());
  const double inv_y = 1.0 / static_cast<double>(range);
  const double tol = tolerances().probability;

  std::vector<KeyResult> per_key(keys);
  parallel_for(keys, [&](std::size_t ki) {
    const auto k = static_cast<Key>(ki);
    KeyResult& res = per_key[ki];
    res.dist.assign(keys, 0.0);
    res.z_sum = ComplexVector::Zero(static_cast<Eigen::Index>(dz));
    const double prior = inst.key_prob(k);
    if (prior <= 0.0) return;
    const ComplexVector phi = commit::copies(inst, k, params.t);
    const std::size_t dim_c2 = static_cast<std::size_t>(phi.size()) / dim_r2;
    const ComplexMatrix x = Eigen::Map<const ComplexMatrix>(phi.data(), static_cast<Eigen::Index>(dim_r2),
                                                            static_cast<Eigen::Index>(dim_c2));
    const double w = prior * inv_h;
    for (const auto& h : hashes) {
      const std::uint32_t hk = h(k);
      ComplexVector z = ComplexVector::Zero(static_cast<Eigen::Index>(dz));
      double restricted = 0.0;
      for (std::uint32_t y = 0; y < range; ++y) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
          const ComplexVector col = x.col(c);
          for (const auto& [r1, out] : attack.apply(h.index(), y, col)) {
            for (std::size_t a = 0; a < dim_r2; ++a)
              for (std::size_t r = 0; r < dr3; ++r) {
                const double p = out.segment(static_cast<Eigen::Index>((a * dr3 + r) * dz),
                                             static_cast<Eigen::Index>(dz))
                                     .squaredNorm();
                res.dist[r] += p * inv_h * inv_y;
                if (y == hk && r == k) restricted += p;
              }
            if (y == hk && r1 == h.index() * range + y) {
              for (std::size_t a = 0; a < dim_r2; ++a)
                z += std::conj(col(static_cast<Eigen::Index>(a))) *
                     out.segment(static_cast<Eigen::Index>((a * dr3 + k) * dz), static_cast<Eigen::Index>(dz));
            }
          }
        }
      }
      res.z_sum += w * z;
      res.norm_sum += w * z.norm();
      res.norm_sq_sum += w * z.squaredNorm();
      res.restricted += w * restricted;
    }
  });

  AdversaryReport rep;
  rep.unitarity_defect = attack.unitarity_defect();
  ComplexVector z_total = ComplexVector::Zero(static_cast<Eigen::Index>(dz));
  double norm_sum = 0.0;
  rep.min_accept_good = 1.0;
  for (Key k = 0; k < keys; ++k) {
    const KeyResult& res = per_key[k];
    const double prior = inst.key_prob(k);
    const bool good = inst.accept(k, k) >= 0.5 - tol;
    if (good) rep.good_keys.push_back(k);
    rep.output_dist.push_back(res.dist);
    z_total += res.z_sum;
    norm_sum += res.norm_sum;
    rep.chain.cauchy += res.norm_sq_sum;
    (good ? rep.chain.restricted_good : rep.chain.restricted_bad) += res.restricted;
    if (prior <= 0.0) continue;
    rep.success_all += prior * res.dist[k];
    if (good) {
      rep.success_in_g += prior * res.dist[k];
      rep.min_accept_good = std::min(rep.min_accept_good, inst.accept(k, k));
    }
    for (Key kp = 0; kp < keys; ++kp) rep.win_prob += prior * res.dist[kp] * inst.accept(kp, k);
  }
  rep.chain.binding = z_total.squaredNorm();
  rep.chain.triangle = norm_sum * norm_sum;
  rep.chain.restricted = rep.chain.restricted_good + rep.chain.restricted_bad;
  const double slack = 1e-9;
  rep.chain.monotone = rep.chain.binding <= rep.chain.triangle + slack &&
                       rep.chain.triangle <= rep.chain.cauchy + slack &&
                       rep.chain.cauchy <= rep.chain.restricted + slack;
  rep.overlap = std::abs(attack.tau().dot(z_total));

  rep.hash_step_lower = rep.chain.restricted_good * inv_y;
  rep.hash_step_holds = rep.success_in_g >= rep.hash_step_lower - slack;
  rep.accept_step_holds = rep.win_prob >= rep.success_in_g * rep.min_accept_good - slack &&
                          rep.success_in_g * rep.min_accept_good >= rep.success_in_g / 2.0 - slack;

  if (q_override) {
    if (!(*q_override >= 1.0)) throw std::invalid_argument("q must be at least 1");
    rep.q = *q_override;
  } else {
    rep.q = rep.chain.binding > 0.0 ? 1.0 / rep.chain.binding : std::numeric_limits<double>::infinity();
  }
  rep.floor_2r = std::floor(std::exp2(params.r()));
  rep.bound_tight = 1.0 / (4.0 * rep.q * rep.floor_2r);
  rep.bound_final = 1.0 / (8.0 * rep.q * rep.floor_2r);
  rep.bound_range = 1.0 / (2.0 * rep.q * static_cast<double>(range));
  rep.success_meets_tight = rep.success_in_g >= rep.bound_tight - slack;
  rep.win_meets_final = rep.win_prob >= rep.bound_final - slack;
  rep.win_meets_range = rep.win_prob >= rep.bound_range - slack;
  rep.two_to_minus_delta = owsg::uniform_guess_winprob(inst);
  rep.beats_uniform_guess = rep.win_prob > rep.two_to_minus_delta + slack;
  return rep;
}

ContradictionVerdict contradiction_check(double delta, double q, double r) {
  if (!(q >= 1.0)) throw std::invalid_argument("q must be at least 1");
  if (!(r >= 0.0)) throw std::invalid_argument("r must be nonnegative");
  if (std::isnan(delta) || delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  ContradictionVerdict v;
  v.delta = delta;
  v.q = q;
  v.r = r;
  v.floor_2r = std::floor(std::exp2(std::min(r, 1000.0)));
  const double log2_denominator = std::log2(8.0 * q) + log2_floor_pow2(r);
  v.lhs = std::exp2(-log2_denominator);
  v.rhs = std::exp2(-delta);
  v.log2_margin = delta - log2_denominator;
  v.positive = v.log2_margin > 0.0;
  return v;
}

ContradictionScan contradiction_scan(double D, double q, int lambda_min, int lambda_max) {
  if (!(D > 0.0)) throw std::invalid_argument("D must be positive");
  if (lambda_min < 1 || lambda_max < lambda_min || lambda_max > 1000)
    throw std::invalid_argument("lambda grid must satisfy 1 <= lambda_min <= lambda_max <= 1000");
  ContradictionScan scan;
  scan.D = D;
  scan.q = q;
  for (int lambda = lambda_min; lambda <= lambda_max; ++lambda) {
    ContradictionPoint pt;
    pt.lambda = lambda;
    pt.symbolic_log2_margin = (0.5 + D) * lambda - std::log2(8.0 * q) - (0.5 + D / 2.0) * lambda;
    pt.symbolic_positive = pt.symbolic_log2_margin > 0.0;
    pt.concrete = contradiction_check((0.5 + D) * lambda, q, (0.5 + D / 2.0) * lambda);
    scan.points.push_back(pt);
  }
  for (auto it = scan.points.rbegin(); it != scan.points.rend() && it->concrete.positive; ++it)
    scan.crossover = it->lambda;
  return scan;
}

}  // namespace qcl::reduction
