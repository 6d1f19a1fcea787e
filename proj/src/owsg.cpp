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

#include "qcl/owsg.hpp"

#include <cmath>
#include <stdexcept>

#include "qcl/errors.hpp"
#include "qcl/parallel.hpp"
#include "qcl/tolerances.hpp"

namespace qcl::owsg {

using qla::Complex;
using qla::ComplexMatrix;
using qla::ComplexVector;
using qla::DensityMatrix;

std::string key_string(Key k, int lambda) {
  std::string s(static_cast<std::size_t>(lambda), '0');
  for (int i = 0; i < lambda; ++i)
    if ((k >> (lambda - 1 - i)) & 1u) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

namespace {

std::vector<DensityMatrix> reduce_all(const std::vector<ComplexVector>& purifications,
                                      const qla::RegisterLayout& layout) {
  std::vector<DensityMatrix> states;
  states.reserve(purifications.size());
  for (const auto& phi : purifications)
    states.emplace_back(qla::partial_trace_outer(phi, phi, layout, {"A"}));
  return states;
}

void check_shapes(int lambda, const std::vector<double>& probs, std::size_t dim_a,
                  std::size_t dim_b, const std::vector<ComplexVector>& purifications,
                  const std::vector<ComplexMatrix>& acceptance) {
  if (lambda < 1 || lambda > 16) throw ValidityError("lambda out of range");
  const std::size_t keys = std::size_t{1} << lambda;
  if (probs.size() != keys || purifications.size() != keys || acceptance.size() != keys)
    throw ValidityError("instance tables must have 2^lambda entries");
  qla::check_dense_cap(keys * dim_a * dim_a, "A");
  qla::check_dense_cap(keys * dim_a * dim_b, "B");
}

}  // namespace

IVOWSG::IVOWSG(int lambda, std::vector<double> key_probs, std::size_t dim_a, std::size_t dim_b,
               std::vector<ComplexVector> purifications, std::vector<ComplexMatrix> acceptance)
    : lambda_(lambda),
      key_probs_(std::move(key_probs)),
      dim_a_(dim_a),
      dim_b_(dim_b),
      purifications_(std::move(purifications)),
      acceptance_(std::move(acceptance)) {
  check_shapes(lambda_, key_probs_, dim_a_, dim_b_, purifications_, acceptance_);
  for (const auto& phi : purifications_)
    if (static_cast<std::size_t>(phi.size()) != dim_a_ * dim_b_)
      throw ValidityError("purification has wrong dimension");
  states_ = reduce_all(purifications_, purification_layout());
  validate_and_tabulate();
}

IVOWSG::IVOWSG(int lambda, std::vector<double> key_probs, std::size_t dim_a, std::size_t dim_b,
               std::vector<ComplexVector> purifications, std::vector<DensityMatrix> states,
               std::vector<ComplexMatrix> acceptance)
    : lambda_(lambda),
      key_probs_(std::move(key_probs)),
      dim_a_(dim_a),
      dim_b_(dim_b),
      purifications_(std::move(purifications)),
      states_(std::move(states)),
      acceptance_(std::move(acceptance)) {
  check_shapes(lambda_, key_probs_, dim_a_, dim_b_, purifications_, acceptance_);
  if (states_.size() != purifications_.size()) throw ValidityError("state count mismatch");
  const auto reduced = reduce_all(purifications_, purification_layout());
  for (std::size_t k = 0; k < states_.size(); ++k) {
    if (states_[k].dim() != dim_a_) throw ValidityError("state has wrong dimension");
    if ((reduced[k].matrix() - states_[k].matrix()).cwiseAbs().maxCoeff() > tolerances().trace)
      throw ValidityError("purification does not reduce to the given state");
  }
  validate_and_tabulate();
}

void IVOWSG::validate_and_tabulate() {
  const auto& tol = tolerances();
  double sum = 0.0;
  for (double p : key_probs_) {
    if (!(p >= 0.0)) throw ValidityError("negative key probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol.probability) throw ValidityError("key distribution does not sum to 1");
  for (const auto& phi : purifications_)
    if (std::abs(phi.norm() - 1.0) > tol.norm) throw ValidityError("purification is not normalized");
  const auto d = static_cast<Eigen::Index>(dim_a_);
  for (const auto& e : acceptance_) {
    if (e.rows() != d || e.cols() != d) throw ValidityError("acceptance operator has wrong dimension");
    if (qla::hermiticity_defect(e) > tol.hermitian) throw ValidityError("acceptance operator not Hermitian");
    const auto ev = qla::hermitian_eigenvalues(e);
    if (ev.minCoeff() < -tol.psd || ev.maxCoeff() > 1.0 + tol.psd)
      throw ValidityError("acceptance operator not between 0 and I");
  }

  const std::size_t keys = key_count();
  accept_.assign(keys, std::vector<double>(keys, 0.0));
  parallel_for(keys, [&](std::size_t k) {
    const ComplexMatrix& phi = states_[k].matrix();
    for (std::size_t kg = 0; kg < keys; ++kg) {
      // Tr(E phi) = sum_ij E_ij phi_ji
      const double v = (acceptance_[kg].cwiseProduct(phi.transpose())).sum().real();
      accept_[k][kg] = std::clamp(v, 0.0, 1.0);
    }
  });
}

qla::RegisterLayout IVOWSG::purification_layout() const {
  return qla::RegisterLayout({{"A", dim_a_}, {"B", dim_b_}});
}

std::string_view to_string(ToyKind kind) {
  switch (kind) {
    case ToyKind::kBb84Pure: return "bb84-pure";
    case ToyKind::kBb84Depolarized: return "bb84-depolarized";
    case ToyKind::kConstant: return "constant";
    case ToyKind::kOrthogonal: return "orthogonal";
  }
  return "?";
}

ToyKind parse_kind(std::string_view name) {
  for (auto kind : {ToyKind::kBb84Pure, ToyKind::kBb84Depolarized, ToyKind::kConstant,
                    ToyKind::kOrthogonal})
    if (to_string(kind) == name) return kind;
  throw std::invalid_argument("unknown instance kind '" + std::string(name) + "'");
}

namespace {

// Single-qubit encoding state |b(bit)> and its orthogonal complement.
ComplexVector encoding(unsigned bit, bool complement) {
  const double s = 1.0 / std::sqrt(2.0);
  if (bit == 0) return complement ? ComplexVector{{0.0, 1.0}} : ComplexVector{{1.0, 0.0}};
  return complement ? ComplexVector{{s, -s}} : ComplexVector{{s, s}};
}

unsigned bit_of(Key k, int lambda, int i) { return (k >> (lambda - 1 - i)) & 1u; }

ComplexMatrix product_projector(Key k, int lambda) {
  ComplexVector v = ComplexVector::Ones(1);
  for (int i = 0; i < lambda; ++i) v = qla::kron(v, encoding(bit_of(k, lambda, i), false));
  return v * v.adjoint();
}

}  // namespace

IVOWSG make_instance(const ToyInstance& spec) {
  const int lambda = spec.lambda;
  if (lambda < 1 || lambda > 8) throw std::invalid_argument("toy instance lambda must be in [1, 8]");
  if (spec.eta < 0.0 || spec.eta > 1.0) throw std::invalid_argument("eta must be in [0, 1]");
  const std::size_t keys = std::size_t{1} << lambda;
  std::vector<double> probs = spec.key_probs.value_or(std::vector<double>(keys, 1.0 / static_cast<double>(keys)));
  if (probs.size() != keys)
    throw std::invalid_argument("key distribution must have 2^lambda = " + std::to_string(keys) + " entries");

  const std::size_t qubits_dim = keys;
  std::vector<ComplexVector> purifications;
  std::vector<ComplexMatrix> acceptance;
  std::size_t dim_a = qubits_dim, dim_b = 1;

  switch (spec.kind) {
    case ToyKind::kBb84Pure:
      qla::check_dense_cap(keys * qubits_dim * qubits_dim, "A");
      for (Key k = 0; k < keys; ++k) {
        ComplexVector v = ComplexVector::Ones(1);
        for (int i = 0; i < lambda; ++i) v = qla::kron(v, encoding(bit_of(k, lambda, i), false));
        purifications.push_back(std::move(v));
        acceptance.push_back(product_projector(k, lambda));
      }
      break;
    case ToyKind::kBb84Depolarized: {
      qla::check_dense_cap(keys * qubits_dim * qubits_dim, "A");
      dim_b = qubits_dim;
      const double keep = std::sqrt(1.0 - spec.eta / 2.0);
      const double flip = std::sqrt(spec.eta / 2.0);
      // Build in (A1 B1 A2 B2 ...) order, then move all A factors first.
      std::vector<std::size_t> dims(static_cast<std::size_t>(2 * lambda), 2), perm;
      for (int i = 0; i < lambda; ++i) perm.push_back(static_cast<std::size_t>(2 * i));
      for (int i = 0; i < lambda; ++i) perm.push_back(static_cast<std::size_t>(2 * i + 1));
      for (Key k = 0; k < keys; ++k) {
        ComplexVector v = ComplexVector::Ones(1);
        for (int i = 0; i < lambda; ++i) {
          const unsigned b = bit_of(k, lambda, i);
          const ComplexVector pair = keep * qla::kron(encoding(b, false), ComplexVector{{1.0, 0.0}}) +
                                     flip * qla::kron(encoding(b, true), ComplexVector{{0.0, 1.0}});
          v = qla::kron(v, pair);
        }
        purifications.push_back(qla::permute_subsystems(v, dims, perm));
        acceptance.push_back(product_projector(k, lambda));
      }
      break;
    }
    case ToyKind::kConstant:
      dim_a = 2;
      for (Key k = 0; k < keys; ++k) {
        purifications.push_back(ComplexVector{{1.0, 0.0}});
        acceptance.push_back(ComplexMatrix::Identity(2, 2));
      }
      break;
    case ToyKind::kOrthogonal:
      qla::check_dense_cap(keys * qubits_dim * qubits_dim, "A");
      for (Key k = 0; k < keys; ++k) {
        ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(keys));
        v(k) = 1.0;
        acceptance.push_back(v * v.adjoint());
        purifications.push_back(std::move(v));
      }
      break;
  }
  return IVOWSG(lambda, std::move(probs), dim_a, dim_b, std::move(purifications), std::move(acceptance));
}

double accept_prob(const IVOWSG& inst, Key k_guess, Key k) {
  if (k_guess >= inst.key_count() || k >= inst.key_count()) throw std::out_of_range("key out of range");
  return inst.accept(k_guess, k);
}

double correctness_prob(const IVOWSG& inst) {
  double s = 0.0;
  for (Key k = 0; k < inst.key_count(); ++k) s += inst.key_prob(k) * inst.accept(k, k);
  return s;
}

std::vector<Key> good_set(const IVOWSG& inst, Key k, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("good_set: p must exceed 1");
  const double threshold = 1.0 - 1.0 / p;
  std::vector<Key> out;
  for (Key kg = 0; kg < inst.key_count(); ++kg)
    if (inst.accept(kg, k) >= threshold - tolerances().probability) out.push_back(kg);
  return out;
}

double uniform_guess_winprob(const IVOWSG& inst) {
  const double guess = 1.0 / static_cast<double>(inst.key_count());
  double s = 0.0;
  for (Key k = 0; k < inst.key_count(); ++k) {
    double row = 0.0;
    for (Key kg = 0; kg < inst.key_count(); ++kg) row += inst.accept(kg, k);
    s += inst.key_prob(k) * guess * row;
  }
  return s;
}

double empirical_delta(const IVOWSG& inst) {
  const double w = uniform_guess_winprob(inst);
  return w > 0.0 ? -std::log2(w) : kInfiniteDelta;
}

GoodSetReport lemma1_report(const IVOWSG& inst, double p, double r) {
  if (!(p > 1.0)) throw std::invalid_argument("lemma1_report: p must exceed 1");
  if (!(r >= 0.0)) throw std::invalid_argument("lemma1_report: r must be nonnegative");
  const double slack = tolerances().probability;
  const double two_r = std::exp2(r);
  const double guess = 1.0 / static_cast<double>(inst.key_count());

  GoodSetReport rep;
  rep.p = p;
  rep.r = r;
  rep.threshold = 1.0 - 1.0 / p;
  rep.winprob = uniform_guess_winprob(inst);
  rep.delta_emp = empirical_delta(inst);
  for (Key k = 0; k < inst.key_count(); ++k) {
    auto g = good_set(inst, k, p);
    const auto size = static_cast<double>(g.size());
    const bool self = std::find(g.begin(), g.end(), k) != g.end();
    if (size > two_r) {
      rep.large_keys.push_back(k);
      rep.mass_large += inst.key_prob(k);
      double inner = 0.0;
      for (Key kg : g) inner += guess * inst.accept(kg, k);
      rep.chain_middle += inst.key_prob(k) * inner;
    } else {
      if (size >= 1.0) rep.prob_nonempty_small += inst.key_prob(k);
      if (self) rep.prob_self_small += inst.key_prob(k);
    }
    rep.good_sets.push_back(std::move(g));
  }
  rep.chain_lhs = rep.mass_large * two_r * guess * rep.threshold;
  rep.chain_holds = rep.chain_lhs <= rep.chain_middle + slack && rep.chain_middle <= rep.winprob + slack;
  rep.mass_bound = std::exp2(-rep.delta_emp) * static_cast<double>(inst.key_count()) /
                   (two_r * rep.threshold);
  rep.mass_bound_holds = rep.mass_large <= rep.mass_bound + slack;
  rep.vacuous = rep.mass_bound >= 1.0;
  rep.sandwich_holds = rep.prob_nonempty_small + slack >= rep.prob_self_small;
  return rep;
}

}  // namespace qcl::owsg
