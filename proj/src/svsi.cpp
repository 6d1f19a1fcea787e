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

#include "qcl/svsi.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qcl/errors.hpp"
#include "qcl/tolerances.hpp"

namespace qcl::svsi {

using qla::Complex;
using qla::ComplexMatrix;
using qla::ComplexVector;
using qla::DensityMatrix;

SVSIOWSG::SVSIOWSG(int lambda, std::vector<double> key_probs, std::vector<DensityMatrix> states,
                   qla::POVM inv_povm, double tol_inv)
    : lambda_(lambda),
      key_probs_(std::move(key_probs)),
      states_(std::move(states)),
      inv_povm_(std::move(inv_povm)),
      tol_inv_(tol_inv) {
  const auto& tol = tolerances();
  const std::size_t keys = key_count();
  if (lambda < 1 || lambda > 8) throw ValidityError("svsi: lambda out of range");
  if (key_probs_.size() != keys || states_.size() != keys)
    throw ValidityError("svsi: tables must have 2^lambda entries");
  if (!(tol_inv_ >= 0.0 && tol_inv_ < 1.0)) throw ValidityError("svsi: tol_inv must be in [0, 1)");
  double sum = 0.0;
  for (double p : key_probs_) {
    if (!(p >= 0.0)) throw ValidityError("svsi: negative key probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol.probability) throw ValidityError("svsi: key distribution does not sum to 1");

  for (std::size_t i = 0; i < inv_povm_.size(); ++i) {
    const auto label = inv_povm_.labels()[i];
    if (label != qla::kBottom && (label < 0 || static_cast<std::size_t>(label) >= keys))
      throw ValidityError("svsi: POVM label is not a key");
  }
  position_.resize(keys);
  for (Key k = 0; k < keys; ++k) {
    position_[k] = inv_povm_.find(k);
    if (position_[k] == inv_povm_.size()) throw ValidityError("svsi: POVM lacks an element for a key");
    if (states_[k].dim() != inv_povm_.dim()) throw ValidityError("svsi: state / POVM dimension mismatch");
  }

  for (Key k = 0; k < keys; ++k) {
    for (Key g = 0; g < keys; ++g) {
      const double pr = invert_prob(g, k);
      if (g == k && pr < 1.0 - tol_inv_ - tol.probability)
        throw ValidityError("svsi: Tr(Pi_k phi_k) = " + std::to_string(pr) + " below 1 - tol_inv");
      if (g != k && pr > tol_inv_ + tol.probability)
        throw ValidityError("svsi: cross inversion probability " + std::to_string(pr) + " exceeds tol_inv");
    }
  }
}

const ComplexMatrix& SVSIOWSG::inverter(Key k) const { return inv_povm_.element(position_.at(k)); }

double SVSIOWSG::invert_prob(Key guess, Key k) const {
  return std::clamp(inv_povm_.probability(position_.at(guess), states_.at(k).matrix()), 0.0, 1.0);
}

SVSIOWSG orthogonal_instance(int lambda, double tol_inv) {
  const std::size_t keys = std::size_t{1} << lambda;
  std::vector<DensityMatrix> states;
  std::vector<ComplexMatrix> elements;
  std::vector<qla::Outcome> labels;
  for (std::size_t k = 0; k < keys; ++k) {
    ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(keys), static_cast<Eigen::Index>(keys));
    p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
    states.emplace_back(p);
    elements.push_back(p);
    labels.push_back(static_cast<qla::Outcome>(k));
  }
  return SVSIOWSG(lambda, std::vector<double>(keys, 1.0 / static_cast<double>(keys)),
                  std::move(states), qla::POVM(std::move(labels), std::move(elements)), tol_inv);
}

SVSIOWSG near_orthogonal_instance(double overlap, double tol_inv) {
  constexpr int kLambda = 2;
  constexpr Eigen::Index kKeys = 4;
  const Eigen::MatrixXd gram = (1.0 - overlap) * Eigen::MatrixXd::Identity(kKeys, kKeys) +
                               overlap * Eigen::MatrixXd::Ones(kKeys, kKeys);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("overlap gives a singular Gram matrix");
  // Columns of G^{1/2} have Gram matrix G.
  const Eigen::MatrixXd root = solver.operatorSqrt();
  std::vector<DensityMatrix> states;
  for (Eigen::Index k = 0; k < kKeys; ++k) {
    const ComplexVector v = root.col(k).cast<Complex>();
    states.push_back(DensityMatrix::from_pure(v));
  }
  const std::vector<double> priors(kKeys, 0.25);
  qla::POVM inv = qla::pgm(states, priors);
  return SVSIOWSG(kLambda, priors, std::move(states), std::move(inv), tol_inv);
}

owsg::IVOWSG to_ivowsg(const SVSIOWSG& svsi) {
  const std::size_t keys = svsi.key_count();
  const auto dim_a = static_cast<Eigen::Index>(svsi.inv_povm().dim());
  const double cutoff = tolerances().pgm_support;

  std::vector<Eigen::SelfAdjointEigenSolver<ComplexMatrix>> eig;
  Eigen::Index dim_b = 1;
  for (const auto& s : svsi.states()) {
    eig.emplace_back(s.matrix());
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < dim_a; ++i) rank += eig.back().eigenvalues()(i) > cutoff ? 1 : 0;
    dim_b = std::max(dim_b, rank);
  }

  std::vector<ComplexVector> purifications;
  for (const auto& e : eig) {
    // Largest eigenvalues sit at the end (ascending order).
    ComplexVector phi = ComplexVector::Zero(dim_a * dim_b);
    for (Eigen::Index j = 0; j < dim_b; ++j) {
      const Eigen::Index col = dim_a - 1 - j;
      const double w = e.eigenvalues()(col);
      if (w <= cutoff) break;
      for (Eigen::Index a = 0; a < dim_a; ++a) phi(a * dim_b + j) = std::sqrt(w) * e.eigenvectors()(a, col);
    }
    phi /= phi.norm();
    purifications.push_back(std::move(phi));
  }

  std::vector<ComplexMatrix> acceptance;
  for (Key k = 0; k < keys; ++k) acceptance.push_back(svsi.inverter(k));
  return owsg::IVOWSG(svsi.lambda(), svsi.key_probs(), static_cast<std::size_t>(dim_a),
                      static_cast<std::size_t>(dim_b), std::move(purifications), svsi.states(),
                      std::move(acceptance));
}

SecurityAccounting security_accounting(const SVSIOWSG& svsi,
                                       const std::vector<std::vector<double>>& guesses) {
  const std::size_t keys = svsi.key_count();
  const double slack = tolerances().probability;
  if (guesses.size() != keys) throw std::invalid_argument("one guess distribution per key required");
  SecurityAccounting acc;
  for (Key k = 0; k < keys; ++k) {
    const auto& row = guesses[k];
    if (row.size() != keys) throw std::invalid_argument("guess distribution has wrong length");
    double sum = 0.0;
    for (double q : row) {
      if (q < 0.0) throw std::invalid_argument("negative guess probability");
      sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("guess distribution does not sum to 1");
    const double pk = svsi.key_probs()[k];
    for (Key g = 0; g < keys; ++g) {
      const double term = pk * row[g] * svsi.invert_prob(g, k);
      (g == k ? acc.diagonal : acc.off_diagonal) += term;
    }
    acc.exact_guess += pk * row[k];
    acc.off_diagonal_bound += pk * (1.0 - row[k]) * svsi.tol_inv();
  }
  acc.total = acc.diagonal + acc.off_diagonal;
  acc.bound = acc.exact_guess + svsi.tol_inv();
  acc.holds = acc.diagonal <= acc.exact_guess + slack &&
              acc.off_diagonal <= acc.off_diagonal_bound + slack && acc.total <= acc.bound + slack;
  return acc;
}

}  // namespace qcl::svsi
