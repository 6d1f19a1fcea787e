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

#include "doctest.h"

#include <cmath>
#include <random>

#include "qcl/errors.hpp"
#include "qcl/owsg.hpp"

using namespace qcl;
using namespace qcl::owsg;

namespace {

IVOWSG toy(ToyKind kind, int lambda, double eta = 0.0) {
  ToyInstance spec;
  spec.kind = kind;
  spec.lambda = lambda;
  spec.eta = eta;
  return make_instance(spec);
}

/// Random instance: Haar purifications and acceptance operators U diag(u) U^dagger, u in [0, 1].
IVOWSG random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> lam(1, 3), da(2, 4), db(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int lambda = lam(rng);
  const std::size_t dim_a = static_cast<std::size_t>(da(rng));
  const std::size_t dim_b = static_cast<std::size_t>(db(rng));
  const std::size_t keys = std::size_t{1} << lambda;
  std::vector<double> probs(keys);
  double total = 0.0;
  for (auto& p : probs) total += (p = unit(rng) + 0.05);
  for (auto& p : probs) p /= total;
  std::vector<qla::ComplexVector> purifications;
  std::vector<qla::ComplexMatrix> acceptance;
  for (std::size_t k = 0; k < keys; ++k) {
    purifications.push_back(qla::random_state(dim_a * dim_b, rng));
    const qla::ComplexMatrix u = qla::random_unitary(dim_a, rng);
    Eigen::VectorXd diag(static_cast<Eigen::Index>(dim_a));
    for (Eigen::Index i = 0; i < diag.size(); ++i) diag(i) = unit(rng);
    const qla::ComplexMatrix m = u * diag.cast<qla::Complex>().asDiagonal() * u.adjoint();
    acceptance.push_back((m + m.adjoint()) / 2.0);
  }
  return IVOWSG(lambda, probs, dim_a, dim_b, purifications, acceptance);
}

}  // namespace

TEST_CASE("key strings are most-significant bit first") {
  CHECK(key_string(1, 3) == "001");
  CHECK(key_string(6, 3) == "110");
  CHECK(parse_kind(to_string(ToyKind::kBb84Depolarized)) == ToyKind::kBb84Depolarized);
  CHECK_THROWS(parse_kind("nope"));
}

TEST_CASE("bb84 acceptance table for key 00") {
  const auto inst = toy(ToyKind::kBb84Pure, 2);
  CHECK(accept_prob(inst, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(accept_prob(inst, 1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(accept_prob(inst, 2, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(accept_prob(inst, 3, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(accept_prob(inst, 4, 0), std::out_of_range);
}

TEST_CASE("bb84 uniform guessing wins with probability (3/4)^lambda") {
  for (int lambda = 1; lambda <= 5; ++lambda) {
    const auto inst = toy(ToyKind::kBb84Pure, lambda);
    CHECK(uniform_guess_winprob(inst) == doctest::Approx(std::pow(0.75, lambda)).epsilon(1e-12));
    CHECK(empirical_delta(inst) == doctest::Approx(-lambda * std::log2(0.75)).epsilon(1e-12));
    CHECK(correctness_prob(inst) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("depolarized bb84 correctness and guessing") {
  for (double eta : {0.0, 0.1, 0.5, 1.0}) {
    for (int lambda = 1; lambda <= 3; ++lambda) {
      const auto inst = toy(ToyKind::kBb84Depolarized, lambda, eta);
      CHECK(inst.dim_b() == inst.dim_a());
      CHECK(correctness_prob(inst) == doctest::Approx(std::pow(1.0 - eta / 2.0, lambda)).epsilon(1e-12));
      CHECK(uniform_guess_winprob(inst) == doctest::Approx(std::pow((3.0 - eta) / 4.0, lambda)).epsilon(1e-12));
    }
  }
}

TEST_CASE("constant and orthogonal instances") {
  const auto constant = toy(ToyKind::kConstant, 3);
  CHECK(empirical_delta(constant) == doctest::Approx(0.0));
  CHECK(good_set(constant, 5, 2.0).size() == 8);
  const auto orth = toy(ToyKind::kOrthogonal, 3);
  CHECK(empirical_delta(orth) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(good_set(orth, 5, 2.0) == std::vector<Key>{5});
}

TEST_CASE("instance validation") {
  ToyInstance spec;
  spec.lambda = 2;
  spec.key_probs = std::vector<double>{0.5, 0.5};
  CHECK_THROWS(make_instance(spec));
  spec.key_probs = std::vector<double>{0.5, 0.5, 0.5, -0.5};
  CHECK_THROWS(make_instance(spec));
  spec.key_probs.reset();
  spec.eta = 2.0;
  CHECK_THROWS(make_instance(spec));
  // Acceptance operator above the identity.
  std::vector<qla::ComplexVector> purif(2, qla::ComplexVector::Ones(2) / std::sqrt(2.0));
  std::vector<qla::ComplexMatrix> acc(2, 2.0 * qla::ComplexMatrix::Identity(2, 2));
  CHECK_THROWS_AS(IVOWSG(1, {0.5, 0.5}, 2, 1, purif, acc), ValidityError);
}

TEST_CASE("good-set counting on bb84 with lambda = 2") {
  const auto inst = toy(ToyKind::kBb84Pure, 2);
  // p = 2 gives threshold 1/2: each key plus its two Hamming neighbours.
  auto rep = lemma1_report(inst, 2.0, 1.0);
  CHECK(rep.threshold == doctest::Approx(0.5));
  for (const auto& g : rep.good_sets) CHECK(g.size() == 3);
  CHECK(rep.large_keys.size() == 4);
  CHECK(rep.mass_large == doctest::Approx(1.0));
  CHECK(rep.chain_lhs == doctest::Approx(0.25));
  CHECK(rep.chain_middle == doctest::Approx(0.5));
  CHECK(rep.winprob == doctest::Approx(0.5625));
  CHECK(rep.chain_holds);
  CHECK(rep.mass_bound == doctest::Approx(2.25));
  CHECK(rep.vacuous);

  rep = lemma1_report(inst, 2.0, 2.0);
  CHECK(rep.large_keys.empty());
  CHECK(rep.prob_nonempty_small == doctest::Approx(1.0));
  CHECK(rep.prob_self_small == doctest::Approx(1.0));
  CHECK(rep.sandwich_holds);

  CHECK_THROWS(lemma1_report(inst, 1.0, 1.0));
  CHECK_THROWS(lemma1_report(inst, 2.0, -1.0));
}

TEST_CASE("orthogonal keys never have large good sets") {
  const auto inst = toy(ToyKind::kOrthogonal, 4);
  const auto rep = lemma1_report(inst, 4.0, 0.0);
  CHECK(rep.mass_large == 0.0);
  CHECK(rep.mass_bound == doctest::Approx(std::exp2(-4.0) * 16.0 / 0.75));
  CHECK(rep.mass_bound_holds);
}

TEST_CASE("property: the large-good-set chain and mass bound hold on random instances") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> pd(1.05, 8.0), rd(0.0, 3.0);
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = random_instance(rng);
    const double p = pd(rng);
    const double r = rd(rng);
    CAPTURE(trial);
    const auto rep = lemma1_report(inst, p, r);
    CHECK(rep.chain_holds);
    CHECK(rep.mass_bound_holds);
    CHECK(rep.sandwich_holds);
    CHECK(rep.chain_lhs <= rep.chain_middle + 1e-12);
    CHECK(rep.chain_middle <= rep.winprob + 1e-12);
    double mass = 0.0;
    for (Key k : rep.large_keys) mass += inst.key_prob(k);
    CHECK(mass == doctest::Approx(rep.mass_large));
  }
}
