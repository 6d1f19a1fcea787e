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
#include <filesystem>
#include <fstream>
#include <random>

#include "qcl/reduction.hpp"

using namespace qcl;
using namespace qcl::reduction;
using qla::ComplexMatrix;
using qla::ComplexVector;

namespace {

owsg::IVOWSG toy(owsg::ToyKind kind, int lambda, double eta = 0.0) {
  owsg::ToyInstance spec;
  spec.kind = kind;
  spec.lambda = lambda;
  spec.eta = eta;
  return owsg::make_instance(spec);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qcl-test-" + name);
}

/// Integer comparison 64 q floor(2^{3 lambda / 4}) < 2^lambda for q = 8, D = 1/2.
bool positive_by_integers(int lambda) {
  const long double r = 0.75L * lambda;
  const auto floor_2r = static_cast<unsigned __int128>(std::floor(std::exp2(r)));
  return (floor_2r << 6) < (static_cast<unsigned __int128>(1) << lambda);
}

}  // namespace

TEST_CASE("identity attack leaves R3 at zero") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto params = commit::CommitmentParams::make(2, 1.0, 1, 1);
  const auto attack = CheatingAttack::identity(params.family().size(), 2, 4, 4);
  const auto rep = run_adversary(inst, params, attack);
  for (const auto& row : rep.output_dist) CHECK(row[0] == doctest::Approx(1.0));
  CHECK(rep.good_keys.size() == 4);
  CHECK(rep.success_all == doctest::Approx(0.25));
  CHECK(rep.success_in_g == doctest::Approx(0.25));
  CHECK(rep.win_prob == doctest::Approx(0.5625));
  CHECK(rep.two_to_minus_delta == doctest::Approx(0.5625));
  CHECK_FALSE(rep.beats_uniform_guess);
  CHECK(rep.chain_holds());
}

TEST_CASE("extractor attack on orthogonal keys") {
  // The adversary does not know h(k) and guesses y uniformly. With y = h(k)
  // the extractor writes k into R3; otherwise the block fails and R3 stays 0.
  const auto inst = toy(owsg::ToyKind::kOrthogonal, 2);
  for (int m : {1, 2, 3}) {
    const auto params = commit::CommitmentParams::make(2, 1.0, 1, m);
    const auto povm = extractor::build_extractor_povm(inst, params);
    const auto rep = run_adversary(inst, params, CheatingAttack::extractor(povm));
    const double range = std::exp2(m);
    CAPTURE(m);
    CHECK(rep.q == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.output_dist[0][0] == doctest::Approx(1.0).epsilon(1e-10));
    for (std::size_t k = 1; k < 4; ++k) CHECK(rep.output_dist[k][k] == doctest::Approx(1.0 / range).epsilon(1e-10));
    CHECK(rep.success_all == doctest::Approx(0.25 * (1.0 + 3.0 / range)).epsilon(1e-10));
    CHECK(rep.win_prob == doctest::Approx(rep.success_all).epsilon(1e-10));
    CHECK(rep.chain.restricted == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.hash_step_lower == doctest::Approx(1.0 / range).epsilon(1e-10));
    CHECK(rep.beats_uniform_guess);
    CHECK(rep.chain_holds());
  }
}

TEST_CASE("bb84 extractor attack: reference chain at lambda = 2, m = 3") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto params = commit::CommitmentParams::make(2, 1.0, 1, 3);
  const auto povm = extractor::build_extractor_povm(inst, params);
  const auto rep = run_adversary(inst, params, CheatingAttack::extractor(povm));
  CHECK(rep.chain.binding == doctest::Approx(0.6208).epsilon(1e-3));
  CHECK(rep.chain.cauchy == doctest::Approx(0.6334).epsilon(1e-3));
  CHECK(rep.chain.restricted == doctest::Approx(0.7879).epsilon(1e-3));
  CHECK(rep.success_in_g == doctest::Approx(0.3098).epsilon(1e-3));
  CHECK(rep.win_prob == doctest::Approx(0.5996).epsilon(1e-3));
  CHECK(rep.chain.binding == doctest::Approx(rep.overlap * rep.overlap));
  CHECK(rep.q == doctest::Approx(1.0 / rep.chain.binding));
  CHECK(rep.bound_final == doctest::Approx(1.0 / (8.0 * rep.q * 4.0)));
  CHECK(rep.bound_tight == doctest::Approx(2.0 * rep.bound_final));
  CHECK(rep.bound_range == doctest::Approx(1.0 / (2.0 * rep.q * 8.0)));
  CHECK(rep.chain_holds());
  CHECK(rep.win_meets_final);
  CHECK(rep.chain.restricted == doctest::Approx(rep.chain.restricted_good + rep.chain.restricted_bad));
}

TEST_CASE("dense and block forms of the same attack agree") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 1);
  const auto params = commit::CommitmentParams::make(1, 1.0, 1, 1);
  const auto povm = extractor::build_extractor_povm(inst, params);
  const auto blocks = extractor::extractor_unitary(povm);
  ComplexVector tau = ComplexVector::Zero(static_cast<Eigen::Index>(blocks.dim_z));
  tau(0) = 1.0;
  const auto a = run_adversary(inst, params, CheatingAttack::from_blocks(blocks, tau));
  const auto b = run_adversary(inst, params,
                               CheatingAttack::from_dense(blocks.to_dense(), blocks.n_hash, blocks.range,
                                                          blocks.dim_r2, blocks.dim_r3, tau));
  CHECK(a.overlap == doctest::Approx(b.overlap).epsilon(1e-12));
  CHECK(a.win_prob == doctest::Approx(b.win_prob).epsilon(1e-12));
  CHECK(a.chain.restricted == doctest::Approx(b.chain.restricted).epsilon(1e-12));
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t kp = 0; kp < 2; ++kp) CHECK(a.output_dist[k][kp] == doctest::Approx(b.output_dist[k][kp]));
}

TEST_CASE("property: the success chain holds for random dense attacks") {
  std::mt19937_64 rng(8080);
  for (int trial = 0; trial < 40; ++trial) {
    const auto kind = trial % 2 == 0 ? owsg::ToyKind::kBb84Pure : owsg::ToyKind::kBb84Depolarized;
    const auto inst = toy(kind, 1, 0.3);
    const auto params = commit::CommitmentParams::make(1, 1.0, 1, 1);
    const std::size_t n_hash = params.family().size(), range = 2, dim_r2 = inst.dim_a(), dim_r3 = 2;
    const std::size_t dim_z = 1 + static_cast<std::size_t>(trial % 3);
    const ComplexMatrix u = qla::random_unitary(n_hash * range * dim_r2 * dim_r3 * dim_z, rng);
    const auto attack = CheatingAttack::from_dense(u, n_hash, range, dim_r2, dim_r3, qla::random_state(dim_z, rng));
    CHECK(attack.dim_z() == dim_z);
    const auto rep = run_adversary(inst, params, attack);
    CAPTURE(trial);
    CHECK(rep.chain.monotone);
    CHECK(rep.hash_step_holds);
    CHECK(rep.accept_step_holds);
    CHECK(rep.success_in_g <= rep.success_all + 1e-12);
    double total = 0.0;
    for (const auto& row : rep.output_dist)
      for (double p : row) total += p;
    CHECK(total == doctest::Approx(2.0).epsilon(1e-10));
  }
}

TEST_CASE("q override replaces the binding value in the bounds") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto params = commit::CommitmentParams::make(2, 1.0, 1, 3);
  const auto povm = extractor::build_extractor_povm(inst, params);
  const auto rep = run_adversary(inst, params, CheatingAttack::extractor(povm), 4.0);
  CHECK(rep.q == 4.0);
  CHECK(rep.bound_final == doctest::Approx(1.0 / 128.0));
  CHECK_THROWS(run_adversary(inst, params, CheatingAttack::extractor(povm), 0.5));
}

TEST_CASE("non-unitary attacks are reported") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 1);
  const auto params = commit::CommitmentParams::make(1, 1.0, 1, 1);
  const std::size_t n = params.family().size() * 2 * 2 * 2;
  const auto attack = CheatingAttack::from_dense(0.5 * ComplexMatrix::Identity(static_cast<Eigen::Index>(n),
                                                                                static_cast<Eigen::Index>(n)),
                                                 params.family().size(), 2, 2, 2, ComplexVector::Ones(1));
  CHECK(attack.unitarity_defect() == doctest::Approx(0.75));
  CHECK_THROWS(CheatingAttack::from_dense(ComplexMatrix::Identity(5, 5), params.family().size(), 2, 2, 2,
                                          ComplexVector::Ones(1)));
}

TEST_CASE("dense unitary files round-trip and reject malformed input") {
  std::mt19937_64 rng(4);
  const ComplexMatrix u = qla::random_unitary(6, rng);
  const auto path = temp_file("unitary.bin");
  write_dense_unitary(path, u);
  CHECK(std::filesystem::file_size(path) == 8 + 36 * 16);
  CHECK(read_dense_unitary(path) == u);

  {
    std::ofstream out(temp_file("trunc.bin"), std::ios::binary);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out << bytes.substr(0, bytes.size() - 5);
    std::ofstream extra(temp_file("extra.bin"), std::ios::binary);
    extra << bytes << "xx";
    std::ofstream head(temp_file("head.bin"), std::ios::binary);
    head << bytes.substr(0, 3);
  }
  CHECK_THROWS(read_dense_unitary(temp_file("trunc.bin")));
  CHECK_THROWS(read_dense_unitary(temp_file("extra.bin")));
  CHECK_THROWS(read_dense_unitary(temp_file("head.bin")));
  CHECK_THROWS(read_dense_unitary(temp_file("missing.bin")));
  for (const char* name : {"unitary.bin", "trunc.bin", "extra.bin", "head.bin"}) std::filesystem::remove(temp_file(name));
}

TEST_CASE("contradiction check examples") {
  const auto v = contradiction_check(60.0, 4.0, 60.0 * 0.75);
  CHECK(v.floor_2r == std::exp2(45.0));
  CHECK(v.log2_margin == doctest::Approx(10.0));
  CHECK(v.positive);
  CHECK_FALSE(contradiction_check(0.0, 1.0, 0.0).positive);
  CHECK(contradiction_check(0.0, 1.0, 0.0).log2_margin == doctest::Approx(-3.0));
  CHECK_THROWS(contradiction_check(1.0, 0.5, 1.0));
  CHECK_THROWS(contradiction_check(-1.0, 1.0, 1.0));
  // Huge r stays finite in the log domain.
  const auto big = contradiction_check(3000.0, 4.0, 2000.0);
  CHECK(big.positive);
  CHECK(big.log2_margin == doctest::Approx(995.0));
}

TEST_CASE("contradiction scan crossover for D = 1/2, q = 8") {
  const auto scan = contradiction_scan(0.5, 8.0, 1, 100);
  REQUIRE(scan.crossover.has_value());
  CHECK(*scan.crossover == 25);
  for (const auto& pt : scan.points) {
    CAPTURE(pt.lambda);
    CHECK(pt.concrete.positive == positive_by_integers(pt.lambda));
    CHECK(pt.symbolic_log2_margin == doctest::Approx(0.25 * pt.lambda - 6.0));
    // floor(2^r) <= 2^r, so the concrete margin is never below the symbolic one.
    CHECK(pt.concrete.log2_margin >= pt.symbolic_log2_margin - 1e-12);
  }
  const auto d1 = contradiction_scan(1.0, 4.0, 1, 64);
  CHECK(d1.points[39].concrete.positive);
  CHECK(*d1.crossover == 11);
  CHECK_THROWS(contradiction_scan(0.0, 4.0, 1, 10));
  CHECK_THROWS(contradiction_scan(1.0, 4.0, 5, 4));
}
