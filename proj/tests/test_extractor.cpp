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

#include "qcl/errors.hpp"
#include "qcl/extractor.hpp"
#include "qcl/tolerances.hpp"

using namespace qcl;
using namespace qcl::extractor;
using qla::ComplexMatrix;

namespace {

owsg::IVOWSG toy(owsg::ToyKind kind, int lambda, double eta = 0.0) {
  owsg::ToyInstance spec;
  spec.kind = kind;
  spec.lambda = lambda;
  spec.eta = eta;
  return owsg::make_instance(spec);
}

}  // namespace

TEST_CASE("Hoeffding sample count") {
  CHECK(hoeffding_samples(2, 0.125, 0.25) == 111);
  // ceil(ln(2 * 2 / 0.5) / (2 * 0.01)) = ceil(103.97)
  CHECK(hoeffding_samples(1, 0.1, 0.5) == 104);
  CHECK(ShadowConfig::for_lambda(2).samples(2) == 111);
  ShadowConfig cfg;
  cfg.t_samples = 7;
  CHECK(cfg.samples(5) == 7);
}

TEST_CASE("shadow configuration validation and backend names") {
  ShadowConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.epsilon = 0.8;
  CHECK_THROWS(cfg.validate());
  cfg = ShadowConfig{};
  cfg.omega = 1.0;
  CHECK_THROWS(cfg.validate());
  CHECK(parse_backend(to_string(Backend::kSampled)) == Backend::kSampled);
  CHECK_THROWS(parse_backend("quantum"));
  CHECK(ShadowConfig::for_lambda(3).omega == doctest::Approx(0.125));
}

TEST_CASE("exact shadow, list and extraction on bb84") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto cfg = ShadowConfig::for_lambda(2);
  const auto est = shadow_estimate(inst, 0, cfg);
  REQUIRE(est.size() == 4);
  CHECK(est[0] == doctest::Approx(1.0));
  CHECK(est[3] == doctest::Approx(0.25));
  const auto list = build_list(est, cfg);
  CHECK(list == ExtractionList{0});

  const hashfam::HashFamily fam(2, 1);
  const auto hashes = hashfam::enumerate(fam);
  for (const auto& h : hashes) {
    CHECK(extract(h, h(0), list) == std::optional<Key>(0));
    CHECK_FALSE(extract(h, h(0) ^ 1u, list).has_value());
  }
  // Two listed keys with equal hash values are ambiguous.
  const auto& h_const = hashes[1];  // a = 0, b = 1
  CHECK_FALSE(extract(h_const, h_const(0), ExtractionList{0, 1}).has_value());

  const auto rep = success_prob_exact(inst, fam, cfg);
  CHECK(rep.success == doctest::Approx(1.0));
  CHECK(rep.sandwich_all);
  for (const auto& k : rep.per_key) {
    CHECK(k.good_size == 3);
    CHECK(k.list_size == 1);
    CHECK(k.pairwise_bound == doctest::Approx(0.0));
  }
}

TEST_CASE("constant instance success equals the no-collision rate") {
  const auto inst = toy(owsg::ToyKind::kConstant, 2);
  for (int m : {1, 2, 3, 4}) {
    const hashfam::HashFamily fam(2, m);
    const auto table = hashfam::value_table(fam);
    double expected = 0.0;
    for (std::uint32_t k = 0; k < 4; ++k) {
      int alone = 0;
      for (const auto& row : table) {
        bool unique = true;
        for (std::uint32_t kp = 0; kp < 4; ++kp) unique = unique && (kp == k || row[kp] != row[k]);
        alone += unique ? 1 : 0;
      }
      expected += 0.25 * alone / static_cast<double>(table.size());
    }
    const auto rep = success_prob_exact(inst, fam, ShadowConfig::for_lambda(2));
    CAPTURE(m);
    CHECK(rep.success == doctest::Approx(expected).epsilon(1e-12));
    // Pairwise independence: Pr[k' collides with k] = 1/|Y| for each of the 3 other keys.
    CHECK(rep.success >= 1.0 - 3.0 / std::exp2(m) - 1e-12);
  }
  CHECK(success_prob_exact(inst, hashfam::HashFamily(2, 3), ShadowConfig::for_lambda(2)).success ==
        doctest::Approx(0.875));
}

TEST_CASE("sampled backend is deterministic per seed and within epsilon") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  auto cfg = ShadowConfig::for_lambda(2, Backend::kSampled, 42);
  CHECK(shadow_estimate(inst, 1, cfg, 3) == shadow_estimate(inst, 1, cfg, 3));
  CHECK(shadow_estimate(inst, 1, cfg, 3) != shadow_estimate(inst, 1, cfg, 4));
  int within = 0;
  const int runs = 200;
  for (int run = 0; run < runs; ++run) {
    const auto est = shadow_estimate(inst, 2, cfg, static_cast<std::uint64_t>(run));
    bool ok = true;
    for (Key kp = 0; kp < 4; ++kp) ok = ok && std::abs(est[kp] - inst.accept(kp, 2)) <= cfg.epsilon;
    within += ok ? 1 : 0;
  }
  // Failure probability at most omega = 1/4 per run; expect far fewer.
  CHECK(within >= runs * 3 / 4);
}

TEST_CASE("extractor POVM blocks relabel the PGM") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto params = commit::CommitmentParams::make(2, 1.0, 1, 1);
  const auto povm = build_extractor_povm(inst, params);
  const auto table = hashfam::value_table(params.family());
  CHECK(z_dim(2) == 5);
  for (std::uint32_t h = 0; h < table.size(); ++h) {
    for (std::uint32_t y = 0; y < 2; ++y) {
      std::uint64_t mask = 0;
      for (std::uint32_t k = 0; k < 4; ++k)
        if (table[h][k] == y) mask |= std::uint64_t{1} << k;
      CHECK(povm.pattern(h, y) == mask);
      const auto block = povm.block(h, y);
      REQUIRE(block.size() == 5);
      ComplexMatrix bottom = ComplexMatrix::Identity(4, 4);
      for (std::uint32_t k = 0; k < 4; ++k) {
        const ComplexMatrix expected =
            (mask >> k) & 1u ? povm.pgm().element(povm.pgm().find(k)) : ComplexMatrix::Zero(4, 4).eval();
        CHECK((block.element(k) - expected).cwiseAbs().maxCoeff() < 1e-12);
        bottom -= expected;
      }
      CHECK((block.element(4) - bottom).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  CHECK(povm.dense().dim() == table.size() * 2 * 4);
}

TEST_CASE("CNOT from Z into R3 is a permutation involution") {
  for (int lambda = 1; lambda <= 3; ++lambda) {
    const ComplexMatrix c = cnot_z_to_r3(lambda);
    const auto keys = static_cast<Eigen::Index>(1) << lambda;
    const auto dz = static_cast<Eigen::Index>(z_dim(lambda));
    REQUIRE(c.rows() == keys * dz);
    CHECK(((c * c) - ComplexMatrix::Identity(c.rows(), c.cols())).cwiseAbs().maxCoeff() < 1e-15);
    for (Eigen::Index col = 0; col < c.cols(); ++col) {
      const Eigen::Index r3 = col / dz, z = col % dz;
      const Eigen::Index target = z == keys ? col : (r3 ^ z) * dz + z;
      CHECK(c(target, col) == qla::Complex(1.0));
      CHECK(c.col(col).cwiseAbs().sum() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("overlap agrees across summary, block and dense paths") {
  struct Case {
    owsg::ToyKind kind;
    int lambda, t, m;
  };
  for (const auto& c : {Case{owsg::ToyKind::kBb84Pure, 2, 1, 1}, Case{owsg::ToyKind::kBb84Pure, 1, 2, 1},
                        Case{owsg::ToyKind::kBb84Depolarized, 1, 1, 1}, Case{owsg::ToyKind::kConstant, 2, 1, 2},
                        Case{owsg::ToyKind::kOrthogonal, 2, 1, 1}}) {
    const auto inst = toy(c.kind, c.lambda, 0.25);
    const auto params = commit::CommitmentParams::make(c.lambda, 1.0, c.t, c.m);
    const auto pair = commit::build_pair(inst, params);
    const auto povm = build_extractor_povm(inst, params);
    const double summary = summary_overlap(inst, povm, c.t).total();
    const auto block = uhlmann_unitary_overlap(inst, pair, povm);
    const auto dense = uhlmann_unitary_overlap_dense(pair, povm);
    CHECK_FALSE(block.fallback);
    CHECK(block.overlap == doctest::Approx(summary).epsilon(1e-10));
    CHECK(dense.overlap == doctest::Approx(summary).epsilon(1e-10));
    CHECK(std::abs(block.imag) < 1e-10);
    CHECK(block.max_unitarity_defect < 1e-10);
    // Uhlmann: the fidelity dominates any overlap reachable on the purifying side.
    const auto metrics = commit::hiding_metrics(pair);
    CHECK(metrics.fid >= block.overlap * block.overlap - 1e-9);
  }
}

TEST_CASE("bb84 reference overlap at lambda = 2, t = 1, m = 1") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto params = commit::CommitmentParams::make(2, 1.0, 1, 1);
  const auto ov = summary_overlap(inst, build_extractor_povm(inst, params), 1);
  CHECK(ov.summary_sum == doctest::Approx(0.728553).epsilon(1e-6));
  CHECK(ov.coincidence == doctest::Approx(0.0339308).epsilon(1e-6));
}

TEST_CASE("orthogonal keys reach overlap one") {
  const auto inst = toy(owsg::ToyKind::kOrthogonal, 2);
  for (int m : {1, 2, 3}) {
    const auto params = commit::CommitmentParams::make(2, 1.0, 1, m);
    const auto ov = summary_overlap(inst, build_extractor_povm(inst, params), 1);
    CHECK(ov.total() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("overlap as a function of the copy count") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 1);
  double previous = 0.0;
  for (int t = 1; t <= 6; ++t) {
    const auto params = commit::CommitmentParams::make(1, 1.0, t, 1);
    const double ov = summary_overlap(inst, build_extractor_povm(inst, params), t).total();
    MESSAGE("bb84 lambda=1 m=1 t=" << t << " overlap=" << ov);
    CHECK(ov >= 0.0);
    CHECK(ov <= 1.0 + 1e-12);
    previous = ov;
  }
  CHECK(previous > 0.5);
}

TEST_CASE("block path falls back to the POVM sum under a small cap") {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto params = commit::CommitmentParams::make(2, 1.0, 1, 1);
  const auto pair = commit::build_pair(inst, params);
  const auto povm = build_extractor_povm(inst, params);
  const double summary = summary_overlap(inst, povm, 1).total();
  Tolerances tight = tolerances();
  tight.max_dense_entries = 300;
  ScopedTolerances scope(tight);
  const auto ov = uhlmann_unitary_overlap(inst, pair, povm);
  CHECK(ov.fallback);
  CHECK(ov.overlap == doctest::Approx(summary).epsilon(1e-12));
  CHECK_THROWS_AS(uhlmann_unitary_overlap_dense(pair, povm), DimensionCapError);
}
