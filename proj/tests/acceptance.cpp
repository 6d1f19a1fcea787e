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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances are pinned below and not configurable.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "qcl/commands.hpp"
#include "qcl/extractor.hpp"
#include "qcl/hashfam.hpp"
#include "qcl/owsg.hpp"
#include "qcl/qla.hpp"
#include "qcl/reduction.hpp"
#include "qcl/svsi.hpp"

namespace {

using namespace qcl;
namespace fs = std::filesystem;

constexpr double kExact = 1e-12;
constexpr double kAlgebra = 1e-9;
constexpr double kUnitary = 1e-10;
constexpr double kShadowSlack = 0.02;
constexpr int kShadowRuns = 1000;
constexpr int kFvdgPairs = 200;
constexpr int kSvsiAdversaries = 100;

owsg::IVOWSG toy(owsg::ToyKind kind, int lambda, double eta = 0.0) {
  owsg::ToyInstance spec;
  spec.kind = kind;
  spec.lambda = lambda;
  spec.eta = eta;
  return owsg::make_instance(spec);
}

/// Collects failure notes for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::ostringstream detail;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void criterion1(Check& c) {
  double worst_gap = 0.0;
  for (int lambda : {2, 3, 4}) {
    const auto inst = toy(owsg::ToyKind::kBb84Pure, lambda);
    const double win = owsg::uniform_guess_winprob(inst);
    c.expect(std::abs(win - std::pow(0.75, lambda)) <= kExact, "winprob != (3/4)^" + std::to_string(lambda));
    for (double p : {2.0, 8.0}) {
      for (double r : {0.0, 1.0, 2.0}) {
        const auto rep = owsg::lemma1_report(inst, p, r);
        const double lhs = rep.mass_large * std::exp2(r) * std::exp2(-lambda) * (1.0 - 1.0 / p);
        worst_gap = std::max(worst_gap, lhs - win);
        c.expect(lhs <= win + kExact, "chain fails at lambda=" + std::to_string(lambda) + " p=" + fmt(p) +
                                          " r=" + fmt(r));
      }
    }
  }
  c.detail << "max(lhs - winprob) = " << fmt(worst_gap);
}

void criterion2(Check& c) {
  std::vector<std::pair<std::string, owsg::IVOWSG>> instances;
  for (int lambda = 1; lambda <= 4; ++lambda) {
    instances.emplace_back("bb84-pure", toy(owsg::ToyKind::kBb84Pure, lambda));
    instances.emplace_back("bb84-depolarized", toy(owsg::ToyKind::kBb84Depolarized, lambda, 0.1));
    instances.emplace_back("constant", toy(owsg::ToyKind::kConstant, lambda));
    instances.emplace_back("orthogonal", toy(owsg::ToyKind::kOrthogonal, lambda));
  }
  instances.emplace_back("svsi-near-orthogonal", svsi::to_ivowsg(svsi::near_orthogonal_instance(0.1, 0.01)));
  double worst = 0.0;
  for (const auto& [name, inst] : instances) {
    // Tr(E_k' phi_k) straight from the operators, not the cached table.
    double direct = 0.0;
    for (owsg::Key k = 0; k < inst.key_count(); ++k)
      for (owsg::Key kp = 0; kp < inst.key_count(); ++kp)
        direct += inst.key_prob(k) * std::exp2(-inst.lambda()) *
                  (inst.acceptance(kp) * inst.state(k).matrix()).trace().real();
    const double delta = owsg::empirical_delta(inst);
    const double gap = std::abs(direct - std::exp2(-delta));
    worst = std::max(worst, gap);
    c.expect(gap <= kExact, name + " lambda=" + std::to_string(inst.lambda()));
  }
  c.detail << instances.size() << " instances, max gap " << fmt(worst);
}

void criterion3(Check& c) {
  for (auto [lambda, m] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {3, 1}, {3, 2}, {4, 2}}) {
    const double dev = hashfam::pairwise_check(hashfam::HashFamily(lambda, m));
    c.expect(dev == 0.0, "deviation " + fmt(dev) + " at (" + std::to_string(lambda) + "," + std::to_string(m) + ")");
  }
  c.detail << "5 families, all deviations exactly 0";
}

void criterion4(Check& c) {
  const auto bb84 = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto rep = extractor::success_prob_exact(bb84, hashfam::HashFamily(2, 3), extractor::ShadowConfig::for_lambda(2));
  c.expect(rep.sandwich_all, "sandwich fails on bb84-pure lambda=2");
  c.expect(std::abs(rep.success - 1.0) <= kExact, "bb84 success " + fmt(rep.success));
  c.detail << "bb84 success " << fmt(rep.success);
  for (int lambda = 1; lambda <= 4; ++lambda) {
    const int m = lambda + 2;
    const auto inst = toy(owsg::ToyKind::kConstant, lambda);
    const double s = extractor::success_prob_exact(inst, hashfam::HashFamily(lambda, m),
                                                   extractor::ShadowConfig::for_lambda(lambda))
                         .success;
    const double bound = 1.0 - (std::exp2(lambda) - 1.0) / std::exp2(m);
    c.expect(s >= bound - kExact, "constant lambda=" + std::to_string(lambda) + " success " + fmt(s) + " < " + fmt(bound));
    c.detail << "; constant l=" << lambda << " " << fmt(s) << " >= " << fmt(bound);
  }
}

void criterion5(Check& c) {
  const int lambda = 2;
  const auto inst = toy(owsg::ToyKind::kBb84Pure, lambda);
  auto cfg = extractor::ShadowConfig::for_lambda(lambda, extractor::Backend::kSampled, 20240101);
  cfg.t_samples = extractor::hoeffding_samples(lambda, cfg.epsilon, cfg.omega);
  int failures = 0;
  for (int run = 0; run < kShadowRuns; ++run) {
    bool bad = false;
    for (owsg::Key k = 0; k < inst.key_count() && !bad; ++k) {
      const auto est = extractor::shadow_estimate(inst, k, cfg, static_cast<std::uint64_t>(run));
      for (owsg::Key kp = 0; kp < inst.key_count(); ++kp)
        bad = bad || std::abs(est[kp] - inst.accept(kp, k)) > cfg.epsilon;
    }
    failures += bad ? 1 : 0;
  }
  const double rate = static_cast<double>(failures) / kShadowRuns;
  c.expect(rate <= cfg.omega + kShadowSlack, "failure rate " + fmt(rate));
  c.detail << "t_samples " << cfg.t_samples << ", failure rate " << fmt(rate) << " <= " << fmt(cfg.omega + kShadowSlack);
}

void criterion6(Check& c) {
  for (auto kind : {owsg::ToyKind::kBb84Pure, owsg::ToyKind::kOrthogonal}) {
    const auto inst = toy(kind, 2);
    const auto params = commit::CommitmentParams::make(2, 1.0, 1, 1);
    const auto pair = commit::build_pair(inst, params);
    const auto povm = extractor::build_extractor_povm(inst, params);
    const double summary = extractor::summary_overlap(inst, povm, 1).total();
    const auto block = extractor::uhlmann_unitary_overlap(inst, pair, povm);
    const auto dense = extractor::uhlmann_unitary_overlap_dense(pair, povm);
    const std::string name(owsg::to_string(kind));
    c.expect(!block.fallback, name + ": block path fell back");
    c.expect(std::abs(block.overlap - summary) <= kAlgebra, name + ": block vs POVM sum");
    c.expect(std::abs(dense.overlap - summary) <= kAlgebra, name + ": dense vs POVM sum");
    c.expect(block.max_unitarity_defect <= kUnitary, name + ": block V not unitary");
    c.expect(dense.max_unitarity_defect <= kUnitary, name + ": dense V not unitary");
    c.detail << name << " overlap " << fmt(summary) << " (gap " << fmt(std::abs(block.overlap - summary))
             << ", defect " << fmt(std::max(block.max_unitarity_defect, dense.max_unitarity_defect)) << "); ";
  }
}

void criterion7(Check& c) {
  struct Run {
    owsg::ToyKind kind;
    int lambda, t, m;
  };
  // fid >= overlap^2 wherever the unitary overlap is computable.
  int runs = 0;
  for (const auto& r : {Run{owsg::ToyKind::kBb84Pure, 2, 1, 1}, Run{owsg::ToyKind::kBb84Pure, 2, 1, 3},
                        Run{owsg::ToyKind::kBb84Pure, 1, 1, 1}, Run{owsg::ToyKind::kBb84Pure, 1, 3, 2},
                        Run{owsg::ToyKind::kBb84Depolarized, 1, 2, 1}, Run{owsg::ToyKind::kConstant, 2, 1, 3},
                        Run{owsg::ToyKind::kConstant, 1, 1, 1}, Run{owsg::ToyKind::kOrthogonal, 2, 1, 2}}) {
    const auto inst = toy(r.kind, r.lambda, 0.2);
    const auto params = commit::CommitmentParams::make(r.lambda, 1.0, r.t, r.m);
    const auto pair = commit::build_pair(inst, params);
    const auto povm = extractor::build_extractor_povm(inst, params);
    const double ov = extractor::uhlmann_unitary_overlap(inst, pair, povm).overlap;
    const double fid = commit::hiding_metrics(pair).fid;
    c.expect(fid >= ov * ov - kAlgebra, std::string(owsg::to_string(r.kind)) + " fid " + fmt(fid) + " < overlap^2");
    ++runs;
  }
  c.detail << runs << " runs with fid >= overlap^2";

  // s-clause on runs where the extractor is realised on the committed copies.
  struct Realised {
    std::string name;
    owsg::ToyKind kind;
    int lambda, t, m;
  };
  const int budget = static_cast<int>(4 * extractor::hoeffding_samples(2, 0.125, 0.25));
  for (const auto& r : {Realised{"bb84-pure t=" + std::to_string(budget), owsg::ToyKind::kBb84Pure, 2, budget, 3},
                        Realised{"orthogonal", owsg::ToyKind::kOrthogonal, 2, 1, 3},
                        Realised{"constant m=3", owsg::ToyKind::kConstant, 2, 1, 3},
                        Realised{"constant l=1 m=1", owsg::ToyKind::kConstant, 1, 1, 1}}) {
    const auto inst = toy(r.kind, r.lambda);
    const auto params = commit::CommitmentParams::make(r.lambda, 1.0, r.t, r.m);
    const double s =
        extractor::success_prob_exact(inst, params.family(), extractor::ShadowConfig::for_lambda(r.lambda)).success;
    const auto metrics = commit::hiding_metrics_factored(inst, params);
    if (s < 0.5) {
      c.failures.push_back(r.name + ": s = " + fmt(s) + " below 1/2");
      continue;
    }
    const auto verdict = commit::hiding_threshold_check(metrics, s, kAlgebra);
    c.expect(verdict.td_ok, r.name + ": td " + fmt(metrics.td) + " > " + fmt(verdict.td_upper));
    c.detail << "; " << r.name << " s=" << fmt(s) << " td=" << fmt(metrics.td) << " <= " << fmt(verdict.td_upper);
    if (std::abs(s - 0.5) <= kExact)
      c.expect(std::abs(verdict.td_upper - std::sqrt(0.75)) <= kExact, r.name + ": s = 1/2 bound is not sqrt(3/4)");
  }

  // Reference only: the oracle-access success does not bound td at t = 1.
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto ref = commit::hiding_metrics_factored(inst, commit::CommitmentParams::make(2, 1.0, 1, 3));
  c.detail << "; reference bb84-pure t=1 td=" << fmt(ref.td) << " (s=1, clause not applicable)";
}

void criterion8(Check& c) {
  std::mt19937_64 rng(88);
  double worst = -1.0;
  for (int i = 0; i < kFvdgPairs; ++i) {
    const std::size_t dim = 2 + static_cast<std::size_t>(i % 7);
    const auto rho = qla::random_density_matrix(dim, rng);
    const auto sigma = qla::random_density_matrix(dim, rng);
    const double f = qla::fidelity(rho, sigma), td = qla::trace_distance(rho, sigma);
    const double violation = std::max((1.0 - std::sqrt(f)) - td, td - std::sqrt(1.0 - f));
    worst = std::max(worst, violation);
    c.expect(violation <= kAlgebra, "pair " + std::to_string(i) + " dim " + std::to_string(dim));
  }
  c.detail << kFvdgPairs << " pairs, worst margin " << fmt(worst);
}

void criterion9(Check& c) {
  const auto inst = toy(owsg::ToyKind::kBb84Pure, 2);
  const auto params = commit::CommitmentParams::make(2, 1.0, 1);
  const auto povm = extractor::build_extractor_povm(inst, params);
  const auto rep = reduction::run_adversary(inst, params, reduction::CheatingAttack::extractor(povm));
  c.expect(std::abs(rep.q - 1.0 / (rep.overlap * rep.overlap)) <= kAlgebra, "q is not 1/overlap^2");
  c.expect(rep.win_prob >= rep.bound_final, "win " + fmt(rep.win_prob) + " < " + fmt(rep.bound_final));
  c.detail << "q " << fmt(rep.q) << ", win " << fmt(rep.win_prob) << " >= 1/(8q floor(2^r)) = " << fmt(rep.bound_final);
  const auto scan = reduction::contradiction_scan(1.0, 4.0, 16, 1000);
  for (const auto& pt : scan.points)
    c.expect(pt.symbolic_positive && pt.concrete.positive, "non-positive sign at lambda=" + std::to_string(pt.lambda));
  c.detail << "; sign positive for lambda 16..1000 (margin at 16: " << fmt(scan.points.front().concrete.log2_margin)
           << " bits)";
}

void criterion10(Check& c) {
  for (int lambda = 1; lambda <= 4; ++lambda) {
    const auto iv = svsi::to_ivowsg(svsi::orthogonal_instance(lambda));
    c.expect(std::abs(owsg::correctness_prob(iv) - 1.0) <= kExact, "correctness at lambda=" + std::to_string(lambda));
    c.expect(std::abs(owsg::uniform_guess_winprob(iv) - std::exp2(-lambda)) <= kExact,
             "uniform guess at lambda=" + std::to_string(lambda));
  }
  std::mt19937_64 rng(1010);
  std::exponential_distribution<double> expo(1.0);
  int held = 0;
  for (const auto& inst : {svsi::orthogonal_instance(2), svsi::near_orthogonal_instance(0.1, 0.01)}) {
    for (int i = 0; i < kSvsiAdversaries; ++i) {
      std::vector<std::vector<double>> guesses(inst.key_count(), std::vector<double>(inst.key_count()));
      for (auto& row : guesses) {
        double sum = 0.0;
        for (auto& v : row) sum += (v = expo(rng));
        for (auto& v : row) v /= sum;
      }
      const auto acc = svsi::security_accounting(inst, guesses);
      held += acc.holds ? 1 : 0;
      c.expect(acc.holds, "adversary " + std::to_string(i) + " breaks the two-term bound");
    }
  }
  c.detail << "correctness 1 and win 2^-lambda for lambda 1..4; bound held for " << held << "/"
           << 2 * kSvsiAdversaries << " adversaries";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion11(Check& c) {
  const std::string text =
      "[instance]\nkind = bb84-pure\nlambda = 2\n[params]\nD = 1\nt = 1\n"
      "[shadow]\nbackend = sampled\nseed = 11\n[svsi]\ninstance = near-orthogonal\n";
  const auto base = fs::temp_directory_path() / "qcl-acceptance-determinism";
  fs::remove_all(base);
  std::size_t files = 0;
  for (const char* cmd : {"lemma1", "hiding", "binding", "extract", "hashcheck", "svsi"}) {
    const auto cfg = cli::parse_config(text);
    const auto a = cli::write_report(cli::run_command(cmd, cfg), base / "a");
    const auto b = cli::write_report(cli::run_command(cmd, cfg), base / "b");
    c.expect(a.filename() == b.filename(), std::string(cmd) + ": report names differ");
    c.expect(slurp(a) == slurp(b), std::string(cmd) + ": JSON differs between runs");
    ++files;
  }
  for (const auto& entry : fs::directory_iterator(base / "a"))
    if (entry.path().extension() == ".csv")
      c.expect(slurp(entry.path()) == slurp(base / "b" / entry.path().filename()),
               entry.path().filename().string() + " differs");
  fs::remove_all(base);
  c.detail << files << " commands, JSON byte-identical across two runs";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"1 good-set chain on bb84-pure", criterion1},
      {"2 trivial attack equals 2^-delta", criterion2},
      {"3 hash pairwise independence", criterion3},
      {"4 extractor sandwich and success", criterion4},
      {"5 sampled shadow accuracy", criterion5},
      {"6 Naimark/CNOT overlap agreement", criterion6},
      {"7 Uhlmann direction", criterion7},
      {"8 Fuchs-van de Graaf", criterion8},
      {"9 binding reduction accounting", criterion9},
      {"10 SV-SI bridge", criterion10},
      {"11 determinism", criterion11},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += ok ? 0 : 1;
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << c.detail.str() << '\n';
    for (const auto& f : c.failures) std::cout << "     - " << f << '\n';
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
