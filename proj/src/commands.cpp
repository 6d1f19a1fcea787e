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

#include "qcl/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qcl/errors.hpp"
#include "qcl/extractor.hpp"
#include "qcl/hashfam.hpp"
#include "qcl/parallel.hpp"
#include "qcl/reduction.hpp"
#include "qcl/rng.hpp"
#include "qcl/svsi.hpp"

namespace qcl::cli {

using nlohmann::json;

namespace {

constexpr double kSlack = 1e-9;

const std::map<std::string, std::string> kVersions = {
    {"qla-core", "1.0.0"},   {"hashfam", "1.0.0"},   {"owsg-lab", "1.0.0"}, {"svsi-bridge", "1.0.0"},
    {"commit-core", "1.0.0"}, {"extractor", "1.0.0"}, {"reduction", "1.0.0"}, {"expt-cli", "1.0.0"},
};

/// Non-finite values are not representable in JSON; they become strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string cell(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string short_num(double v) {
  if (!std::isfinite(v)) return cell(v);
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

json tolerances_json(const Tolerances& t) {
  return json{{"hermitian", t.hermitian}, {"trace", t.trace},   {"psd", t.psd},
              {"povm", t.povm},           {"unitary", t.unitary}, {"norm", t.norm},
              {"probability", t.probability}, {"pgm_support", t.pgm_support},
              {"max_dense_entries", t.max_dense_entries}};
}

json config_json(const ExperimentConfig& cfg) {
  json out = json::object();
  std::istringstream in(cfg.canonical());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

Report start(std::string command, const ExperimentConfig& cfg) {
  Report r;
  r.command = std::move(command);
  r.json["command"] = r.command;
  r.json["config_hash"] = hex64(cfg.hash());
  r.json["config"] = config_json(cfg);
  r.json["versions"] = kVersions;
  r.json["tolerances"] = tolerances_json(cfg.tolerances);
  return r;
}

void finish(Report& r, json results) {
  r.json["results"] = std::move(results);
  r.json["violations"] = r.violations;
  r.json["status"] = r.violations.empty() ? "ok" : "violation";
}

void check(Report& r, bool ok, const std::string& what) {
  if (!ok) r.violations.push_back(what);
}

json instance_json(const owsg::ToyInstance& spec) {
  json j{{"kind", std::string(owsg::to_string(spec.kind))}, {"lambda", spec.lambda}, {"eta", spec.eta}};
  return j;
}

json params_json(const commit::CommitmentParams& p) {
  const auto fam = p.family();
  return json{{"D", p.D},          {"p", p.p},
              {"r", p.r()},        {"t", p.t},
              {"m", p.m},          {"range_size", fam.range_size()},
              {"family_size", fam.size()}, {"field_bits", fam.field_bits()}};
}

std::size_t support_size(const owsg::IVOWSG& inst) {
  std::size_t n = 0;
  for (owsg::Key k = 0; k < inst.key_count(); ++k) n += inst.key_prob(k) > 0.0 ? 1 : 0;
  return n;
}

}  // namespace

Report cmd_lemma1(const ExperimentConfig& cfg) {
  Report rep = start("lemma1", cfg);
  const auto inst = owsg::make_instance(cfg.instance);
  const double r = cfg.r_value();
  const auto g = owsg::lemma1_report(inst, cfg.p, r);

  std::ostringstream csv;
  csv << "key,prior,good_size,large\n";
  for (owsg::Key k = 0; k < inst.key_count(); ++k) {
    const bool large = std::find(g.large_keys.begin(), g.large_keys.end(), k) != g.large_keys.end();
    csv << owsg::key_string(k, inst.lambda()) << ',' << cell(inst.key_prob(k)) << ',' << g.good_sets[k].size() << ','
        << (large ? 1 : 0) << '\n';
  }
  rep.tables["good_sets"] = csv.str();

  check(rep, g.chain_holds, "mass(T) 2^r 2^-lambda (1-1/p) <= uniform-guess win probability");
  check(rep, g.mass_bound_holds, "mass(T) <= 2^-delta 2^lambda / (2^r (1-1/p))");
  check(rep, g.sandwich_holds, "Pr[1 <= |G_k| <= 2^r] >= Pr[k in G_k, |G_k| <= 2^r]");

  json good = json::array();
  for (const auto& s : g.good_sets) good.push_back(s.size());
  finish(rep, json{{"instance", instance_json(cfg.instance)},
                   {"p", g.p},
                   {"r", g.r},
                   {"threshold", g.threshold},
                   {"good_set_sizes", good},
                   {"large_keys", g.large_keys},
                   {"mass_large", g.mass_large},
                   {"winprob", g.winprob},
                   {"delta_emp", num(g.delta_emp)},
                   {"chain_lhs", g.chain_lhs},
                   {"chain_middle", g.chain_middle},
                   {"chain_holds", g.chain_holds},
                   {"mass_bound", num(g.mass_bound)},
                   {"mass_bound_holds", g.mass_bound_holds},
                   {"vacuous", g.vacuous},
                   {"prob_nonempty_small", g.prob_nonempty_small},
                   {"prob_self_small", g.prob_self_small},
                   {"sandwich_holds", g.sandwich_holds}});
  rep.summary = {{"mass(T)", short_num(g.mass_large)},
                 {"uniform-guess win", short_num(g.winprob)},
                 {"delta_emp", short_num(g.delta_emp)},
                 {"mass bound", short_num(g.mass_bound) + (g.vacuous ? " (vacuous)" : "")},
                 {"chain", g.chain_holds ? "holds" : "FAILS"}};
  return rep;
}

Report cmd_hiding(const ExperimentConfig& cfg) {
  Report rep = start("hiding", cfg);
  const auto inst = owsg::make_instance(cfg.instance);
  const auto params = cfg.params();
  const auto shadow = cfg.shadow_config();
  const auto family = params.family();

  json res{{"instance", instance_json(cfg.instance)}, {"params", params_json(params)}};
  res["block_count"] = support_size(inst) * family.size();

  commit::HidingMetrics metrics;
  std::optional<commit::CommitmentPair> pair;
  try {
    pair = commit::build_pair(inst, params);
  } catch (const DimensionCapError&) {
    pair.reset();
  }
  const auto factored = commit::hiding_metrics_factored(inst, params);
  if (pair) {
    metrics = commit::hiding_metrics(*pair);
    res["path"] = "blockwise";
    const double agreement = std::max(std::abs(metrics.td - factored.td), std::abs(metrics.fid - factored.fid));
    res["factored_agreement"] = agreement;
    check(rep, agreement <= kSlack, "blockwise and factored reductions agree");
  } else {
    metrics = factored;
    res["path"] = "factored";
  }
  res["td"] = metrics.td;
  res["fid"] = metrics.fid;
  res["c_dim"] = metrics.c_dim;
  res["fvdg_lower_margin"] = metrics.fvdg_lower_margin;
  res["fvdg_upper_margin"] = metrics.fvdg_upper_margin;
  check(rep, metrics.fvdg_holds, "1 - sqrt(F) <= TD <= sqrt(1 - F)");

  const auto ext = extractor::success_prob_exact(inst, family, shadow);
  const double s = ext.success;
  res["extractor_success"] = s;

  std::optional<double> overlap;
  if (pair) {
    try {
      const auto povm = extractor::build_extractor_povm(inst, params);
      const auto sum = extractor::summary_overlap(inst, povm, params.t);
      const auto u = extractor::uhlmann_unitary_overlap(inst, *pair, povm);
      overlap = u.overlap;
      res["overlap"] = u.overlap;
      res["overlap_fallback"] = u.fallback;
      res["overlap_summary_sum"] = sum.summary_sum;
      res["overlap_coincidence"] = sum.coincidence;
      res["overlap_path_gap"] = std::abs(u.overlap - sum.total());
      res["naimark_unitarity_defect"] = u.max_unitarity_defect;
      check(rep, std::abs(u.overlap - sum.total()) <= kSlack, "Naimark/CNOT overlap equals the POVM sum");
      check(rep, metrics.fid >= u.overlap * u.overlap - kSlack, "F(rho_0, rho_1) >= overlap^2");
    } catch (const DimensionCapError&) {
      res["overlap"] = nullptr;
    }
  } else {
    res["overlap"] = nullptr;
  }

  // The s-clause needs an extractor that runs on the t copies held in R2:
  // t covers the shadow-estimation budget, the list does not depend on the
  // key (no copies needed), or the POVM overlap already reaches s.
  const std::uint64_t budget = (std::uint64_t{1} << inst.lambda()) * shadow.samples(inst.lambda());
  bool key_independent_list = true;
  std::optional<extractor::ExtractionList> first_list;
  for (owsg::Key k = 0; k < inst.key_count(); ++k) {
    if (inst.key_prob(k) <= 0.0) continue;
    auto list = extractor::build_list(extractor::shadow_estimate(inst, k, shadow), shadow);
    if (!first_list) first_list = std::move(list);
    else if (*first_list != list) key_independent_list = false;
  }
  const bool realised = static_cast<std::uint64_t>(params.t) >= budget || key_independent_list ||
                        (overlap && *overlap >= s - kSlack);
  const auto verdict = commit::hiding_threshold_check(metrics, s);
  const bool applicable = s >= 0.5 && realised;
  res["copy_budget"] = budget;
  res["s_clause"] = json{{"applicable", applicable},
                         {"fid_lower", verdict.fid_lower},
                         {"td_upper", verdict.td_upper},
                         {"fid_ok", verdict.fid_ok},
                         {"td_ok", verdict.td_ok}};
  if (applicable) check(rep, verdict.td_ok, "TD <= sqrt(1 - s^2)");
  finish(rep, std::move(res));

  rep.summary = {{"path", pair ? "blockwise" : "factored"},
                 {"td_C", short_num(metrics.td)},
                 {"fid_C", short_num(metrics.fid)},
                 {"extractor success s", short_num(s)},
                 {"overlap", overlap ? short_num(*overlap) : "n/a"},
                 {"sqrt(1 - s^2)", short_num(verdict.td_upper) + (applicable ? "" : " (not applicable)")}};
  return rep;
}

namespace {

reduction::CheatingAttack make_attack(const ExperimentConfig& cfg, const owsg::IVOWSG& inst,
                                      const commit::CommitmentParams& params) {
  const auto family = params.family();
  std::size_t dim_r2 = 1;
  for (int j = 0; j < params.t; ++j) dim_r2 *= inst.dim_a();
  if (cfg.attack == "identity")
    return reduction::CheatingAttack::identity(family.size(), family.range_size(), dim_r2, inst.key_count());
  if (cfg.attack == "file") {
    qla::ComplexMatrix u;
    try {
      u = reduction::read_dense_unitary(cfg.unitary_file);
    } catch (const DimensionCapError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw ConfigError("binding.unitary_file", e.what());
    }
    const std::size_t base = family.size() * family.range_size() * dim_r2 * inst.key_count();
    if (base == 0 || static_cast<std::size_t>(u.rows()) % base != 0)
      throw ConfigError("binding.unitary_file", "dimension " + std::to_string(u.rows()) +
                                                    " is not a multiple of dim(R) = " + std::to_string(base));
    const std::size_t dz = static_cast<std::size_t>(u.rows()) / base;
    qla::ComplexVector tau = qla::ComplexVector::Zero(static_cast<Eigen::Index>(dz));
    tau(0) = 1.0;
    return reduction::CheatingAttack::from_dense(std::move(u), family.size(), family.range_size(), dim_r2,
                                                 inst.key_count(), std::move(tau));
  }
  return reduction::CheatingAttack::extractor(extractor::build_extractor_povm(inst, params));
}

}  // namespace

Report cmd_binding(const ExperimentConfig& cfg) {
  Report rep = start("binding", cfg);
  const auto inst = owsg::make_instance(cfg.instance);
  const auto params = cfg.params();
  const auto attack = make_attack(cfg, inst, params);

  auto adv = reduction::run_adversary(inst, params, attack);
  if (cfg.binding_q == "overlap") {
    const double q = adv.overlap > 0.0 ? 1.0 / (adv.overlap * adv.overlap) : std::numeric_limits<double>::infinity();
    adv = reduction::run_adversary(inst, params, attack, q);
  } else if (cfg.binding_q != "binding") {
    adv = reduction::run_adversary(inst, params, attack, std::stod(cfg.binding_q));
  }
  check(rep, adv.unitarity_defect <= cfg.tolerances.unitary, "attack is unitary");
  check(rep, adv.chain.monotone, "binding <= triangle <= Jensen <= restricted");
  check(rep, adv.hash_step_holds, "success in G >= restricted(G) / |Y|");
  check(rep, adv.accept_step_holds, "win >= success in G * min accept >= success in G / 2");
  check(rep, adv.win_meets_final, "win >= 1 / (8 q floor(2^r))");
  const std::string verdict = rep.violations.empty() ? "bound satisfied" : "bound violated";

  const double delta_emp = owsg::empirical_delta(inst);
  const auto concrete = reduction::contradiction_check(delta_emp, std::isfinite(adv.q) ? adv.q : 1e300, params.r());
  const auto scan = reduction::contradiction_scan(cfg.D, cfg.contradiction_q, cfg.lambda_min, cfg.lambda_max);

  std::ostringstream dist;
  dist << "key";
  for (owsg::Key kp = 0; kp < inst.key_count(); ++kp) dist << ",out_" << owsg::key_string(kp, inst.lambda());
  dist << '\n';
  for (owsg::Key k = 0; k < inst.key_count(); ++k) {
    dist << owsg::key_string(k, inst.lambda());
    for (double p : adv.output_dist[k]) dist << ',' << cell(p);
    dist << '\n';
  }
  rep.tables["output_dist"] = dist.str();
  std::ostringstream sc;
  sc << "lambda,symbolic_log2_margin,symbolic_positive,concrete_log2_margin,concrete_positive\n";
  for (const auto& pt : scan.points)
    sc << pt.lambda << ',' << cell(pt.symbolic_log2_margin) << ',' << (pt.symbolic_positive ? 1 : 0) << ','
       << cell(pt.concrete.log2_margin) << ',' << (pt.concrete.positive ? 1 : 0) << '\n';
  rep.tables["contradiction_scan"] = sc.str();

  json res{{"instance", instance_json(cfg.instance)}, {"params", params_json(params)}};
  res["attack"] = cfg.attack;
  res["dim_z"] = attack.dim_z();
  res["q"] = num(adv.q);
  res["overlap"] = adv.overlap;
  res["good_keys"] = adv.good_keys;
  res["chain"] = json{{"binding", adv.chain.binding},
                      {"triangle", adv.chain.triangle},
                      {"jensen", adv.chain.cauchy},
                      {"restricted", adv.chain.restricted},
                      {"restricted_good", adv.chain.restricted_good},
                      {"restricted_bad", adv.chain.restricted_bad},
                      {"monotone", adv.chain.monotone}};
  res["success_in_g"] = adv.success_in_g;
  res["success_all"] = adv.success_all;
  res["win_prob"] = adv.win_prob;
  res["min_accept_good"] = adv.min_accept_good;
  res["hash_step_lower"] = adv.hash_step_lower;
  res["floor_2r"] = adv.floor_2r;
  res["bound_tight"] = adv.bound_tight;
  res["bound_final"] = adv.bound_final;
  res["bound_range"] = adv.bound_range;
  res["success_meets_tight"] = adv.success_meets_tight;
  res["win_meets_final"] = adv.win_meets_final;
  res["win_meets_range"] = adv.win_meets_range;
  res["uniform_guess_win"] = adv.two_to_minus_delta;
  res["beats_uniform_guess"] = adv.beats_uniform_guess;
  res["unitarity_defect"] = adv.unitarity_defect;
  res["verdict"] = verdict;
  res["contradiction"] = json{{"delta_emp", num(delta_emp)},
                              {"lhs", num(concrete.lhs)},
                              {"rhs", num(concrete.rhs)},
                              {"log2_margin", num(concrete.log2_margin)},
                              {"positive", concrete.positive}};
  json crossover = nullptr;
  if (scan.crossover) crossover = *scan.crossover;
  res["contradiction_scan"] = json{{"D", scan.D}, {"q", scan.q}, {"crossover", crossover}};
  finish(rep, std::move(res));

  rep.summary = {{"attack", cfg.attack},
                 {"q", short_num(adv.q)},
                 {"win probability", short_num(adv.win_prob)},
                 {"1/(8 q floor(2^r))", short_num(adv.bound_final)},
                 {"uniform-guess win (2^-delta_emp)", short_num(adv.two_to_minus_delta)},
                 {"contradiction on this instance", concrete.positive ? "positive" : "non-positive"},
                 {"symbolic crossover lambda", scan.crossover ? std::to_string(*scan.crossover) : "none"},
                 {"verdict", verdict}};
  return rep;
}

Report cmd_extract(const ExperimentConfig& cfg) {
  Report rep = start("extract", cfg);
  const auto inst = owsg::make_instance(cfg.instance);
  const auto params = cfg.params();
  const auto shadow = cfg.shadow_config();
  const auto family = params.family();
  const auto ext = extractor::success_prob_exact(inst, family, shadow);

  std::ostringstream b;
  b << "key,guess,accept,estimate\n";
  for (owsg::Key k = 0; k < inst.key_count(); ++k) {
    const auto est = extractor::shadow_estimate(inst, k, shadow);
    for (owsg::Key kp = 0; kp < inst.key_count(); ++kp)
      b << owsg::key_string(k, inst.lambda()) << ',' << owsg::key_string(kp, inst.lambda()) << ','
        << cell(inst.accept(kp, k)) << ',' << cell(est[kp]) << '\n';
  }
  rep.tables["shadow"] = b.str();
  std::ostringstream pk;
  pk << "key,prior,good_size,list_size,in_list,list_in_good,sandwich,success,pairwise_bound\n";
  json per_key = json::array();
  for (const auto& e : ext.per_key) {
    pk << owsg::key_string(e.key, inst.lambda()) << ',' << cell(e.prior) << ',' << e.good_size << ',' << e.list_size
       << ',' << e.in_list << ',' << e.list_in_good << ',' << e.sandwich << ',' << cell(e.success) << ','
       << cell(e.pairwise_bound) << '\n';
    per_key.push_back(json{{"key", e.key},
                           {"good_size", e.good_size},
                           {"list_size", e.list_size},
                           {"in_list", e.in_list},
                           {"list_in_good", e.list_in_good},
                           {"sandwich", e.sandwich},
                           {"success", e.success},
                           {"pairwise_bound", e.pairwise_bound}});
  }
  rep.tables["extraction"] = pk.str();

  if (shadow.backend == extractor::Backend::kExact)
    check(rep, ext.sandwich_all, "{p >= 7/8} subset of L subset of {p >= 1/2} (exact estimates)");
  check(rep, ext.success >= ext.pairwise_lower - kSlack, "s >= sum Pr[k] 1[k in L subset G_k] (1 - (|G_k|-1)/|Y|)");
  if (ext.small_good_sets && ext.prob_list_sandwich >= 1.0 - kSlack)
    check(rep, ext.success >= 0.5 - kSlack, "s >= 1/2 when every |G_k| <= |Y|/2");

  finish(rep, json{{"instance", instance_json(cfg.instance)},
                   {"params", params_json(params)},
                   {"backend", std::string(extractor::to_string(shadow.backend))},
                   {"epsilon", shadow.epsilon},
                   {"omega", shadow.omega},
                   {"samples", shadow.backend == extractor::Backend::kExact ? 0 : shadow.samples(inst.lambda())},
                   {"per_key", per_key},
                   {"success", ext.success},
                   {"prob_list_sandwich", ext.prob_list_sandwich},
                   {"pairwise_lower", ext.pairwise_lower},
                   {"sandwich_all", ext.sandwich_all},
                   {"small_good_sets", ext.small_good_sets}});
  rep.summary = {{"backend", std::string(extractor::to_string(shadow.backend))},
                 {"success s", short_num(ext.success)},
                 {"pairwise lower bound", short_num(ext.pairwise_lower)},
                 {"sandwich for all keys", ext.sandwich_all ? "yes" : "no"}};
  return rep;
}

Report cmd_hashcheck(const ExperimentConfig& cfg) {
  Report rep = start("hashcheck", cfg);
  const hashfam::HashFamily family(cfg.instance.lambda, cfg.params().m);
  const double deviation = hashfam::pairwise_check(family);
  check(rep, deviation == 0.0, "pairwise independence is exact");

  std::ostringstream csv;
  csv << "h,a,b";
  for (std::uint32_t x = 0; x < family.key_count(); ++x) csv << ",x" << x;
  csv << '\n';
  for (const auto& h : hashfam::enumerate(family)) {
    csv << h.index() << ',' << h.a() << ',' << h.b();
    for (std::uint32_t x = 0; x < family.key_count(); ++x) csv << ',' << h(x);
    csv << '\n';
  }
  rep.tables["values"] = csv.str();
  finish(rep, json{{"lambda", family.lambda()},
                   {"m", family.m()},
                   {"field_bits", family.field_bits()},
                   {"polynomial", hashfam::irreducible_polynomial(family.field_bits())},
                   {"family_size", family.size()},
                   {"deviation", deviation}});
  rep.summary = {{"family", "lambda=" + std::to_string(family.lambda()) + " m=" + std::to_string(family.m()) +
                                " |H|=" + std::to_string(family.size())},
                 {"deviation", short_num(deviation)}};
  return rep;
}

Report cmd_svsi(const ExperimentConfig& cfg) {
  Report rep = start("svsi", cfg);
  const svsi::SVSIOWSG sv = cfg.svsi_instance == "orthogonal"
                                ? svsi::orthogonal_instance(cfg.instance.lambda, cfg.svsi_tol_inv)
                                : svsi::near_orthogonal_instance(cfg.svsi_overlap, cfg.svsi_tol_inv);
  const auto iv = svsi::to_ivowsg(sv);
  const double correctness = owsg::correctness_prob(iv);
  const double uniform = owsg::uniform_guess_winprob(iv);
  const std::size_t keys = sv.key_count();

  std::size_t held = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::ostringstream csv;
  csv << "adversary,total,diagonal,off_diagonal,bound,holds\n";
  for (int i = 0; i < cfg.svsi_adversaries; ++i) {
    auto rng = stream_engine(cfg.shadow.seed, {0x5e51u, static_cast<std::uint64_t>(i)});
    std::vector<std::vector<double>> guesses(keys, std::vector<double>(keys));
    for (auto& row : guesses) {
      double sum = 0.0;
      for (auto& v : row) {
        v = -std::log(1.0 - uniform01(rng));
        sum += v;
      }
      for (auto& v : row) v /= sum;
    }
    const auto acc = svsi::security_accounting(sv, guesses);
    held += acc.holds ? 1 : 0;
    worst_slack = std::min(worst_slack, acc.bound - acc.total);
    csv << i << ',' << cell(acc.total) << ',' << cell(acc.diagonal) << ',' << cell(acc.off_diagonal) << ','
        << cell(acc.bound) << ',' << (acc.holds ? 1 : 0) << '\n';
  }
  rep.tables["accounting"] = csv.str();
  check(rep, held == static_cast<std::size_t>(cfg.svsi_adversaries), "two-term security bound for every adversary");
  check(rep, correctness >= 1.0 - cfg.svsi_tol_inv - kSlack, "converted correctness >= 1 - tol_inv");

  finish(rep, json{{"instance", cfg.svsi_instance},
                   {"lambda", sv.lambda()},
                   {"tol_inv", sv.tol_inv()},
                   {"correctness", correctness},
                   {"uniform_guess_win", uniform},
                   {"adversaries", cfg.svsi_adversaries},
                   {"bound_held", held},
                   {"worst_slack", num(worst_slack)}});
  rep.summary = {{"instance", cfg.svsi_instance},
                 {"correctness", short_num(correctness)},
                 {"uniform-guess win", short_num(uniform)},
                 {"bound held", std::to_string(held) + "/" + std::to_string(cfg.svsi_adversaries)}};
  return rep;
}

Report run_command(std::string_view command, const ExperimentConfig& cfg) {
  if (command == "lemma1") return cmd_lemma1(cfg);
  if (command == "hiding") return cmd_hiding(cfg);
  if (command == "binding") return cmd_binding(cfg);
  if (command == "extract") return cmd_extract(cfg);
  if (command == "hashcheck") return cmd_hashcheck(cfg);
  if (command == "svsi") return cmd_svsi(cfg);
  throw std::invalid_argument("unknown command '" + std::string(command) + "'");
}

std::filesystem::path write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = report.command + "-" + report.json.at("config_hash").get<std::string>();
  const auto path = dir / (stem + ".json");
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << report.json.dump(2) << '\n';
  }
  for (const auto& [name, text] : report.tables) {
    std::ofstream os(dir / (stem + "-" + name + ".csv"), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write table " + name);
    os << text;
  }
  return path;
}

Consolidated consolidate(const std::filesystem::path& dir) {
  Consolidated out;
  if (!std::filesystem::is_directory(dir)) throw std::invalid_argument("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().filename() == "consolidated.json") continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  struct Row {
    std::string hash, command, kind, lambda, status, block_count, violations, file;
  };
  std::vector<Row> rows;
  for (const auto& f : files) {
    json j;
    try {
      std::ifstream in(f, std::ios::binary);
      j = json::parse(in);
    } catch (const std::exception&) {
      out.warnings.push_back(f.filename().string() + ": not valid JSON");
      continue;
    }
    if (!j.is_object() || !j.contains("command") || !j.contains("config_hash") || !j.contains("status") ||
        !j.contains("results")) {
      out.warnings.push_back(f.filename().string() + ": missing report fields");
      continue;
    }
    Row r;
    r.hash = j["config_hash"].is_string() ? j["config_hash"].get<std::string>() : "";
    r.command = j["command"].is_string() ? j["command"].get<std::string>() : "";
    r.status = j["status"].is_string() ? j["status"].get<std::string>() : "";
    const auto& cfgj = j.value("config", json::object());
    r.kind = cfgj.value("instance.kind", "");
    r.lambda = cfgj.value("instance.lambda", "");
    const auto& res = j["results"];
    r.block_count = res.is_object() && res.contains("block_count") ? res["block_count"].dump() : "";
    r.violations = j.contains("violations") && j["violations"].is_array() ? std::to_string(j["violations"].size()) : "";
    r.file = f.filename().string();
    rows.push_back(std::move(r));
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.hash, a.command, a.file) < std::tie(b.hash, b.command, b.file);
  });

  std::ostringstream csv;
  csv << "config_hash,command,kind,lambda,status,block_count,violations,file\n";
  json arr = json::array();
  for (const auto& r : rows) {
    csv << r.hash << ',' << r.command << ',' << r.kind << ',' << r.lambda << ',' << r.status << ',' << r.block_count
        << ',' << r.violations << ',' << r.file << '\n';
    arr.push_back(json{{"config_hash", r.hash},
                       {"command", r.command},
                       {"kind", r.kind},
                       {"lambda", r.lambda},
                       {"status", r.status},
                       {"block_count", r.block_count},
                       {"violations", r.violations},
                       {"file", r.file}});
  }
  out.rows = rows.size();
  out.csv = csv.str();
  out.json = json{{"rows", arr}, {"warnings", out.warnings}};
  return out;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact experiments on canonical quantum bit commitments from IV-OWSGs", "qcommit-lab"};
  app.require_subcommand(1);
  std::string config_path, out_dir, backend, report_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  const std::vector<std::string> names = {"lemma1", "hiding", "binding", "extract", "hashcheck", "svsi"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (default: [run] out, else .)");
    sub->add_option("--seed", seed, "override [shadow] seed");
    sub->add_option("--backend", backend, "override [shadow] backend")->check(CLI::IsMember({"exact", "sampled"}));
    sub->add_option("--threads", threads, "override [run] threads")->check(CLI::Range(1, 256));
  }
  auto* rep_cmd = app.add_subcommand("report", "consolidate the reports in a directory");
  rep_cmd->add_option("--dir", report_dir, "directory of reports")->required();
  rep_cmd->add_option("--out", out_dir, "where to write consolidated.{json,csv} (default: --dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (rep_cmd->parsed()) {
      const auto c = consolidate(report_dir);
      const std::filesystem::path dest = out_dir.empty() ? std::filesystem::path(report_dir) : std::filesystem::path(out_dir);
      std::filesystem::create_directories(dest);
      std::ofstream(dest / "consolidated.json", std::ios::binary) << c.json.dump(2) << '\n';
      std::ofstream(dest / "consolidated.csv", std::ios::binary) << c.csv;
      out << "consolidated " << c.rows << " report(s) into " << (dest / "consolidated.csv").string() << '\n';
      for (const auto& w : c.warnings) err << "warning: " << w << '\n';
      return kExitOk;
    }
    std::string command;
    for (const auto* sub : app.get_subcommands()) command = sub->get_name();

    ExperimentConfig cfg = load_config(config_path);
    if (seed) {
      cfg.shadow.seed = *seed;
      cfg.seed_given = true;
    }
    if (!backend.empty()) cfg.shadow.backend = extractor::parse_backend(backend);
    if (threads) cfg.threads = *threads;
    cfg.validate();
    set_tolerances(cfg.tolerances);
    set_worker_threads(static_cast<unsigned>(cfg.threads));

    const Report report = run_command(command, cfg);
    const std::filesystem::path dest = !out_dir.empty() ? std::filesystem::path(out_dir)
                                       : !cfg.out_dir.empty() ? std::filesystem::path(cfg.out_dir)
                                                              : std::filesystem::path(".");
    const auto path = write_report(report, dest);
    out << command << " report: " << path.string() << '\n';
    std::size_t width = 0;
    for (const auto& [k, v] : report.summary) width = std::max(width, k.size());
    for (const auto& [k, v] : report.summary) out << "  " << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << '\n';
    for (const auto& v : report.violations) out << "  VIOLATED: " << v << '\n';
    return report.violations.empty() ? kExitOk : kExitViolation;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DimensionCapError& e) {
    err << "resource cap: " << e.what() << " (register " << e.where() << ")\n";
    return kExitCap;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace qcl::cli
