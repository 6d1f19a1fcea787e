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

#include "qcl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace qcl::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"instance", {"kind", "lambda", "eta", "key_probs"}},
    {"params", {"D", "p", "r", "t", "m"}},
    {"shadow", {"backend", "epsilon", "omega", "threshold", "t_samples", "seed"}},
    {"binding", {"attack", "unitary_file", "q"}},
    {"contradiction", {"q", "lambda_min", "lambda_max"}},
    {"svsi", {"instance", "overlap", "tol_inv", "adversaries"}},
    {"tolerances",
     {"hermitian", "trace", "psd", "povm", "unitary", "norm", "probability", "pgm_support", "max_dense_entries"}},
    {"run", {"threads", "out"}},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto val = sec->get_optional<std::string>(key);
    if (!val) return std::nullopt;
    return trim(*val);
  }

  std::optional<double> real(const std::string& section, const std::string& key) const {
    const auto s = raw(section, key);
    if (!s) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(s->data(), s->data() + s->size(), v);
    if (res.ec != std::errc() || res.ptr != s->data() + s->size() || !std::isfinite(v))
      throw ConfigError(section + "." + key, "expected a number, got '" + *s + "'");
    return v;
  }

  std::optional<std::int64_t> integer(const std::string& section, const std::string& key) const {
    const auto s = raw(section, key);
    if (!s) return std::nullopt;
    std::int64_t v = 0;
    const auto res = std::from_chars(s->data(), s->data() + s->size(), v);
    if (res.ec != std::errc() || res.ptr != s->data() + s->size())
      throw ConfigError(section + "." + key, "expected an integer, got '" + *s + "'");
    return v;
  }

 private:
  const pt::ptree& tree_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

commit::CommitmentParams ExperimentConfig::params() const {
  return commit::CommitmentParams::make(instance.lambda, D, t, m, p);
}

double ExperimentConfig::r_value() const { return r.value_or((0.5 + D / 2.0) * instance.lambda); }

extractor::ShadowConfig ExperimentConfig::shadow_config() const {
  extractor::ShadowConfig cfg = shadow;
  if (!omega_given) cfg.omega = std::ldexp(1.0, -instance.lambda);
  return cfg;
}

void ExperimentConfig::validate() const {
  const int lambda = instance.lambda;
  require(lambda >= 1 && lambda <= 8, "instance.lambda", "must be in [1, 8]");
  require(instance.eta >= 0.0 && instance.eta <= 1.0, "instance.eta", "must be in [0, 1]");
  if (instance.key_probs) {
    require(instance.key_probs->size() == (std::size_t{1} << lambda), "instance.key_probs",
            "needs exactly 2^lambda entries");
    double sum = 0.0;
    for (double v : *instance.key_probs) {
      require(v >= 0.0, "instance.key_probs", "entries must be nonnegative");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-12, "instance.key_probs", "entries must sum to 1");
  }
  require(D > 0.0, "params.D", "must be positive");
  require(p > 1.0, "params.p", "must exceed 1");
  if (r) require(*r >= 0.0, "params.r", "must be nonnegative");
  require(t >= 0 && t <= 4096, "params.t", "must be in [0, 4096]");
  if (m) require(*m >= 1 && *m <= 8, "params.m", "must be in [1, 8]");
  const auto sc = shadow_config();
  require(sc.epsilon > 0.0 && sc.epsilon < sc.threshold, "shadow.epsilon", "must be in (0, threshold)");
  require(sc.threshold < 1.0, "shadow.threshold", "must be below 1");
  require(sc.omega > 0.0 && sc.omega < 1.0, "shadow.omega", "must be in (0, 1)");
  if (sc.backend == extractor::Backend::kSampled)
    require(seed_given, "shadow.seed", "required for the sampled backend");
  require(attack == "extractor" || attack == "identity" || attack == "file", "binding.attack",
          "expected extractor, identity or file");
  if (attack == "file") require(!unitary_file.empty(), "binding.unitary_file", "required when attack = file");
  if (binding_q != "binding" && binding_q != "overlap") {
    double v = 0.0;
    const auto res = std::from_chars(binding_q.data(), binding_q.data() + binding_q.size(), v);
    require(res.ec == std::errc() && res.ptr == binding_q.data() + binding_q.size() && v >= 1.0, "binding.q",
            "expected binding, overlap or a number >= 1");
  }
  require(contradiction_q >= 1.0, "contradiction.q", "must be at least 1");
  require(lambda_min >= 1 && lambda_max >= lambda_min && lambda_max <= 1000, "contradiction.lambda_max",
          "need 1 <= lambda_min <= lambda_max <= 1000");
  require(svsi_instance == "orthogonal" || svsi_instance == "near-orthogonal", "svsi.instance",
          "expected orthogonal or near-orthogonal");
  require(svsi_overlap >= 0.0 && svsi_overlap < 1.0, "svsi.overlap", "must be in [0, 1)");
  require(svsi_tol_inv >= 0.0 && svsi_tol_inv < 1.0, "svsi.tol_inv", "must be in [0, 1)");
  require(svsi_adversaries >= 0 && svsi_adversaries <= 100000, "svsi.adversaries", "must be in [0, 100000]");
  require(threads >= 1 && threads <= 256, "run.threads", "must be in [1, 256]");
  const auto& tol = tolerances;
  for (auto [name, v] : std::vector<std::pair<const char*, double>>{{"hermitian", tol.hermitian},
                                                                    {"trace", tol.trace},
                                                                    {"psd", tol.psd},
                                                                    {"povm", tol.povm},
                                                                    {"unitary", tol.unitary},
                                                                    {"norm", tol.norm},
                                                                    {"probability", tol.probability},
                                                                    {"pgm_support", tol.pgm_support}})
    require(v > 0.0 && v < 1e-2, std::string("tolerances.") + name, "must be in (0, 0.01)");
  require(tol.max_dense_entries >= 16, "tolerances.max_dense_entries", "must be at least 16");
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["instance.kind"] = std::string(owsg::to_string(instance.kind));
  kv["instance.lambda"] = std::to_string(instance.lambda);
  kv["instance.eta"] = fmt(instance.eta);
  if (instance.key_probs) {
    std::string s;
    for (std::size_t i = 0; i < instance.key_probs->size(); ++i) s += (i ? "," : "") + fmt((*instance.key_probs)[i]);
    kv["instance.key_probs"] = s;
  }
  kv["params.D"] = fmt(D);
  kv["params.p"] = fmt(p);
  kv["params.r"] = fmt(r_value());
  kv["params.t"] = std::to_string(t);
  kv["params.m"] = m ? std::to_string(*m) : "default";
  const auto sc = shadow_config();
  kv["shadow.backend"] = std::string(extractor::to_string(sc.backend));
  kv["shadow.epsilon"] = fmt(sc.epsilon);
  kv["shadow.omega"] = fmt(sc.omega);
  kv["shadow.threshold"] = fmt(sc.threshold);
  kv["shadow.t_samples"] = std::to_string(sc.t_samples);
  kv["shadow.seed"] = std::to_string(sc.seed);
  kv["binding.attack"] = attack;
  kv["binding.unitary_file"] = unitary_file;
  kv["binding.q"] = binding_q;
  kv["contradiction.q"] = fmt(contradiction_q);
  kv["contradiction.lambda_min"] = std::to_string(lambda_min);
  kv["contradiction.lambda_max"] = std::to_string(lambda_max);
  kv["svsi.instance"] = svsi_instance;
  kv["svsi.overlap"] = fmt(svsi_overlap);
  kv["svsi.tol_inv"] = fmt(svsi_tol_inv);
  kv["svsi.adversaries"] = std::to_string(svsi_adversaries);
  kv["tolerances.hermitian"] = fmt(tolerances.hermitian);
  kv["tolerances.trace"] = fmt(tolerances.trace);
  kv["tolerances.psd"] = fmt(tolerances.psd);
  kv["tolerances.povm"] = fmt(tolerances.povm);
  kv["tolerances.unitary"] = fmt(tolerances.unitary);
  kv["tolerances.norm"] = fmt(tolerances.norm);
  kv["tolerances.probability"] = fmt(tolerances.probability);
  kv["tolerances.pgm_support"] = fmt(tolerances.pgm_support);
  kv["tolerances.max_dense_entries"] = std::to_string(tolerances.max_dense_entries);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical()); }

ExperimentConfig parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  for (const auto& [section, body] : tree) {
    const auto it = kSchema.find(section);
    if (it == kSchema.end()) {
      if (body.empty()) throw ConfigError(section, "key outside any section");
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      (void)value;
      if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
    }
  }

  const Reader rd(tree);
  ExperimentConfig cfg;
  if (auto kind = rd.raw("instance", "kind")) {
    try {
      cfg.instance.kind = owsg::parse_kind(*kind);
    } catch (const std::invalid_argument&) {
      throw ConfigError("instance.kind",
                        "unknown instance '" + *kind + "' (expected bb84-pure, bb84-depolarized, constant, orthogonal)");
    }
  }
  if (auto v = rd.integer("instance", "lambda")) {
    require(*v >= 1 && *v <= 8, "instance.lambda", "must be in [1, 8]");
    cfg.instance.lambda = static_cast<int>(*v);
  }
  if (auto v = rd.real("instance", "eta")) cfg.instance.eta = *v;
  if (auto s = rd.raw("instance", "key_probs")) {
    std::vector<double> probs;
    std::stringstream ss(*s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string tok = trim(item);
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ConfigError("instance.key_probs", "expected comma-separated numbers, got '" + tok + "'");
      probs.push_back(v);
    }
    cfg.instance.key_probs = probs;
  }
  if (auto v = rd.real("params", "D")) cfg.D = *v;
  if (auto v = rd.real("params", "p")) cfg.p = *v;
  if (auto v = rd.real("params", "r")) cfg.r = *v;
  if (auto v = rd.integer("params", "t")) {
    require(*v >= 0 && *v <= 4096, "params.t", "must be in [0, 4096]");
    cfg.t = static_cast<int>(*v);
  }
  if (auto v = rd.integer("params", "m")) {
    require(*v >= 1 && *v <= 8, "params.m", "must be in [1, 8]");
    cfg.m = static_cast<int>(*v);
  }
  if (auto s = rd.raw("shadow", "backend")) {
    try {
      cfg.shadow.backend = extractor::parse_backend(*s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("shadow.backend", e.what());
    }
  }
  if (auto v = rd.real("shadow", "epsilon")) cfg.shadow.epsilon = *v;
  if (auto v = rd.real("shadow", "threshold")) cfg.shadow.threshold = *v;
  if (auto v = rd.real("shadow", "omega")) {
    cfg.shadow.omega = *v;
    cfg.omega_given = true;
  }
  if (auto v = rd.integer("shadow", "t_samples")) {
    require(*v >= 0 && *v <= 100000000, "shadow.t_samples", "must be in [0, 1e8]");
    cfg.shadow.t_samples = static_cast<std::uint64_t>(*v);
  }
  if (auto v = rd.integer("shadow", "seed")) {
    require(*v >= 0, "shadow.seed", "must be nonnegative");
    cfg.shadow.seed = static_cast<std::uint64_t>(*v);
    cfg.seed_given = true;
  }
  if (auto s = rd.raw("binding", "attack")) cfg.attack = *s;
  if (auto s = rd.raw("binding", "unitary_file")) cfg.unitary_file = *s;
  if (auto s = rd.raw("binding", "q")) cfg.binding_q = *s;
  if (auto v = rd.real("contradiction", "q")) cfg.contradiction_q = *v;
  if (auto v = rd.integer("contradiction", "lambda_min")) {
    require(*v >= 1 && *v <= 1000, "contradiction.lambda_min", "must be in [1, 1000]");
    cfg.lambda_min = static_cast<int>(*v);
  }
  if (auto v = rd.integer("contradiction", "lambda_max")) {
    require(*v >= 1 && *v <= 1000, "contradiction.lambda_max", "must be in [1, 1000]");
    cfg.lambda_max = static_cast<int>(*v);
  }
  if (auto s = rd.raw("svsi", "instance")) cfg.svsi_instance = *s;
  if (auto v = rd.real("svsi", "overlap")) cfg.svsi_overlap = *v;
  if (auto v = rd.real("svsi", "tol_inv")) cfg.svsi_tol_inv = *v;
  if (auto v = rd.integer("svsi", "adversaries")) {
    require(*v >= 0 && *v <= 100000, "svsi.adversaries", "must be in [0, 100000]");
    cfg.svsi_adversaries = static_cast<int>(*v);
  }
  auto tol_field = [&](const char* key, double& slot) {
    if (auto v = rd.real("tolerances", key)) slot = *v;
  };
  tol_field("hermitian", cfg.tolerances.hermitian);
  tol_field("trace", cfg.tolerances.trace);
  tol_field("psd", cfg.tolerances.psd);
  tol_field("povm", cfg.tolerances.povm);
  tol_field("unitary", cfg.tolerances.unitary);
  tol_field("norm", cfg.tolerances.norm);
  tol_field("probability", cfg.tolerances.probability);
  tol_field("pgm_support", cfg.tolerances.pgm_support);
  if (auto v = rd.integer("tolerances", "max_dense_entries")) {
    require(*v >= 16, "tolerances.max_dense_entries", "must be at least 16");
    cfg.tolerances.max_dense_entries = static_cast<std::size_t>(*v);
  }
  if (auto v = rd.integer("run", "threads")) {
    require(*v >= 1 && *v <= 256, "run.threads", "must be in [1, 256]");
    cfg.threads = static_cast<int>(*v);
  }
  if (auto s = rd.raw("run", "out")) cfg.out_dir = *s;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

}  // namespace qcl::cli
