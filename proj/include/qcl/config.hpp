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

#pragma once

// Experiment configuration: INI-style "key = value" sections.
//
//   [instance]      kind, lambda, eta, key_probs (comma separated)
//   [params]        D, p, r, t, m
//   [shadow]        backend, epsilon, omega, threshold, t_samples, seed
//   [binding]       attack (extractor | identity | file), unitary_file, q (binding | overlap | number)
//   [contradiction] q, lambda_min, lambda_max
//   [svsi]          instance (orthogonal | near-orthogonal), overlap, tol_inv, adversaries
//   [tolerances]    hermitian, trace, psd, povm, unitary, norm, probability, pgm_support, max_dense_entries
//   [run]           threads, out

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qcl/commit.hpp"
#include "qcl/extractor.hpp"
#include "qcl/owsg.hpp"
#include "qcl/tolerances.hpp"

namespace qcl::cli {

/// Invalid configuration. `field()` is "section.key" (or the file path).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  owsg::ToyInstance instance;

  double D = 1.0;
  double p = 2.0;
  std::optional<double> r;  // defaults to (0.5 + D/2) lambda
  int t = 1;
  std::optional<int> m;     // defaults to ceil(r) + 1

  extractor::ShadowConfig shadow;
  bool omega_given = false;
  bool seed_given = false;

  std::string attack = "extractor";
  std::string unitary_file;
  std::string binding_q = "binding";

  double contradiction_q = 4.0;
  int lambda_min = 1;
  int lambda_max = 64;

  std::string svsi_instance = "orthogonal";
  double svsi_overlap = 0.1;
  double svsi_tol_inv = 0.01;
  int svsi_adversaries = 100;

  Tolerances tolerances;
  int threads = 1;
  std::string out_dir;

  commit::CommitmentParams params() const;
  double r_value() const;
  /// Shadow settings with omega defaulted to 2^-lambda.
  extractor::ShadowConfig shadow_config() const;
  /// Re-checks cross-field constraints after command-line overrides.
  void validate() const;
  /// Sorted "section.key = value" lines of the effective configuration.
  std::string canonical() const;
  std::uint64_t hash() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace qcl::cli
