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

// Experiment commands: each one runs a module pipeline from an
// ExperimentConfig and produces a JSON report, CSV tables and a short
// human-readable summary.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qcl/config.hpp"

namespace qcl::cli {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitConfig = 2, kExitCap = 3 };

struct Report {
  std::string command;
  nlohmann::json json;                        // envelope + "results"
  std::map<std::string, std::string> tables;  // table name -> CSV text
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::string> violations;
};

Report cmd_lemma1(const ExperimentConfig& cfg);
Report cmd_hiding(const ExperimentConfig& cfg);
Report cmd_binding(const ExperimentConfig& cfg);
Report cmd_extract(const ExperimentConfig& cfg);
Report cmd_hashcheck(const ExperimentConfig& cfg);
Report cmd_svsi(const ExperimentConfig& cfg);

/// Dispatches on the command name; throws std::invalid_argument for unknown names.
Report run_command(std::string_view command, const ExperimentConfig& cfg);

/// Writes <command>-<config hash>.json and one CSV per table into `dir`.
/// Returns the JSON path.
std::filesystem::path write_report(const Report& report, const std::filesystem::path& dir);

struct Consolidated {
  nlohmann::json json;
  std::string csv;
  std::vector<std::string> warnings;
  std::size_t rows = 0;
};

/// One row per report file in `dir` (consolidated.json itself excluded),
/// sorted by config hash, command and file name. Unreadable or malformed
/// files become warnings.
Consolidated consolidate(const std::filesystem::path& dir);

/// The full command line: `qcommit-lab <command> --config <path> [--out <dir>]
/// [--seed N] [--backend exact|sampled] [--threads N]` and `qcommit-lab report
/// --dir <dir>`. Returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcl::cli
