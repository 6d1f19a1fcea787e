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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qcl/qla.hpp"

namespace qcl::qla {

/// Basis labels of the classical registers, one entry per register.
using Labels = std::vector<std::uint32_t>;

/// A pure state sum_L |L>_classical (x) |v_L>_quantum, stored as a map from
/// classical label tuples to dense blocks over the quantum registers. This is
/// the only representation of the commitment states that fits in memory: the
/// classical registers are exponentially large but the support is sparse.
class LabeledState {
 public:
  /// Validates block dimensions, label ranges and the global norm.
  LabeledState(RegisterLayout classical, RegisterLayout quantum,
               std::map<Labels, ComplexVector> blocks);

  const RegisterLayout& classical() const { return classical_; }
  const RegisterLayout& quantum() const { return quantum_; }
  const std::map<Labels, ComplexVector>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }

  /// Classical registers followed by quantum registers.
  RegisterLayout full_layout() const;
  double norm() const;

  /// Dense amplitude vector on full_layout(). Throws DimensionCapError when
  /// the vector length exceeds the dense cap.
  ComplexVector to_dense() const;

 private:
  RegisterLayout classical_;
  RegisterLayout quantum_;
  std::map<Labels, ComplexVector> blocks_;
};

/// Reduced density matrix on `keep` (any mix of classical and quantum
/// registers, result ordered as in full_layout()). Cross terms between two
/// blocks survive only when their traced-out classical labels coincide.
DensityMatrix reduce_labeled(const LabeledState& state, const std::vector<std::string>& keep);

}  // namespace qcl::qla
