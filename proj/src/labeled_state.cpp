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

#include "qcl/labeled_state.hpp"

#include <algorithm>
#include <cmath>

#include "qcl/errors.hpp"
#include "qcl/tolerances.hpp"

namespace qcl::qla {

LabeledState::LabeledState(RegisterLayout classical, RegisterLayout quantum,
                           std::map<Labels, ComplexVector> blocks)
    : classical_(std::move(classical)), quantum_(std::move(quantum)), blocks_(std::move(blocks)) {
  for (const auto& r : quantum_.registers())
    if (classical_.contains(r.name)) throw LayoutError("register " + r.name + " is both classical and quantum");
  const auto qdim = static_cast<Eigen::Index>(quantum_.total_dim());
  for (const auto& [labels, vec] : blocks_) {
    if (labels.size() != classical_.size()) throw LayoutError("label tuple arity mismatch");
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] >= classical_[i].dim)
        throw LayoutError("label out of range for register " + classical_[i].name);
    if (vec.size() != qdim) throw LayoutError("block vector has wrong quantum dimension");
  }
  if (std::abs(norm() - 1.0) > tolerances().norm)
    throw ValidityError("labeled state norm " + std::to_string(norm()) + " != 1");
}

RegisterLayout LabeledState::full_layout() const {
  auto regs = classical_.registers();
  regs.insert(regs.end(), quantum_.registers().begin(), quantum_.registers().end());
  return RegisterLayout(std::move(regs));
}

double LabeledState::norm() const {
  double sq = 0.0;
  for (const auto& [labels, vec] : blocks_) sq += vec.squaredNorm();
  return std::sqrt(sq);
}

ComplexVector LabeledState::to_dense() const {
  const std::size_t cdim = classical_.total_dim();
  const std::size_t qdim = quantum_.total_dim();
  check_dense_cap(cdim * qdim, "LabeledState::to_dense");
  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(cdim * qdim));
  for (const auto& [labels, vec] : blocks_) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) idx = idx * classical_[i].dim + labels[i];
    out.segment(static_cast<Eigen::Index>(idx * qdim), static_cast<Eigen::Index>(qdim)) = vec;
  }
  return out;
}

DensityMatrix reduce_labeled(const LabeledState& state, const std::vector<std::string>& keep) {
  const auto& cl = state.classical();
  const auto& qu = state.quantum();
  for (const auto& name : keep)
    if (!cl.contains(name) && !qu.contains(name)) throw LayoutError("unknown register " + name);
  auto kept = [&](const std::string& name) {
    return std::find(keep.begin(), keep.end(), name) != keep.end();
  };

  std::vector<std::size_t> kept_c, traced_c;
  std::size_t kept_cdim = 1;
  for (std::size_t i = 0; i < cl.size(); ++i) {
    if (kept(cl[i].name)) {
      kept_c.push_back(i);
      kept_cdim *= cl[i].dim;
    } else {
      traced_c.push_back(i);
    }
  }
  std::vector<std::string> keep_q;
  std::size_t kept_qdim = 1;
  for (const auto& r : qu.registers())
    if (kept(r.name)) {
      keep_q.push_back(r.name);
      kept_qdim *= r.dim;
    }
  const std::size_t kept_dim = kept_cdim * kept_qdim;
  check_dense_cap(kept_dim * kept_dim, keep.empty() ? std::string("reduce_labeled") : keep.front());

  // Group blocks by their traced classical labels; only pairs inside a group
  // contribute.
  struct Entry {
    std::size_t row;
    const ComplexVector* vec;
  };
  std::map<Labels, std::vector<Entry>> groups;
  for (const auto& [labels, vec] : state.blocks()) {
    Labels traced;
    traced.reserve(traced_c.size());
    for (auto i : traced_c) traced.push_back(labels[i]);
    std::size_t row = 0;
    for (auto i : kept_c) row = row * cl[i].dim + labels[i];
    groups[traced].push_back({row, &vec});
  }

  const auto kq = static_cast<Eigen::Index>(kept_qdim);
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(kept_dim),
                                          static_cast<Eigen::Index>(kept_dim));
  for (const auto& [traced, entries] : groups) {
    for (const auto& a : entries) {
      for (const auto& b : entries) {
        const ComplexMatrix piece = partial_trace_outer(*a.vec, *b.vec, qu, keep_q);
        out.block(static_cast<Eigen::Index>(a.row) * kq, static_cast<Eigen::Index>(b.row) * kq, kq,
                  kq) += piece;
      }
    }
  }
  return DensityMatrix((out + out.adjoint()) / 2.0);
}

}  // namespace qcl::qla
