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

// Exact finite-dimensional complex linear algebra for small quantum systems:
// tensor products, partial traces, fidelity and trace distance, PSD square
// roots, POVMs, Naimark dilation and the pretty-good measurement.
//
// Subsystem ordering convention: for registers (R_0, ..., R_{n-1}) the basis
// index is mixed-radix with R_0 most significant, i.e. the usual kron order.

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qcl::qla {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Throws DimensionCapError if `entries` exceeds tolerances().max_dense_entries.
void check_dense_cap(std::size_t entries, std::string_view where);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);
/// a^{(x)n}; n = 0 gives the 1x1 identity.
ComplexMatrix kron_power(const ComplexMatrix& a, int n);
ComplexVector kron_power(const ComplexVector& a, int n);

/// Largest elementwise |M - M^dagger|.
double hermiticity_defect(const ComplexMatrix& m);
/// Largest elementwise |V^dagger V - I|.
double unitarity_defect(const ComplexMatrix& v);

/// Eigenvalues (ascending) of the Hermitian part of `m`.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m);

/// Square root of a PSD matrix. Eigenvalues in [-psd_tol, 0) are clipped to
/// zero, anything below throws ValidityError.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// Ordered list of named registers; total dimension is the product.
class RegisterLayout {
 public:
  struct Register {
    std::string name;
    std::size_t dim;
  };

  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<Register> regs);

  std::size_t size() const { return regs_.size(); }
  const Register& operator[](std::size_t i) const { return regs_[i]; }
  const std::vector<Register>& registers() const { return regs_; }
  std::vector<std::size_t> dims() const;
  std::size_t total_dim() const;
  bool contains(std::string_view name) const;
  /// Throws LayoutError for unknown names.
  std::size_t index_of(std::string_view name) const;

 private:
  std::vector<Register> regs_;
};

/// Hermitian, unit-trace, PSD matrix (validated on construction).
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix from_pure(const ComplexVector& psi);

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const ComplexMatrix& matrix() const { return mat_; }

 private:
  ComplexMatrix mat_;
};

/// Reorders the tensor factors of `psi`: axis `perm[i]` of the input becomes
/// axis i of the output.
ComplexVector permute_subsystems(const ComplexVector& psi,
                                 const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& perm);

/// Tr over every register not in `keep`. Kept registers stay in layout order.
DensityMatrix partial_trace(const DensityMatrix& rho, const RegisterLayout& layout,
                            const std::vector<std::string>& keep);

/// Tr_traced |a><b| for vectors on `layout`. Used for both pure reductions
/// (a == b) and the cross terms of block-structured states.
ComplexMatrix partial_trace_outer(const ComplexVector& a, const ComplexVector& b,
                                  const RegisterLayout& layout,
                                  const std::vector<std::string>& keep);

/// (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2, clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// (1/2)||rho - sigma||_1 via eigenvalues of the difference.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Outcome label of a POVM element. Nonnegative labels are keys; kBottom is
/// the failure / residual outcome.
using Outcome = std::int64_t;
inline constexpr Outcome kBottom = -1;

class POVM {
 public:
  /// Validates: common dimension, each element PSD and the sum equal to the
  /// identity within tolerances().povm.
  POVM(std::vector<Outcome> labels, std::vector<ComplexMatrix> elements);

  std::size_t size() const { return elements_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(elements_.front().rows()); }
  const std::vector<Outcome>& labels() const { return labels_; }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  const ComplexMatrix& element(std::size_t i) const { return elements_[i]; }
  /// Position of `label`, or size() if absent.
  std::size_t find(Outcome label) const;
  /// Tr(E_i rho), real part.
  double probability(std::size_t i, const ComplexMatrix& rho) const;

 private:
  std::vector<Outcome> labels_;
  std::vector<ComplexMatrix> elements_;
};

/// Unitary V on (system (x) ancilla), ancilla dimension povm.size(), with
/// V(|v>|0>) = sum_a (sqrt(E_a)|v>) (x) |a>. Ancilla basis index a is the
/// element position in the POVM. Remaining columns complete an orthonormal
/// basis.
ComplexMatrix naimark_dilate(const POVM& povm);

/// Pretty-good measurement for the ensemble {(priors[i], states[i])}.
/// Labels 0..n-1 for the states plus kBottom for I - sum M.
POVM pgm(const std::vector<DensityMatrix>& states, const std::vector<double>& priors);

/// max over unitaries U on Y of |<b|(I (x) U)|a>| for a, b on X (x) Y, by the
/// trace norm of A^dagger B (A, B the dimX x dimY coefficient matrices).
double uhlmann_max_overlap(const ComplexVector& a, const ComplexVector& b,
                           std::size_t dim_x, std::size_t dim_y);

/// A unitary on Y attaining uhlmann_max_overlap (with nonnegative phase).
ComplexMatrix uhlmann_optimal_unitary(const ComplexVector& a, const ComplexVector& b,
                                      std::size_t dim_x, std::size_t dim_y);

// Random objects for property tests and demos. Ginibre / QR constructions.
ComplexVector random_state(std::size_t dim, std::mt19937_64& rng);
DensityMatrix random_density_matrix(std::size_t dim, std::mt19937_64& rng);
ComplexMatrix random_unitary(std::size_t dim, std::mt19937_64& rng);

}  // namespace qcl::qla
