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

#include "qcl/qla.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "qcl/errors.hpp"
#include "qcl/tolerances.hpp"

namespace qcl::qla {

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + m.adjoint()) / 2.0; }

Eigen::SelfAdjointEigenSolver<ComplexMatrix> hermitian_eig(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigendecomposition failed");
  return solver;
}

// Splits the layout into kept / traced axes (each in layout order) and
// returns the permutation putting kept axes first.
struct Split {
  std::vector<std::size_t> perm;
  std::size_t kept_dim = 1;
  std::size_t traced_dim = 1;
};

Split split_layout(const RegisterLayout& layout, const std::vector<std::string>& keep) {
  std::unordered_set<std::string> keep_set;
  for (const auto& name : keep) {
    layout.index_of(name);  // validates
    keep_set.insert(name);
  }
  Split s;
  std::vector<std::size_t> traced;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (keep_set.count(layout[i].name)) {
      s.perm.push_back(i);
      s.kept_dim *= layout[i].dim;
    } else {
      traced.push_back(i);
      s.traced_dim *= layout[i].dim;
    }
  }
  s.perm.insert(s.perm.end(), traced.begin(), traced.end());
  return s;
}

}  // namespace

void check_dense_cap(std::size_t entries, std::string_view where) {
  const std::size_t cap = tolerances().max_dense_entries;
  if (entries > cap) throw DimensionCapError(std::string(where), entries, cap);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto rows = static_cast<std::size_t>(a.rows() * b.rows());
  const auto cols = static_cast<std::size_t>(a.cols() * b.cols());
  check_dense_cap(rows * cols, "kron");
  ComplexMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  check_dense_cap(static_cast<std::size_t>(a.size() * b.size()), "kron");
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

ComplexMatrix kron_power(const ComplexMatrix& a, int n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, a);
  return out;
}

ComplexVector kron_power(const ComplexVector& a, int n) {
  ComplexVector out = ComplexVector::Ones(1);
  for (int i = 0; i < n; ++i) out = kron(out, a);
  return out;
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const ComplexMatrix& v) {
  if (v.rows() != v.cols()) return std::numeric_limits<double>::infinity();
  return (v.adjoint() * v - ComplexMatrix::Identity(v.rows(), v.cols())).cwiseAbs().maxCoeff();
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
  return hermitian_eig(m).eigenvalues();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  const auto solver = hermitian_eig(m);
  Eigen::VectorXd ev = solver.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tolerances().psd)
      throw ValidityError("psd_sqrt: eigenvalue " + std::to_string(ev(i)) + " below tolerance");
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  const auto& u = solver.eigenvectors();
  return u * ev.cast<Complex>().asDiagonal() * u.adjoint();
}

RegisterLayout::RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
  std::unordered_set<std::string> seen;
  for (const auto& r : regs_) {
    if (r.dim < 1) throw LayoutError("register " + r.name + " has dimension 0");
    if (!seen.insert(r.name).second) throw LayoutError("duplicate register name " + r.name);
  }
}

std::vector<std::size_t> RegisterLayout::dims() const {
  std::vector<std::size_t> d;
  d.reserve(regs_.size());
  for (const auto& r : regs_) d.push_back(r.dim);
  return d;
}

std::size_t RegisterLayout::total_dim() const {
  std::size_t d = 1;
  for (const auto& r : regs_) d *= r.dim;
  return d;
}

bool RegisterLayout::contains(std::string_view name) const {
  return std::any_of(regs_.begin(), regs_.end(), [&](const Register& r) { return r.name == name; });
}

std::size_t RegisterLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].name == name) return i;
  throw LayoutError("unknown register " + std::string(name));
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
  const auto& tol = tolerances();
  if (mat_.rows() == 0 || mat_.rows() != mat_.cols())
    throw ValidityError("density matrix must be square and nonempty");
  if (!mat_.allFinite()) throw ValidityError("density matrix has non-finite entries");
  if (hermiticity_defect(mat_) > tol.hermitian)
    throw ValidityError("density matrix is not Hermitian");
  const double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > tol.trace)
    throw ValidityError("density matrix trace " + std::to_string(tr) + " != 1");
  if (hermitian_eigenvalues(mat_).minCoeff() < -tol.psd)
    throw ValidityError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const ComplexVector& psi) {
  check_dense_cap(static_cast<std::size_t>(psi.size() * psi.size()), "from_pure");
  ComplexMatrix m = psi * psi.adjoint();
  return DensityMatrix(hermitian_part(m));
}

ComplexVector permute_subsystems(const ComplexVector& psi, const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& perm) {
  const std::size_t n = dims.size();
  if (perm.size() != n) throw LayoutError("permutation size mismatch");
  const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                            std::multiplies<>());
  if (static_cast<std::size_t>(psi.size()) != total)
    throw LayoutError("vector length does not match register dimensions");

  // Strides of the input axes, then output strides for the permuted order.
  std::vector<std::size_t> in_stride(n, 1);
  for (std::size_t i = n; i-- > 1;) in_stride[i - 1] = in_stride[i] * dims[i];
  std::vector<std::size_t> out_dims(n);
  for (std::size_t i = 0; i < n; ++i) out_dims[i] = dims[perm[i]];

  ComplexVector out(psi.size());
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t o = 0; o < total; ++o) {
    std::size_t in = 0;
    for (std::size_t i = 0; i < n; ++i) in += digit[i] * in_stride[perm[i]];
    out(static_cast<Eigen::Index>(o)) = psi(static_cast<Eigen::Index>(in));
    for (std::size_t i = n; i-- > 0;) {
      if (++digit[i] < out_dims[i]) break;
      digit[i] = 0;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const RegisterLayout& layout,
                            const std::vector<std::string>& keep) {
  if (layout.total_dim() != rho.dim()) throw LayoutError("layout dimension does not match state");
  const Split s = split_layout(layout, keep);
  check_dense_cap(s.kept_dim * s.kept_dim, "partial_trace");

  // full index -> (kept, traced) coordinates
  const auto dims = layout.dims();
  const std::size_t n = dims.size();
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n; i-- > 1;) stride[i - 1] = stride[i] * dims[i];
  const std::size_t n_kept = static_cast<std::size_t>(
      std::count_if(layout.registers().begin(), layout.registers().end(), [&](const auto& r) {
        return std::find(keep.begin(), keep.end(), r.name) != keep.end();
      }));

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_traced(s.traced_dim);
  for (std::size_t f = 0; f < rho.dim(); ++f) {
    std::size_t k = 0, t = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t axis = s.perm[j];
      const std::size_t d = (f / stride[axis]) % dims[axis];
      if (j < n_kept)
        k = k * dims[axis] + d;
      else
        t = t * dims[axis] + d;
    }
    by_traced[t].emplace_back(f, k);
  }

  ComplexMatrix out = ComplexMatrix::Zero(s.kept_dim, s.kept_dim);
  const auto& m = rho.matrix();
  for (const auto& group : by_traced)
    for (const auto& [fi, ki] : group)
      for (const auto& [fj, kj] : group) out(ki, kj) += m(fi, fj);
  return DensityMatrix(hermitian_part(out));
}

ComplexMatrix partial_trace_outer(const ComplexVector& a, const ComplexVector& b,
                                  const RegisterLayout& layout,
                                  const std::vector<std::string>& keep) {
  if (static_cast<std::size_t>(a.size()) != layout.total_dim() || a.size() != b.size())
    throw LayoutError("layout dimension does not match vectors");
  const Split s = split_layout(layout, keep);
  check_dense_cap(s.kept_dim * s.kept_dim, "partial_trace");
  const auto dims = layout.dims();
  const ComplexVector pa = permute_subsystems(a, dims, s.perm);
  const ComplexVector pb = &a == &b ? pa : permute_subsystems(b, dims, s.perm);
  const auto kd = static_cast<Eigen::Index>(s.kept_dim);
  const auto td = static_cast<Eigen::Index>(s.traced_dim);
  Eigen::Map<const RowMajorMatrix> ma(pa.data(), kd, td);
  Eigen::Map<const RowMajorMatrix> mb(pb.data(), kd, td);
  return ma * mb.adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ValidityError("fidelity: dimension mismatch");
  const ComplexMatrix root = psd_sqrt(sigma.matrix());
  const Eigen::VectorXd ev = hermitian_eigenvalues(root * rho.matrix() * root);
  if (ev.minCoeff() < -tolerances().psd) throw ValidityError("fidelity: non-PSD product");
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::sqrt(std::max(ev(i), 0.0));
  return std::clamp(s * s, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ValidityError("trace_distance: dimension mismatch");
  const Eigen::VectorXd ev = hermitian_eigenvalues(rho.matrix() - sigma.matrix());
  return std::clamp(0.5 * ev.cwiseAbs().sum(), 0.0, 1.0);
}

POVM::POVM(std::vector<Outcome> labels, std::vector<ComplexMatrix> elements)
    : labels_(std::move(labels)), elements_(std::move(elements)) {
  const auto& tol = tolerances();
  if (elements_.empty()) throw ValidityError("POVM has no elements");
  if (labels_.size() != elements_.size()) throw ValidityError("POVM label count mismatch");
  {
    std::unordered_set<Outcome> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw ValidityError("POVM labels are not unique");
  }
  const Eigen::Index d = elements_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto& e = elements_[i];
    if (e.rows() != d || e.cols() != d) throw ValidityError("POVM elements differ in dimension");
    if (hermiticity_defect(e) > tol.hermitian + tol.povm)
      throw ValidityError("POVM element " + std::to_string(i) + " is not Hermitian");
    if (hermitian_eigenvalues(e).minCoeff() < -tol.psd)
      throw ValidityError("POVM element " + std::to_string(i) + " is not PSD");
    sum += e;
  }
  if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol.povm)
    throw ValidityError("POVM elements do not sum to identity");
}

std::size_t POVM::find(Outcome label) const {
  return static_cast<std::size_t>(std::find(labels_.begin(), labels_.end(), label) -
                                  labels_.begin());
}

double POVM::probability(std::size_t i, const ComplexMatrix& rho) const {
  return (elements_[i] * rho).trace().real();
}

ComplexMatrix naimark_dilate(const POVM& povm) {
  const auto d = static_cast<Eigen::Index>(povm.dim());
  const auto n = static_cast<Eigen::Index>(povm.size());
  const Eigen::Index big = d * n;
  check_dense_cap(static_cast<std::size_t>(big * big), "naimark_dilate");

  ComplexMatrix isometry = ComplexMatrix::Zero(big, d);
  for (Eigen::Index a = 0; a < n; ++a) {
    const ComplexMatrix root = psd_sqrt(povm.element(static_cast<std::size_t>(a)));
    for (Eigen::Index i = 0; i < d; ++i) isometry.row(i * n + a) = root.row(i);
  }
  if ((isometry.adjoint() * isometry - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() >
      tolerances().unitary)
    throw NumericError("naimark_dilate: first block is not an isometry");

  // Orthonormal basis of the complement via the projector I - W W^dagger.
  const ComplexMatrix complement =
      ComplexMatrix::Identity(big, big) - isometry * isometry.adjoint();
  const auto solver = hermitian_eig(complement);
  std::vector<Eigen::Index> fill;
  for (Eigen::Index i = 0; i < big; ++i)
    if (solver.eigenvalues()(i) > 0.5) fill.push_back(i);
  if (static_cast<Eigen::Index>(fill.size()) != big - d)
    throw NumericError("naimark_dilate: complement rank " + std::to_string(fill.size()) +
                       " != " + std::to_string(big - d));

  ComplexMatrix v(big, big);
  std::size_t next = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    v.col(j * n) = isometry.col(j);
    for (Eigen::Index a = 1; a < n; ++a) v.col(j * n + a) = solver.eigenvectors().col(fill[next++]);
  }
  return v;
}

POVM pgm(const std::vector<DensityMatrix>& states, const std::vector<double>& priors) {
  if (states.empty() || states.size() != priors.size())
    throw ValidityError("pgm: states / priors size mismatch");
  const auto tol = tolerances();
  double prior_sum = 0.0;
  for (double p : priors) {
    if (p < 0.0) throw ValidityError("pgm: negative prior");
    prior_sum += p;
  }
  if (std::abs(prior_sum - 1.0) > tol.probability) throw ValidityError("pgm: priors do not sum to 1");

  const auto d = static_cast<Eigen::Index>(states.front().dim());
  ComplexMatrix avg = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != states.front().dim()) throw ValidityError("pgm: dimension mismatch");
    avg += priors[i] * states[i].matrix();
  }
  const auto solver = hermitian_eig(avg);
  Eigen::VectorXd inv_root = solver.eigenvalues();
  for (Eigen::Index i = 0; i < inv_root.size(); ++i)
    inv_root(i) = inv_root(i) < tol.pgm_support ? 0.0 : 1.0 / std::sqrt(inv_root(i));
  const auto& u = solver.eigenvectors();
  const ComplexMatrix s_inv_root = u * inv_root.cast<Complex>().asDiagonal() * u.adjoint();

  std::vector<Outcome> labels;
  std::vector<ComplexMatrix> elements;
  ComplexMatrix residual = ComplexMatrix::Identity(d, d);
  for (std::size_t i = 0; i < states.size(); ++i) {
    ComplexMatrix m = hermitian_part(s_inv_root * (priors[i] * states[i].matrix()) * s_inv_root);
    residual -= m;
    labels.push_back(static_cast<Outcome>(i));
    elements.push_back(std::move(m));
  }
  labels.push_back(kBottom);
  elements.push_back(hermitian_part(residual));
  return POVM(std::move(labels), std::move(elements));
}

namespace {

RowMajorMatrix coefficients(const ComplexVector& v, std::size_t dim_x, std::size_t dim_y) {
  if (static_cast<std::size_t>(v.size()) != dim_x * dim_y)
    throw LayoutError("uhlmann: vector length != dim_x * dim_y");
  return Eigen::Map<const RowMajorMatrix>(v.data(), static_cast<Eigen::Index>(dim_x),
                                          static_cast<Eigen::Index>(dim_y));
}

}  // namespace

double uhlmann_max_overlap(const ComplexVector& a, const ComplexVector& b, std::size_t dim_x,
                           std::size_t dim_y) {
  const ComplexMatrix cross = coefficients(b, dim_x, dim_y).adjoint() * coefficients(a, dim_x, dim_y);
  Eigen::JacobiSVD<ComplexMatrix> svd(cross);
  return svd.singularValues().sum();
}

ComplexMatrix uhlmann_optimal_unitary(const ComplexVector& a, const ComplexVector& b,
                                      std::size_t dim_x, std::size_t dim_y) {
  // <b|(I (x) U)|a> = Tr(B^dagger A U^T); with B^dagger A = P S Q^dagger the
  // choice U^T = Q P^dagger gives Tr S.
  const ComplexMatrix cross = coefficients(b, dim_x, dim_y).adjoint() * coefficients(a, dim_x, dim_y);
  Eigen::JacobiSVD<ComplexMatrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix w = svd.matrixV() * svd.matrixU().adjoint();
  return w.transpose();
}

ComplexVector random_state(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  ComplexVector v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

DensityMatrix random_density_matrix(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(hermitian_part(rho));
}

ComplexMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    const Complex diag = r(i, i);
    q.col(i) *= std::abs(diag) > 0 ? diag / std::abs(diag) : Complex(1.0);
  }
  return q;
}

}  // namespace qcl::qla
