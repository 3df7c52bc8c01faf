#include "catsim/matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>

#include "catsim/kernels.hpp"

namespace catsim {

namespace {

using RowMajorXcd = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_power_of_two(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw DimensionError("matrix dimension " + std::to_string(dim) + " is not a power of two");
  }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim) {
  require_power_of_two(dim);
  data_.assign(dim * dim, cplx{});
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<cplx> entries)
    : dim_(dim), data_(std::move(entries)) {
  require_power_of_two(dim);
  if (data_.size() != dim * dim) throw DimensionError("entry count does not match dim*dim");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

std::size_t ComplexMatrix::num_spins() const noexcept {
  return static_cast<std::size_t>(std::countr_zero(dim_));
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

cplx ComplexMatrix::trace() const noexcept {
  cplx t{};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::hermiticity_error() const noexcept {
  double e = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      e = std::max(e, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return e;
}

double ComplexMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) noexcept {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  ComplexMatrix c(a.dim());
  kernels::cgemm(a.dim(), a.data().data(), b.data().data(), c.data().data());
  return c;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  double m = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m) {
  return (u * m) * u.adjoint();
}

cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  cplx t{};
  const std::size_t n = a.dim();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) t += a(r, c) * b(c, r);
  return t;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  Eigen::Map<const RowMajorXcd> map(h.data().data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(map.cast<cplx>(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  HermitianEigen out{std::vector<double>(h.dim()), ComplexMatrix(h.dim())};
  for (Eigen::Index i = 0; i < n; ++i) out.values[i] = solver.eigenvalues()(i);
  const auto& v = solver.eigenvectors();
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out.vectors(r, c) = v(r, c);
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  Eigen::Map<const RowMajorXcd> map(h.data().data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(map.cast<cplx>(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
  std::vector<double> vals(h.dim());
  for (Eigen::Index i = 0; i < n; ++i) vals[i] = solver.eigenvalues()(i);
  return vals;
}

}  // namespace catsim
