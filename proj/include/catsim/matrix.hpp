#pragma once

// Dense complex square matrices over N-spin product spaces (dimension 2^N).

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace catsim {

using cplx = std::complex<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Row-major dense complex matrix whose dimension is a power of two.
class ComplexMatrix {
 public:
  ComplexMatrix() : ComplexMatrix(1) {}
  /// Zero matrix. Throws DimensionError unless dim is a power of two.
  explicit ComplexMatrix(std::size_t dim);
  /// Takes ownership of row-major entries; entries.size() must be dim*dim.
  ComplexMatrix(std::size_t dim, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const cplx> diag);
  static ComplexMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  /// log2(dim)
  std::size_t num_spins() const noexcept;

  cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * dim_ + c]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> row(std::size_t r) noexcept { return {data_.data() + r * dim_, dim_}; }
  std::span<const cplx> row(std::size_t r) const noexcept { return {data_.data() + r * dim_, dim_}; }

  ComplexMatrix adjoint() const;
  cplx trace() const noexcept;
  double frobenius_norm() const noexcept;
  /// max |M - M^dagger|
  double hermiticity_error() const noexcept;
  bool is_hermitian(double tol) const noexcept { return hermiticity_error() <= tol; }
  double max_abs() const noexcept;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s) noexcept;

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  /// Matrix product through the dispatched GEMM kernel.
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t dim_;
  std::vector<cplx> data_;
};

/// max_{r,c} |a(r,c) - b(r,c)|; dimensions must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// U * M * U^dagger
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& m);

/// Tr(A B) without forming the product.
cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix (only the lower triangle is read).
HermitianEigen hermitian_eigen(const ComplexMatrix& h);

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);

}  // namespace catsim
