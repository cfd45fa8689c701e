#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace budgetlab {

using cplx = std::complex<double>;

/// Thrown when an argument violates a documented precondition (index out of
/// range, wrong dimensions, parameter outside its domain).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a numerical routine cannot deliver its postcondition.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(std::span<const double> diag);
  /// |v><v|
  static ComplexMatrix outer(std::span<const cplx> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  cplx trace() const;
  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;
  double frobenius_norm() const;
  /// max_ij |m_ij - conj(m_ji)|
  double hermiticity_defect() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, cplx s);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest absolute entrywise difference.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Subsystem dimensions d_1 <= ... <= d_n, each >= 2.
class DimensionProfile {
 public:
  DimensionProfile() = default;
  /// Rejects empty profiles, entries < 2 and descending order.
  explicit DimensionProfile(std::vector<std::size_t> dims);
  DimensionProfile(std::initializer_list<std::size_t> dims)
      : DimensionProfile(std::vector<std::size_t>(dims)) {}

  /// Parses "2,3" or "2x3".
  static DimensionProfile parse(const std::string& text);

  std::size_t size() const { return dims_.size(); }
  std::size_t operator[](std::size_t k) const { return dims_[k]; }
  std::size_t total() const { return total_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  bool all_equal() const;
  bool all_qubits() const;
  std::string to_string() const;

  friend bool operator==(const DimensionProfile&, const DimensionProfile&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Reduced matrix over the kept subsystems (0-based, any order; output keeps
/// ascending subsystem order).
ComplexMatrix partial_trace(const ComplexMatrix& m, const DimensionProfile& dims,
                            std::span<const std::size_t> keep);

/// Transpose on one tensor factor.
ComplexMatrix partial_transpose(const ComplexMatrix& m, const DimensionProfile& dims,
                                std::size_t subsystem);

/// Hermiticity tolerance on max |m - m^dagger| (absolute).
inline constexpr double kHermTol = 1e-10;

struct EigenSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns are eigenvectors
};

/// Cyclic Jacobi eigensolver for Hermitian matrices. Input is symmetrised
/// before the sweeps; throws DomainError when the defect exceeds kHermTol.
EigenSystem herm_eig(const ComplexMatrix& m, bool want_vectors = true);
std::vector<double> herm_eigvals(const ComplexMatrix& m);

/// Descending singular values via the eigenvalues of m^dagger m.
std::vector<double> singular_values(const ComplexMatrix& m);

/// m^n for a Hermitian PSD m via its eigendecomposition.
ComplexMatrix mat_power(const ComplexMatrix& m, unsigned n);

}  // namespace budgetlab
