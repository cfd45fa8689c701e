#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "budgetlab/linalg.hpp"
#include "budgetlab/rng.hpp"

namespace budgetlab {

inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

/// Raised by DensityMatrix::validate.
class ValidationError : public std::runtime_error {
 public:
  enum class Kind { NotSquare, NotHermitian, TraceNotOne, NotPSD, NonFinite };
  ValidationError(Kind kind, std::string what, double detail = 0.0)
      : std::runtime_error(std::move(what)), kind_(kind), detail_(detail) {}
  Kind kind() const { return kind_; }
  /// Minimum eigenvalue for NotPSD, trace for TraceNotOne, defect for NotHermitian.
  double detail() const { return detail_; }

 private:
  Kind kind_;
  double detail_;
};

/// Hermitian, unit-trace, PSD matrix together with its dimension profile.
class DensityMatrix {
 public:
  /// Checks shape, Hermiticity (kHermTol), trace (kTraceTol) and
  /// positivity (min eigenvalue >= -kPsdTol). The stored matrix is the
  /// Hermitian part of the input.
  static DensityMatrix validate(const ComplexMatrix& mat, const DimensionProfile& dims);
  /// Wraps a matrix already known to be a state (shape is still checked).
  static DensityMatrix trusted(ComplexMatrix mat, const DimensionProfile& dims);
  /// |psi><psi| for a (not necessarily normalised) vector.
  static DensityMatrix from_pure(std::span<const cplx> psi, const DimensionProfile& dims);
  static DensityMatrix maximally_mixed(const DimensionProfile& dims);

  const DimensionProfile& dims() const { return dims_; }
  const ComplexMatrix& matrix() const { return mat_; }
  std::size_t dim() const { return mat_.rows(); }

 private:
  DensityMatrix(ComplexMatrix mat, DimensionProfile dims) : mat_(std::move(mat)), dims_(std::move(dims)) {}
  ComplexMatrix mat_;
  DimensionProfile dims_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

double purity(const DensityMatrix& rho);
/// Reduced state of subsystem k.
ComplexMatrix marginal(const DensityMatrix& rho, std::size_t k);
double marginal_purity(const DensityMatrix& rho, std::size_t k);

/// exp(-i pi J_y) in the d-dimensional spin representation, basis ordered
/// m = j, j-1, ..., -j. It is a signed anti-diagonal permutation.
ComplexMatrix spin_flip(std::size_t d);

/// Q = tr(rho rho~), rho~ = U rho* U^dagger with U the tensor product of the
/// local spin flips.
double time_reversal_overlap(const DensityMatrix& rho);
/// Same quantity for a single d-dimensional matrix.
double time_reversal_overlap(const ComplexMatrix& rho);

// ---------------------------------------------------------------------------

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Two-qubit Fano form: rho = (I + r.sigma x I + I x s.sigma + t_ij sigma_i x sigma_j) / 4.
struct FanoComponents {
  Vec3 r{};
  Vec3 s{};
  Mat3 t{};
  Vec3 tsv{};  // singular values of t, descending

  double local_budget() const;
  double nonlocal_budget() const;
};

FanoComponents fano_decompose(const DensityMatrix& rho);
ComplexMatrix fano_reconstruct(const Vec3& r, const Vec3& s, const Mat3& t);

/// Real coefficients x_k = tr(rho P_k) over all non-identity Pauli strings.
/// String k (1 <= k < 4^n) has base-4 digits (I,X,Y,Z) = (0,1,2,3), qubit 0
/// being the most significant digit; coeffs[k-1] holds x_k.
struct PauliSpectrum {
  std::size_t n_qubits = 0;
  std::vector<double> coeffs;

  std::size_t n_p() const { return coeffs.size(); }
  double second_moment() const;  // sum x^2 = 2^n P - 1
  double fourth_moment() const;  // S_4
  double max_abs() const;
  double coeff(const std::string& label) const;
  static std::string label(std::size_t k, std::size_t n_qubits);
};

PauliSpectrum pauli_spectrum(const DensityMatrix& rho);

// ---------------------------------------------------------------------------

/// (mu, alpha) in [0,1] x [0, pi/2].
struct CanonicalParams {
  double mu = 0.0;
  double alpha = 0.0;
};

/// t3 = mu, t1 = -t2 = mu sin(alpha), r3 = mu cos(alpha), s3 = cos(alpha).
DensityMatrix canonical_two_qubit(const CanonicalParams& p);
/// Closed-form spectrum {lambda_1, lambda_2, lambda_3, lambda_4}.
std::array<double, 4> canonical_eigenvalues(const CanonicalParams& p);

// ---------------------------------------------------------------------------
// Named states.

/// (sum_k |kk>)/sqrt(d) on d x d.
DensityMatrix maximally_entangled(std::size_t d);
/// (sum_k |k...k>)/sqrt(d) on d^n.
DensityMatrix ghz(const DimensionProfile& dims);
/// W state on n qubits.
DensityMatrix w_state(std::size_t n_qubits);
/// p |max-ent><max-ent| + (1 - p) I / d^2 on d x d.
DensityMatrix werner(double p, std::size_t d = 2);
/// Same mixture around sum_{k < d_1} |k...k> / sqrt(d_1) for any profile.
DensityMatrix werner(double p, const DimensionProfile& dims);
/// |i_1 ... i_n> computational basis state.
DensityMatrix basis_state(const DimensionProfile& dims, std::span<const std::size_t> digits);
/// diag(p) in the computational basis.
DensityMatrix classical_state(const DimensionProfile& dims, std::span<const double> probabilities);

// ---------------------------------------------------------------------------
// Random ensembles. Every sampler draws only from the generator it is given.

enum class WishartFilter { Any, Npt, PptMixed };

inline constexpr int kWishartRetryLimit = 10000;
inline constexpr double kNptThreshold = 1e-8;
inline constexpr double kMixedPurityCap = 0.999;

std::vector<cplx> haar_vector(std::size_t dim, CounterRng& rng);
DensityMatrix sample_haar_pure(const DimensionProfile& dims, CounterRng& rng);
DensityMatrix sample_product_pure(const DimensionProfile& dims, CounterRng& rng);
/// Diagonal state with Dirichlet(1,...,1) populations.
DensityMatrix sample_classical(const DimensionProfile& dims, CounterRng& rng);
DensityMatrix sample_werner(double p, const DimensionProfile& dims);
/// p ~ U[0,1].
DensityMatrix sample_werner(const DimensionProfile& dims, CounterRng& rng);
/// G G^dagger / tr(G G^dagger) with G a D x rank complex Ginibre matrix.
DensityMatrix sample_ginibre(const DimensionProfile& dims, std::size_t rank, CounterRng& rng);
/// Full-rank Wishart state filtered by negativity across subsystem 0. Throws
/// NumericalError after kWishartRetryLimit rejected draws.
DensityMatrix sample_wishart(const DimensionProfile& dims, CounterRng& rng, WishartFilter filter = WishartFilter::Any);

/// Applies independent Haar-random local unitaries.
DensityMatrix random_local_unitary(const DensityMatrix& rho, CounterRng& rng);
ComplexMatrix haar_unitary(std::size_t d, CounterRng& rng);

enum class Family { PureProduct, Classical, PureEntangled, Werner, WishartNpt, WishartPpt, Wishart };

std::optional<Family> parse_family(const std::string& name);
std::string family_name(Family f);
const std::vector<Family>& methods_families();
DensityMatrix sample_family(Family f, const DimensionProfile& dims, CounterRng& rng);

}  // namespace budgetlab
