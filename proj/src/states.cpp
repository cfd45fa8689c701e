#include "budgetlab/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "budgetlab/resources.hpp"

namespace budgetlab {

namespace {

void require_shape(const ComplexMatrix& mat, const DimensionProfile& dims) {
  if (!mat.square() || mat.rows() != dims.total())
    throw ValidationError(ValidationError::Kind::NotSquare,
                          "matrix is " + std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()) +
                              " but dims " + dims.to_string() + " need " + std::to_string(dims.total()) + "x" +
                              std::to_string(dims.total()));
}

// Pauli matrices indexed I, X, Y, Z.
const std::array<ComplexMatrix, 4>& paulis() {
  static const std::array<ComplexMatrix, 4> p = {
      ComplexMatrix{{1.0, 0.0}, {0.0, 1.0}},
      ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}},
      ComplexMatrix{{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}},
      ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}},
  };
  return p;
}

// tr(rho P) for the Pauli string with the given per-qubit digits. Each
// factor is monomial: column b has its single entry in row b ^ flip.
double pauli_expectation(const ComplexMatrix& rho, std::size_t n, std::span<const int> digits) {
  std::size_t flip = 0;
  for (std::size_t q = 0; q < n; ++q)
    if (digits[q] == 1 || digits[q] == 2) flip |= std::size_t{1} << (n - 1 - q);
  const std::size_t dim = std::size_t{1} << n;
  cplx acc = 0.0;
  for (std::size_t b = 0; b < dim; ++b) {
    const std::size_t a = b ^ flip;  // P(a, b) is the nonzero entry of column b
    cplx val = 1.0;
    for (std::size_t q = 0; q < n; ++q) {
      const int bit = static_cast<int>((b >> (n - 1 - q)) & 1u);
      switch (digits[q]) {
        case 2: val *= bit ? cplx(0.0, -1.0) : cplx(0.0, 1.0); break;  // Y|0> = i|1>, Y|1> = -i|0>
        case 3: val *= bit ? -1.0 : 1.0; break;
        default: break;
      }
    }
    acc += rho(b, a) * val;  // tr(rho P) = sum_b rho(b, a) P(a, b)
  }
  return acc.real();
}

}  // namespace

DensityMatrix DensityMatrix::validate(const ComplexMatrix& mat, const DimensionProfile& dims) {
  require_shape(mat, dims);
  if (!mat.all_finite()) throw ValidationError(ValidationError::Kind::NonFinite, "matrix has non-finite entries");
  const double defect = mat.hermiticity_defect();
  if (defect > kHermTol)
    throw ValidationError(ValidationError::Kind::NotHermitian,
                          "matrix is not Hermitian (max |m - m^dagger| = " + std::to_string(defect) + ")", defect);
  ComplexMatrix herm = 0.5 * (mat + mat.adjoint());
  const double tr = herm.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw ValidationError(ValidationError::Kind::TraceNotOne, "trace is " + std::to_string(tr) + ", expected 1", tr);
  const auto ev = herm_eigvals(herm);
  if (ev.front() < -kPsdTol)
    throw ValidationError(ValidationError::Kind::NotPSD,
                          "matrix is not positive semidefinite (min eigenvalue " + std::to_string(ev.front()) + ")",
                          ev.front());
  return DensityMatrix(std::move(herm), dims);
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix mat, const DimensionProfile& dims) {
  require_shape(mat, dims);
  return DensityMatrix(std::move(mat), dims);
}

DensityMatrix DensityMatrix::from_pure(std::span<const cplx> psi, const DimensionProfile& dims) {
  if (psi.size() != dims.total()) throw DomainError("from_pure: vector length does not match dims");
  double nrm = 0.0;
  for (const auto& z : psi) nrm += std::norm(z);
  if (!(nrm > 0.0)) throw DomainError("from_pure: zero vector");
  ComplexMatrix m = ComplexMatrix::outer(psi);
  m *= 1.0 / nrm;
  return DensityMatrix(std::move(m), dims);
}

DensityMatrix DensityMatrix::maximally_mixed(const DimensionProfile& dims) {
  ComplexMatrix m = ComplexMatrix::identity(dims.total());
  m *= 1.0 / static_cast<double>(dims.total());
  return DensityMatrix(std::move(m), dims);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<std::size_t> d = a.dims().dims();
  d.insert(d.end(), b.dims().dims().begin(), b.dims().dims().end());
  return DensityMatrix::trusted(kron(a.matrix(), b.matrix()), DimensionProfile(std::move(d)));
}

double purity(const DensityMatrix& rho) {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  double s = 0.0;
  for (const auto& z : rho.matrix().data()) s += std::norm(z);
  return s;
}

ComplexMatrix marginal(const DensityMatrix& rho, std::size_t k) {
  if (k >= rho.dims().size()) throw DomainError("subsystem index out of range");
  const std::size_t keep[] = {k};
  return partial_trace(rho.matrix(), rho.dims(), keep);
}

double marginal_purity(const DensityMatrix& rho, std::size_t k) {
  const auto m = marginal(rho, k);
  double s = 0.0;
  for (const auto& z : m.data()) s += std::norm(z);
  return s;
}

ComplexMatrix spin_flip(std::size_t d) {
  ComplexMatrix u(d, d);
  for (std::size_t b = 0; b < d; ++b) u(d - 1 - b, b) = (b % 2 == 0) ? 1.0 : -1.0;
  return u;
}

namespace {

// Full-system spin flip as a signed permutation: U|b> = sign[b] |perm[b]>.
struct SignedPermutation {
  std::vector<std::size_t> perm;
  std::vector<double> sign;
};

SignedPermutation global_flip(const std::vector<std::size_t>& dims) {
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  SignedPermutation sp{std::vector<std::size_t>(total), std::vector<double>(total)};
  for (std::size_t b = 0; b < total; ++b) {
    std::size_t rest = b, stride = 1, image = 0;
    double sign = 1.0;
    for (std::size_t k = dims.size(); k-- > 0;) {
      const std::size_t digit = rest % dims[k];
      rest /= dims[k];
      image += (dims[k] - 1 - digit) * stride;
      if (digit % 2) sign = -sign;
      stride *= dims[k];
    }
    sp.perm[b] = image;
    sp.sign[b] = sign;
  }
  return sp;
}

double overlap_with_flip(const ComplexMatrix& rho, const SignedPermutation& sp) {
  // rho~(perm a, perm b) = sign a sign b conj(rho(a, b)); Q = sum_xy rho(x,y) rho~(y,x)
  const std::size_t n = rho.rows();
  double q = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      q += sp.sign[a] * sp.sign[b] * (rho(sp.perm[b], sp.perm[a]) * std::conj(rho(a, b))).real();
  return q;
}

}  // namespace

double time_reversal_overlap(const DensityMatrix& rho) {
  return overlap_with_flip(rho.matrix(), global_flip(rho.dims().dims()));
}

double time_reversal_overlap(const ComplexMatrix& rho) {
  if (!rho.square()) throw DomainError("time_reversal_overlap: matrix is not square");
  return overlap_with_flip(rho, global_flip({rho.rows()}));
}

// ---------------------------------------------------------------------------

double FanoComponents::local_budget() const {
  double s2 = 0.0;
  for (int i = 0; i < 3; ++i) s2 += r[i] * r[i] + s[i] * s[i];
  return s2;
}

double FanoComponents::nonlocal_budget() const {
  double s2 = 0.0;
  for (const auto& row : t)
    for (double v : row) s2 += v * v;
  return s2;
}

FanoComponents fano_decompose(const DensityMatrix& rho) {
  if (rho.dims() != DimensionProfile{2, 2}) throw DomainError("fano_decompose: requires a two-qubit state");
  FanoComponents f;
  const auto& m = rho.matrix();
  for (int i = 1; i <= 3; ++i) {
    const int di[] = {i, 0};
    const int dj[] = {0, i};
    f.r[i - 1] = pauli_expectation(m, 2, di);
    f.s[i - 1] = pauli_expectation(m, 2, dj);
    for (int j = 1; j <= 3; ++j) {
      const int dij[] = {i, j};
      f.t[i - 1][j - 1] = pauli_expectation(m, 2, dij);
    }
  }
  ComplexMatrix tm(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tm(i, j) = f.t[i][j];
  const auto sv = singular_values(tm);
  std::copy(sv.begin(), sv.end(), f.tsv.begin());
  return f;
}

ComplexMatrix fano_reconstruct(const Vec3& r, const Vec3& s, const Mat3& t) {
  const auto& p = paulis();
  ComplexMatrix m = kron(p[0], p[0]);
  for (int i = 0; i < 3; ++i) {
    m += r[i] * kron(p[i + 1], p[0]);
    m += s[i] * kron(p[0], p[i + 1]);
    for (int j = 0; j < 3; ++j)
      if (t[i][j] != 0.0) m += t[i][j] * kron(p[i + 1], p[j + 1]);
  }
  m *= 0.25;
  return m;
}

double PauliSpectrum::second_moment() const {
  double s = 0.0;
  for (double x : coeffs) s += x * x;
  return s;
}

double PauliSpectrum::fourth_moment() const {
  double s = 0.0;
  for (double x : coeffs) s += x * x * x * x;
  return s;
}

double PauliSpectrum::max_abs() const {
  double m = 0.0;
  for (double x : coeffs) m = std::max(m, std::abs(x));
  return m;
}

std::string PauliSpectrum::label(std::size_t k, std::size_t n_qubits) {
  static constexpr char kNames[] = {'I', 'X', 'Y', 'Z'};
  std::string s(n_qubits, 'I');
  for (std::size_t q = n_qubits; q-- > 0;) {
    s[q] = kNames[k % 4];
    k /= 4;
  }
  return s;
}

double PauliSpectrum::coeff(const std::string& label) const {
  if (label.size() != n_qubits) throw DomainError("Pauli label length does not match qubit count");
  std::size_t k = 0;
  for (char c : label) {
    const auto pos = std::string_view("IXYZ").find(c);
    if (pos == std::string_view::npos) throw DomainError("bad Pauli label '" + label + "'");
    k = 4 * k + pos;
  }
  if (k == 0) return 1.0;
  return coeffs[k - 1];
}

PauliSpectrum pauli_spectrum(const DensityMatrix& rho) {
  if (!rho.dims().all_qubits()) throw DomainError("pauli_spectrum: requires qubit subsystems");
  const std::size_t n = rho.dims().size();
  const std::size_t count = std::size_t{1} << (2 * n);
  PauliSpectrum spec;
  spec.n_qubits = n;
  spec.coeffs.resize(count - 1);
  std::vector<int> digits(n);
  for (std::size_t k = 1; k < count; ++k) {
    std::size_t rest = k;
    for (std::size_t q = n; q-- > 0;) {
      digits[q] = static_cast<int>(rest % 4);
      rest /= 4;
    }
    spec.coeffs[k - 1] = pauli_expectation(rho.matrix(), n, digits);
  }
  return spec;
}

// ---------------------------------------------------------------------------

namespace {
void check_canonical(const CanonicalParams& p) {
  if (!(p.mu >= 0.0 && p.mu <= 1.0) || !(p.alpha >= 0.0 && p.alpha <= std::numbers::pi / 2 + 1e-15))
    throw DomainError("canonical parameters outside [0,1] x [0, pi/2]");
}
}  // namespace

DensityMatrix canonical_two_qubit(const CanonicalParams& p) {
  check_canonical(p);
  const double sa = std::sin(p.alpha), ca = std::cos(p.alpha);
  const Vec3 r{0.0, 0.0, p.mu * ca};
  const Vec3 s{0.0, 0.0, ca};
  Mat3 t{};
  t[0][0] = p.mu * sa;
  t[1][1] = -p.mu * sa;
  t[2][2] = p.mu;
  return DensityMatrix::trusted(fano_reconstruct(r, s, t), DimensionProfile{2, 2});
}

std::array<double, 4> canonical_eigenvalues(const CanonicalParams& p) {
  check_canonical(p);
  const double sa = std::sin(p.alpha), ca = std::cos(p.alpha);
  const double t1 = p.mu * sa, t2 = -p.mu * sa, t3 = p.mu, r3 = p.mu * ca, s3 = ca;
  const double dplus = std::hypot(r3 + s3, t1 - t2);
  const double dminus = std::hypot(r3 - s3, t1 + t2);
  return {(1 + t3 + dplus) / 4, (1 + t3 - dplus) / 4, (1 - t3 + dminus) / 4, (1 - t3 - dminus) / 4};
}

// ---------------------------------------------------------------------------

DensityMatrix maximally_entangled(std::size_t d) {
  std::vector<cplx> psi(d * d);
  for (std::size_t k = 0; k < d; ++k) psi[k * d + k] = 1.0;
  return DensityMatrix::from_pure(psi, DimensionProfile{d, d});
}

DensityMatrix ghz(const DimensionProfile& dims) {
  if (!dims.all_equal()) throw DomainError("ghz: requires equal subsystem dimensions");
  const std::size_t d = dims[0];
  std::vector<cplx> psi(dims.total());
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < dims.size(); ++j) idx = idx * d + k;
    psi[idx] = 1.0;
  }
  return DensityMatrix::from_pure(psi, dims);
}

DensityMatrix w_state(std::size_t n_qubits) {
  if (n_qubits < 2) throw DomainError("w_state: needs at least two qubits");
  std::vector<cplx> psi(std::size_t{1} << n_qubits);
  for (std::size_t q = 0; q < n_qubits; ++q) psi[std::size_t{1} << q] = 1.0;
  return DensityMatrix::from_pure(psi, DimensionProfile(std::vector<std::size_t>(n_qubits, 2)));
}

DensityMatrix werner(double p, std::size_t d) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("werner: p must lie in [0,1]");
  const auto bell = maximally_entangled(d);
  ComplexMatrix m = p * bell.matrix();
  m += ((1.0 - p) / static_cast<double>(d * d)) * ComplexMatrix::identity(d * d);
  return DensityMatrix::trusted(std::move(m), bell.dims());
}

DensityMatrix basis_state(const DimensionProfile& dims, std::span<const std::size_t> digits) {
  if (digits.size() != dims.size()) throw DomainError("basis_state: one digit per subsystem required");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (digits[k] >= dims[k]) throw DomainError("basis_state: digit out of range");
    idx = idx * dims[k] + digits[k];
  }
  ComplexMatrix m(dims.total(), dims.total());
  m(idx, idx) = 1.0;
  return DensityMatrix::trusted(std::move(m), dims);
}

DensityMatrix classical_state(const DimensionProfile& dims, std::span<const double> probabilities) {
  if (probabilities.size() != dims.total()) throw DomainError("classical_state: need D probabilities");
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw DomainError("classical_state: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kTraceTol) throw DomainError("classical_state: probabilities do not sum to 1");
  return DensityMatrix::trusted(ComplexMatrix::diagonal(probabilities), dims);
}

// ---------------------------------------------------------------------------

std::vector<cplx> haar_vector(std::size_t dim, CounterRng& rng) {
  std::vector<cplx> v(dim);
  double nrm = 0.0;
  for (auto& z : v) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = {re, im};
    nrm += re * re + im * im;
  }
  const double inv = 1.0 / std::sqrt(nrm);
  for (auto& z : v) z *= inv;
  return v;
}

DensityMatrix sample_haar_pure(const DimensionProfile& dims, CounterRng& rng) {
  return DensityMatrix::from_pure(haar_vector(dims.total(), rng), dims);
}

DensityMatrix sample_product_pure(const DimensionProfile& dims, CounterRng& rng) {
  std::vector<cplx> psi{1.0};
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const auto local = haar_vector(dims[k], rng);
    std::vector<cplx> next(psi.size() * local.size());
    for (std::size_t a = 0; a < psi.size(); ++a)
      for (std::size_t b = 0; b < local.size(); ++b) next[a * local.size() + b] = psi[a] * local[b];
    psi = std::move(next);
  }
  return DensityMatrix::from_pure(psi, dims);
}

DensityMatrix sample_classical(const DimensionProfile& dims, CounterRng& rng) {
  std::vector<double> p(dims.total());
  double sum = 0.0;
  for (auto& x : p) sum += (x = rng.exponential());
  for (auto& x : p) x /= sum;
  return DensityMatrix::trusted(ComplexMatrix::diagonal(p), dims);
}

DensityMatrix werner(double p, const DimensionProfile& dims) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("werner: p must lie in [0,1]");
  // white noise around sum_{k < d_1} |k...k> / sqrt(d_1)
  const std::size_t n = dims.total();
  std::vector<cplx> psi(n);
  for (std::size_t k = 0; k < dims[0]; ++k) {
    std::size_t idx = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) idx = idx * dims[s] + k;
    psi[idx] = 1.0;
  }
  ComplexMatrix m = p * DensityMatrix::from_pure(psi, dims).matrix();
  m += ((1.0 - p) / static_cast<double>(n)) * ComplexMatrix::identity(n);
  return DensityMatrix::trusted(std::move(m), dims);
}

DensityMatrix sample_werner(double p, const DimensionProfile& dims) { return werner(p, dims); }

DensityMatrix sample_werner(const DimensionProfile& dims, CounterRng& rng) { return sample_werner(rng.uniform(), dims); }

DensityMatrix sample_ginibre(const DimensionProfile& dims, std::size_t rank, CounterRng& rng) {
  const std::size_t n = dims.total();
  if (rank == 0 || rank > n) throw DomainError("sample_ginibre: rank must lie in [1, D]");
  ComplexMatrix g(n, rank);
  for (auto& z : g.data()) z = {rng.normal(), rng.normal()};
  ComplexMatrix w = g * g.adjoint();
  w *= 1.0 / w.trace().real();
  // g g^dagger is Hermitian up to rounding in the products
  w = 0.5 * (w + w.adjoint());
  return DensityMatrix::trusted(std::move(w), dims);
}

DensityMatrix sample_wishart(const DimensionProfile& dims, CounterRng& rng, WishartFilter filter) {
  for (int attempt = 0; attempt < kWishartRetryLimit; ++attempt) {
    auto rho = sample_ginibre(dims, dims.total(), rng);
    if (filter == WishartFilter::Any) return rho;
    const double neg = negativity(rho, 0);
    if (filter == WishartFilter::Npt && neg > kNptThreshold) return rho;
    if (filter == WishartFilter::PptMixed && neg < kNptThreshold && purity(rho) < kMixedPurityCap) return rho;
  }
  throw NumericalError("sample_wishart: filter not satisfied after " + std::to_string(kWishartRetryLimit) + " draws");
}

ComplexMatrix haar_unitary(std::size_t d, CounterRng& rng) {
  // Gram-Schmidt on a Ginibre matrix gives the Haar measure (R has positive diagonal).
  ComplexMatrix u(d, d);
  for (auto& z : u.data()) z = {rng.normal(), rng.normal()};
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      cplx proj = 0.0;
      for (std::size_t r = 0; r < d; ++r) proj += std::conj(u(r, prev)) * u(r, c);
      for (std::size_t r = 0; r < d; ++r) u(r, c) -= proj * u(r, prev);
    }
    double nrm = 0.0;
    for (std::size_t r = 0; r < d; ++r) nrm += std::norm(u(r, c));
    nrm = std::sqrt(nrm);
    for (std::size_t r = 0; r < d; ++r) u(r, c) /= nrm;
  }
  return u;
}

DensityMatrix random_local_unitary(const DensityMatrix& rho, CounterRng& rng) {
  ComplexMatrix u = haar_unitary(rho.dims()[0], rng);
  for (std::size_t k = 1; k < rho.dims().size(); ++k) u = kron(u, haar_unitary(rho.dims()[k], rng));
  ComplexMatrix out = u * rho.matrix() * u.adjoint();
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix::trusted(std::move(out), rho.dims());
}

std::optional<Family> parse_family(const std::string& name) {
  if (name == "pure-product") return Family::PureProduct;
  if (name == "classical") return Family::Classical;
  if (name == "pure-entangled") return Family::PureEntangled;
  if (name == "werner") return Family::Werner;
  if (name == "wishart-npt") return Family::WishartNpt;
  if (name == "wishart-ppt") return Family::WishartPpt;
  if (name == "wishart") return Family::Wishart;
  return std::nullopt;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::PureProduct: return "pure-product";
    case Family::Classical: return "classical";
    case Family::PureEntangled: return "pure-entangled";
    case Family::Werner: return "werner";
    case Family::WishartNpt: return "wishart-npt";
    case Family::WishartPpt: return "wishart-ppt";
    case Family::Wishart: return "wishart";
  }
  return "?";
}

const std::vector<Family>& methods_families() {
  static const std::vector<Family> f = {Family::PureProduct, Family::Classical,  Family::PureEntangled,
                                        Family::Werner,      Family::WishartNpt, Family::WishartPpt};
  return f;
}

DensityMatrix sample_family(Family f, const DimensionProfile& dims, CounterRng& rng) {
  switch (f) {
    case Family::PureProduct: return sample_product_pure(dims, rng);
    case Family::Classical: return sample_classical(dims, rng);
    case Family::PureEntangled: return sample_haar_pure(dims, rng);
    case Family::Werner: return sample_werner(dims, rng);
    case Family::WishartNpt: return sample_wishart(dims, rng, WishartFilter::Npt);
    case Family::WishartPpt: return sample_wishart(dims, rng, WishartFilter::PptMixed);
    case Family::Wishart: return sample_wishart(dims, rng, WishartFilter::Any);
  }
  throw DomainError("unknown family");
}

}  // namespace budgetlab
