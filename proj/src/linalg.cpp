#include "budgetlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace budgetlab {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) throw DomainError("ComplexMatrix: entry count does not match shape");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DomainError("ComplexMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const cplx> v) {
  ComplexMatrix m(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  return m;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix out(*this);
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::hermiticity_defect() const {
  if (!square()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r; c < cols_; ++c)
      worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return worst;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw DomainError("matrix sum: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw DomainError("matrix difference: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matrix product: inner dimensions differ");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

// ---------------------------------------------------------------------------

DimensionProfile::DimensionProfile(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DomainError("dimension profile must be nonempty");
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] < 2) throw DomainError("every subsystem dimension must be >= 2");
    if (k > 0 && dims_[k] < dims_[k - 1])
      throw DomainError("subsystem dimensions must be listed in ascending order");
    total_ *= dims_[k];
  }
}

DimensionProfile DimensionProfile::parse(const std::string& text) {
  std::vector<std::size_t> dims;
  std::string token;
  auto flush = [&] {
    if (token.empty()) throw DomainError("malformed dimension list '" + text + "'");
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(token, &used);
    } catch (const std::exception&) {
      throw DomainError("malformed dimension list '" + text + "'");
    }
    if (used != token.size()) throw DomainError("malformed dimension list '" + text + "'");
    dims.push_back(v);
    token.clear();
  };
  for (char ch : text) {
    if (ch == ',' || ch == 'x' || ch == 'X') flush();
    else if (ch != ' ') token.push_back(ch);
  }
  flush();
  return DimensionProfile(std::move(dims));
}

bool DimensionProfile::all_equal() const {
  return std::all_of(dims_.begin(), dims_.end(), [&](std::size_t d) { return d == dims_.front(); });
}

bool DimensionProfile::all_qubits() const {
  return std::all_of(dims_.begin(), dims_.end(), [](std::size_t d) { return d == 2; });
}

std::string DimensionProfile::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "," : "") << dims_[k];
  return os.str();
}

// ---------------------------------------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const cplx s = a(ar, ac);
      if (s == cplx{}) continue;
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

namespace {

std::vector<std::size_t> strides_of(const DimensionProfile& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

// Offsets of every multi-index over `subs` inside the full index space.
std::vector<std::size_t> offsets_over(const DimensionProfile& dims, const std::vector<std::size_t>& strides,
                                      const std::vector<std::size_t>& subs) {
  std::vector<std::size_t> offs{0};
  for (std::size_t k : subs) {
    std::vector<std::size_t> next;
    next.reserve(offs.size() * dims[k]);
    for (std::size_t o : offs)
      for (std::size_t digit = 0; digit < dims[k]; ++digit) next.push_back(o + digit * strides[k]);
    offs = std::move(next);
  }
  return offs;
}

void require_square_of(const ComplexMatrix& m, const DimensionProfile& dims, const char* who) {
  if (!m.square() || m.rows() != dims.total())
    throw DomainError(std::string(who) + ": matrix is not D x D for the dimension profile");
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, const DimensionProfile& dims,
                            std::span<const std::size_t> keep) {
  require_square_of(m, dims, "partial_trace");
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size()) throw DomainError("partial_trace: subsystem index out of range");
    kept[k] = true;
  }
  std::vector<std::size_t> ks, ts;
  for (std::size_t k = 0; k < dims.size(); ++k) (kept[k] ? ks : ts).push_back(k);
  const auto strides = strides_of(dims);
  const auto offK = offsets_over(dims, strides, ks);
  const auto offT = offsets_over(dims, strides, ts);
  ComplexMatrix out(offK.size(), offK.size());
  for (std::size_t a = 0; a < offK.size(); ++a)
    for (std::size_t b = 0; b < offK.size(); ++b) {
      cplx s = 0.0;
      for (std::size_t t : offT) s += m(offK[a] + t, offK[b] + t);
      out(a, b) = s;
    }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, const DimensionProfile& dims, std::size_t subsystem) {
  require_square_of(m, dims, "partial_transpose");
  if (subsystem >= dims.size()) throw DomainError("partial_transpose: subsystem index out of range");
  const auto strides = strides_of(dims);
  const std::size_t st = strides[subsystem];
  const std::size_t d = dims[subsystem];
  const std::size_t n = m.rows();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t di = (i / st) % d;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t dj = (j / st) % d;
      const std::size_t i2 = i - di * st + dj * st;
      const std::size_t j2 = j - dj * st + di * st;
      out(i2, j2) = m(i, j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

EigenSystem herm_eig(const ComplexMatrix& m, bool want_vectors) {
  if (!m.square()) throw DomainError("herm_eig: matrix is not square");
  const double defect = m.hermiticity_defect();
  if (!(defect <= kHermTol)) throw DomainError("herm_eig: matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  const std::size_t n = m.rows();

  ComplexMatrix a = 0.5 * (m + m.adjoint());
  ComplexMatrix v = want_vectors ? ComplexMatrix::identity(n) : ComplexMatrix{};
  const double scale = a.frobenius_norm();
  const double threshold = 1e-13 * scale;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * std::norm(a(p, q));
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps && scale > 0.0 && off_norm() > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) continue;
        const cplx phase = a(p, q) / mag;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double vartheta = (aqq - app) / (2.0 * mag);
        const double t = (vartheta >= 0.0 ? -1.0 : 1.0) / (std::abs(vartheta) + std::sqrt(vartheta * vartheta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // U restricted to (p,q): [[c, -s e^{i phi}], [s e^{-i phi}, c]]
        const cplx upp = c, upq = -s * phase, uqp = s * std::conj(phase), uqq = c;
        for (std::size_t k = 0; k < n; ++k) {  // A <- A U
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- U^dagger A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        if (want_vectors)
          for (std::size_t k = 0; k < n; ++k) {
            const cplx vkp = v(k, p), vkq = v(k, q);
            v(k, p) = vkp * upp + vkq * uqp;
            v(k, q) = vkp * upq + vkq * uqq;
          }
      }
  }
  if (sweep == kMaxSweeps && off_norm() > threshold) throw NumericalError("herm_eig: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenSystem out;
  out.values.reserve(n);
  for (std::size_t i : order) out.values.push_back(a(i, i).real());
  if (want_vectors) {
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

std::vector<double> herm_eigvals(const ComplexMatrix& m) { return herm_eig(m, false).values; }

std::vector<double> singular_values(const ComplexMatrix& m) {
  auto ev = herm_eigvals(m.adjoint() * m);
  std::vector<double> sv;
  sv.reserve(ev.size());
  for (auto it = ev.rbegin(); it != ev.rend(); ++it) sv.push_back(*it < 0.0 ? 0.0 : std::sqrt(*it));
  return sv;
}

ComplexMatrix mat_power(const ComplexMatrix& m, unsigned n) {
  if (n == 0) throw DomainError("mat_power: exponent must be positive");
  const auto es = herm_eig(m, true);
  constexpr double kPsdTol = 1e-9;
  if (!es.values.empty() && es.values.front() < -kPsdTol)
    throw DomainError("mat_power: matrix has a negative eigenvalue " + std::to_string(es.values.front()));
  const std::size_t dim = m.rows();
  std::vector<double> powered(dim);
  for (std::size_t i = 0; i < dim; ++i) powered[i] = std::pow(std::max(es.values[i], 0.0), static_cast<double>(n));
  ComplexMatrix out(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    if (powered[k] == 0.0) continue;
    for (std::size_t r = 0; r < dim; ++r) {
      const cplx vr = es.vectors(r, k) * powered[k];
      for (std::size_t c = 0; c < dim; ++c) out(r, c) += vr * std::conj(es.vectors(c, k));
    }
  }
  return out;
}

}  // namespace budgetlab
