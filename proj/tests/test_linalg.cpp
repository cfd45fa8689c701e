#include <cmath>

#include "budgetlab/linalg.hpp"
#include "budgetlab/rng.hpp"
#include "doctest.h"

using namespace budgetlab;

namespace {

ComplexMatrix random_matrix(std::size_t r, std::size_t c, CounterRng& rng) {
  ComplexMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
  return m;
}

ComplexMatrix random_hermitian(std::size_t d, CounterRng& rng) {
  auto g = random_matrix(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

const ComplexMatrix kZ{{1.0, 0.0}, {0.0, -1.0}};

ComplexMatrix bell() {
  ComplexMatrix b(4, 4);
  b(0, 0) = b(0, 3) = b(3, 0) = b(3, 3) = 0.5;
  return b;
}

}  // namespace

TEST_CASE("kron basics") {
  CHECK(max_abs_diff(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4)) == 0.0);
  const double zz[] = {1, -1, -1, 1};
  CHECK(max_abs_diff(kron(kZ, kZ), ComplexMatrix::diagonal(zz)) == 0.0);
  CHECK(max_abs_diff(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(3)), ComplexMatrix::identity(6)) == 0.0);
  const auto k = kron(ComplexMatrix(2, 3), ComplexMatrix(4, 5));
  CHECK(k.rows() == 8);
  CHECK(k.cols() == 15);
}

TEST_CASE("kron associativity and mixed product") {
  CounterRng rng(11, 0);
  for (int rep = 0; rep < 5; ++rep) {
    auto a = random_matrix(2, 2, rng), b = random_matrix(3, 3, rng), c = random_matrix(2, 2, rng);
    auto d = random_matrix(3, 3, rng);
    CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) < 1e-12);
    CHECK(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)) < 1e-12);
  }
}

TEST_CASE("partial trace") {
  const DimensionProfile d22{2, 2};
  const std::size_t keep0[] = {0};
  CHECK(max_abs_diff(partial_trace(bell(), d22, keep0), 0.5 * ComplexMatrix::identity(2)) < 1e-15);

  CounterRng rng(12, 0);
  auto a = random_hermitian(2, rng), b = random_hermitian(3, rng);
  b *= 1.0 / b.trace();
  const DimensionProfile d23{2, 3};
  CHECK(max_abs_diff(partial_trace(kron(a, b), d23, keep0), a) < 1e-12);

  // |00><00| on 2x3 keeping the qutrit
  ComplexMatrix p(6, 6);
  p(0, 0) = 1.0;
  const std::size_t keep1[] = {1};
  ComplexMatrix expect(3, 3);
  expect(0, 0) = 1.0;
  CHECK(max_abs_diff(partial_trace(p, d23, keep1), expect) == 0.0);

  auto m = random_matrix(12, 12, rng);
  const DimensionProfile d223{2, 2, 3};
  const auto full = partial_trace(m, d223, {});
  REQUIRE(full.rows() == 1);
  CHECK(std::abs(full(0, 0) - m.trace()) < 1e-12);

  const std::size_t bad[] = {3};
  CHECK_THROWS_AS(partial_trace(m, d223, bad), DomainError);
}

TEST_CASE("partial transpose") {
  const DimensionProfile d22{2, 2};
  const auto ev = herm_eigvals(partial_transpose(bell(), d22, 0));
  CHECK(ev[0] == doctest::Approx(-0.5).epsilon(1e-14));
  for (int k = 1; k < 4; ++k) CHECK(ev[k] == doctest::Approx(0.5).epsilon(1e-14));

  CounterRng rng(13, 0);
  auto m = random_matrix(6, 6, rng);
  const DimensionProfile d23{2, 3};
  for (std::size_t s = 0; s < 2; ++s) {
    auto pt = partial_transpose(m, d23, s);
    CHECK(max_abs_diff(partial_transpose(pt, d23, s), m) == 0.0);
    CHECK(std::abs(pt.trace() - m.trace()) < 1e-12);
    CHECK(pt.frobenius_norm() == doctest::Approx(m.frobenius_norm()).epsilon(1e-14));
  }
  const double diag[] = {0.1, 0.2, 0.3, 0.4};
  const auto dm = ComplexMatrix::diagonal(diag);
  CHECK(max_abs_diff(partial_transpose(dm, d22, 1), dm) == 0.0);
  CHECK_THROWS_AS(partial_transpose(dm, d22, 2), DomainError);
}

TEST_CASE("hermitian eigensolver") {
  auto ev = herm_eigvals(0.25 * ComplexMatrix::identity(4));
  for (double v : ev) CHECK(v == doctest::Approx(0.25));
  const double d[] = {0.7, 0.3};
  ev = herm_eigvals(ComplexMatrix::diagonal(d));
  CHECK(ev[0] == doctest::Approx(0.3));
  CHECK(ev[1] == doctest::Approx(0.7));

  CounterRng rng(14, 0);
  for (std::size_t n : {2u, 3u, 4u, 9u, 16u, 27u}) {
    const auto h = random_hermitian(n, rng);
    const auto es = herm_eig(h);
    double s1 = 0.0, s2 = 0.0;
    for (double v : es.values) {
      s1 += v;
      s2 += v * v;
    }
    CHECK(s1 == doctest::Approx(h.trace().real()).epsilon(1e-10));
    CHECK(s2 == doctest::Approx((h * h).trace().real()).epsilon(1e-10));
    for (std::size_t k = 1; k < n; ++k) CHECK(es.values[k - 1] <= es.values[k]);
    ComplexMatrix lam(n, n);
    for (std::size_t k = 0; k < n; ++k) lam(k, k) = es.values[k];
    const auto rec = es.vectors * lam * es.vectors.adjoint();
    CHECK(max_abs_diff(rec, h) <= 1e-10 * h.frobenius_norm());
  }
  ComplexMatrix nh(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(herm_eig(nh), DomainError);
}

TEST_CASE("singular values") {
  const double d[] = {1, -1, 1};
  auto sv = singular_values(ComplexMatrix::diagonal(d));
  for (double v : sv) CHECK(v == doctest::Approx(1.0));
  const double r1[] = {1, 0, 0};
  sv = singular_values(ComplexMatrix::diagonal(r1));
  CHECK(sv[0] == doctest::Approx(1.0));
  CHECK(sv[1] == 0.0);
  sv = singular_values(ComplexMatrix(3, 3));
  for (double v : sv) CHECK(v == 0.0);

  CounterRng rng(15, 0);
  ComplexMatrix t(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) t(i, j) = rng.normal();
  const auto a = singular_values(t), b = singular_values(t.transpose());
  double ss = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
    ss += a[k] * a[k];
  }
  CHECK(ss == doctest::Approx(t.frobenius_norm() * t.frobenius_norm()).epsilon(1e-12));
}

TEST_CASE("matrix powers") {
  CHECK(max_abs_diff(mat_power(0.5 * ComplexMatrix::identity(2), 2), 0.25 * ComplexMatrix::identity(2)) < 1e-15);
  CHECK(max_abs_diff(mat_power(bell(), 5), bell()) < 1e-14);
  const double d[] = {0.6, 0.4};
  const double cube[] = {0.216, 0.064};
  CHECK(max_abs_diff(mat_power(ComplexMatrix::diagonal(d), 3), ComplexMatrix::diagonal(cube)) < 1e-15);
  const double neg[] = {0.6, -0.1};
  CHECK_THROWS_AS(mat_power(ComplexMatrix::diagonal(neg), 2), DomainError);
}

TEST_CASE("dimension profiles") {
  CHECK(DimensionProfile::parse("2,3").total() == 6);
  CHECK(DimensionProfile::parse("2x2x2") == DimensionProfile{2, 2, 2});
  CHECK_THROWS_AS(DimensionProfile::parse("3,2"), DomainError);
  CHECK_THROWS_AS(DimensionProfile::parse("1,2"), DomainError);
  CHECK_THROWS_AS(DimensionProfile::parse(""), DomainError);
  CHECK(DimensionProfile{3, 3}.all_equal());
  CHECK_FALSE(DimensionProfile{2, 3}.all_qubits());
}
