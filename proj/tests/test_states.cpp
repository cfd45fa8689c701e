#include <cmath>
#include <numbers>

#include "budgetlab/budget.hpp"
#include "budgetlab/resources.hpp"
#include "budgetlab/states.hpp"
#include "doctest.h"

using namespace budgetlab;

namespace {

const DimensionProfile k22{2, 2};

// exp(-i pi J_y) built from the ladder operators, independent of spin_flip().
ComplexMatrix rotation_oracle(std::size_t d) {
  const double j = (static_cast<double>(d) - 1.0) / 2.0;
  ComplexMatrix jp(d, d);
  for (std::size_t b = 1; b < d; ++b) {
    const double m = j - static_cast<double>(b);  // |m> -> |m+1>, row b-1
    jp(b - 1, b) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const ComplexMatrix jy = cplx(0.0, -0.5) * (jp - jp.adjoint());
  const auto es = herm_eig(jy);
  ComplexMatrix u(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const cplx w = std::polar(1.0, -std::numbers::pi * es.values[k]);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) u(a, b) += w * es.vectors(a, k) * std::conj(es.vectors(b, k));
  }
  return u;
}

double two_qubit_Q_oracle(const DensityMatrix& rho) {
  const ComplexMatrix sy{{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}};
  const auto yy = kron(sy, sy);
  return (rho.matrix() * (yy * rho.matrix().conj() * yy)).trace().real();
}

}  // namespace

TEST_CASE("spin flip matches the rotation by pi about y") {
  for (std::size_t d = 2; d <= 7; ++d) CHECK(max_abs_diff(spin_flip(d), rotation_oracle(d)) < 1e-10);
}

TEST_CASE("validation") {
  CHECK(purity(DensityMatrix::validate(0.25 * ComplexMatrix::identity(4), k22)) == doctest::Approx(0.25));
  const double bad[] = {0.6, 0.6, -0.1, -0.1};
  try {
    DensityMatrix::validate(ComplexMatrix::diagonal(bad), k22);
    FAIL("expected NotPSD");
  } catch (const ValidationError& e) {
    CHECK(e.kind() == ValidationError::Kind::NotPSD);
    CHECK(e.detail() == doctest::Approx(-0.1));
  }
  CHECK(purity(maximally_entangled(2)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(DensityMatrix::validate(ComplexMatrix::identity(4), k22), ValidationError);
  ComplexMatrix nh = 0.25 * ComplexMatrix::identity(4);
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix::validate(nh, k22), ValidationError);
  CHECK_THROWS_AS(DensityMatrix::validate(ComplexMatrix::identity(3), k22), ValidationError);
}

TEST_CASE("purities") {
  CHECK(purity(DensityMatrix::maximally_mixed(k22)) == doctest::Approx(0.25));
  for (double p : {0.0, 0.3, 0.8, 1.0}) CHECK(purity(werner(p)) == doctest::Approx((1 + 3 * p * p) / 4).epsilon(1e-14));
  CHECK(marginal_purity(maximally_entangled(2), 0) == doctest::Approx(0.5));
  CHECK(marginal_purity(maximally_entangled(2), 1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(marginal_purity(maximally_entangled(2), 2), DomainError);
}

TEST_CASE("time-reversal overlap") {
  CHECK(time_reversal_overlap(maximally_entangled(2)) == doctest::Approx(1.0));
  const std::size_t zero[] = {0, 0};
  CHECK(time_reversal_overlap(basis_state(k22, zero)) == doctest::Approx(0.0));
  CounterRng rng(21, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = sample_ginibre({2}, 2, rng);
    const auto b = sample_ginibre({3}, 1 + rep % 3, rng);
    CHECK(time_reversal_overlap(tensor(a, b)) ==
          doctest::Approx(time_reversal_overlap(a) * time_reversal_overlap(b)).epsilon(1e-12));
  }
  for (int rep = 0; rep < 200; ++rep) {
    const auto rho = sample_wishart(k22, rng);
    const auto pt = budget_decompose(rho);
    CHECK(time_reversal_overlap(rho) == doctest::Approx(two_qubit_Q_oracle(rho)).epsilon(1e-12));
    CHECK(std::abs(*pt.Q - two_qubit_Q_from_budgets(pt.BL, pt.BNL)) < 1e-10);
  }
  // the top basis state of any qudit is its own time-reversal null
  for (std::size_t d = 2; d <= 6; ++d) {
    ComplexMatrix top(d, d);
    top(0, 0) = 1.0;
    CHECK(time_reversal_overlap(top) == doctest::Approx(0.0));
  }
}

TEST_CASE("fano decomposition") {
  const auto f = fano_decompose(maximally_entangled(2));
  CHECK(f.local_budget() == doctest::Approx(0.0));
  CHECK(f.t[0][0] == doctest::Approx(1.0));
  CHECK(f.t[1][1] == doctest::Approx(-1.0));
  CHECK(f.t[2][2] == doctest::Approx(1.0));

  const std::size_t zero[] = {0, 0};
  const auto g = fano_decompose(basis_state(k22, zero));
  CHECK(g.r[2] == doctest::Approx(1.0));
  CHECK(g.s[2] == doctest::Approx(1.0));
  CHECK(g.t[2][2] == doctest::Approx(1.0));
  CHECK(g.nonlocal_budget() == doctest::Approx(1.0));

  const auto h = fano_decompose(DensityMatrix::maximally_mixed(k22));
  CHECK(h.local_budget() + h.nonlocal_budget() == doctest::Approx(0.0));

  CounterRng rng(22, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto rho = sample_wishart(k22, rng);
    const auto c = fano_decompose(rho);
    CHECK(max_abs_diff(fano_reconstruct(c.r, c.s, c.t), rho.matrix()) < 1e-12);
    CHECK(std::abs(4 * purity(rho) - 1 - c.local_budget() - c.nonlocal_budget()) < 1e-10);
  }
  CHECK_THROWS_AS(fano_decompose(DensityMatrix::maximally_mixed({2, 3})), DomainError);
}

TEST_CASE("pauli spectrum") {
  const auto s = pauli_spectrum(maximally_entangled(2));
  CHECK(s.n_p() == 15);
  CHECK(s.coeff("XX") == doctest::Approx(1.0));
  CHECK(s.coeff("YY") == doctest::Approx(-1.0));
  CHECK(s.coeff("ZZ") == doctest::Approx(1.0));
  CHECK(s.second_moment() == doctest::Approx(3.0));
  int nonzero = 0;
  for (double x : s.coeffs) nonzero += std::abs(x) > 1e-12;
  CHECK(nonzero == 3);

  for (double x : pauli_spectrum(DensityMatrix::maximally_mixed({2, 2, 2})).coeffs) CHECK(std::abs(x) < 1e-15);

  ComplexMatrix z0(2, 2);
  z0(0, 0) = 1.0;
  const auto prod = tensor(DensityMatrix::trusted(z0, {2}), DensityMatrix::maximally_mixed({2}));
  const auto sp = pauli_spectrum(prod);
  CHECK(sp.coeff("ZI") == doctest::Approx(1.0));
  CHECK(sp.second_moment() == doctest::Approx(1.0));

  CounterRng rng(23, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto rho = sample_wishart({2, 2, 2}, rng);
    const auto spec = pauli_spectrum(rho);
    CHECK(spec.second_moment() == doctest::Approx(8 * purity(rho) - 1).epsilon(1e-10));
    CHECK(spec.max_abs() <= 1.0);
  }
  CHECK_THROWS_AS(pauli_spectrum(DensityMatrix::maximally_mixed({2, 3})), DomainError);
}

TEST_CASE("canonical two-qubit family") {
  const auto bell = budget_decompose(canonical_two_qubit({1.0, std::numbers::pi / 2}));
  CHECK(bell.X == doctest::Approx(0.0));
  CHECK(bell.Y == doctest::Approx(1.0));

  const CanonicalParams corner{1.0, 0.0};
  const auto pp = budget_decompose(canonical_two_qubit(corner));
  CHECK(pp.X * pp.X == doctest::Approx(2.0 / 3));
  CHECK(pp.Y * pp.Y == doctest::Approx(1.0 / 3));
  const auto ev = herm_eigvals(canonical_two_qubit(corner).matrix());
  CHECK(std::abs(ev[0]) < 1e-12);

  // mu = 0, alpha = 0: the mixed product I/2 x |0><0| on the wall
  const auto wall = canonical_two_qubit({0.0, 0.0});
  const auto f = fano_decompose(wall);
  CHECK(f.s[2] == doctest::Approx(1.0));
  const auto wp = budget_decompose(wall);
  CHECK(wp.BNL == doctest::Approx(0.0));
  CHECK(*wp.Q == doctest::Approx(0.0));
  CHECK(wp.BL == doctest::Approx(1.0));

  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 10; ++j) {
      const CanonicalParams p{i / 10.0, j / 10.0 * std::numbers::pi / 2};
      const auto closed = canonical_eigenvalues(p);
      auto sorted = std::vector<double>(closed.begin(), closed.end());
      std::sort(sorted.begin(), sorted.end());
      const auto num = herm_eigvals(canonical_two_qubit(p).matrix());
      for (int k = 0; k < 4; ++k) CHECK(num[k] == doctest::Approx(sorted[k]).epsilon(1e-12));
      CHECK(num[0] >= -1e-12);
    }
  CHECK_THROWS_AS(canonical_two_qubit({1.1, 0.0}), DomainError);
  CHECK_THROWS_AS(canonical_two_qubit({0.5, 2.0}), DomainError);
}

TEST_CASE("named states") {
  const auto w = budget_decompose(w_state(3));
  CHECK(w.BL == doctest::Approx(1.0 / 3));
  CHECK(w.BNL == doctest::Approx(20.0 / 3));
  const auto g = budget_decompose(ghz({2, 2, 2}));
  CHECK(g.B == doctest::Approx(7.0));
  CHECK(purity(maximally_entangled(3)) == doctest::Approx(1.0));
  CHECK(budget_decompose(maximally_entangled(3)).BL == doctest::Approx(0.0));
}

TEST_CASE("ensembles") {
  CounterRng rng(24, 0);
  const double half[] = {0.5, 0, 0, 0.5};
  const auto cl = budget_decompose(classical_state(k22, half));
  CHECK(cl.BL == doctest::Approx(0.0));
  CHECK(cl.BNL == doctest::Approx(1.0));

  const auto wt = budget_decompose(sample_werner(1.0 / std::sqrt(2.0), k22));
  CHECK(wt.BNL == doctest::Approx(1.5).epsilon(1e-14));

  for (int rep = 0; rep < 50; ++rep) {
    const auto pt = budget_decompose(sample_product_pure(k22, rng));
    CHECK(pt.X * pt.X == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(pt.Y * pt.Y == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  for (int rep = 0; rep < 50; ++rep) {
    CHECK(negativity(sample_wishart(k22, rng, WishartFilter::Npt)) > kNptThreshold);
    const auto ppt = sample_wishart(k22, rng, WishartFilter::PptMixed);
    CHECK(negativity(ppt) < kNptThreshold);
    CHECK(purity(ppt) < kMixedPurityCap);
  }
  for (auto f : methods_families()) {
    for (const auto& dims : {k22, DimensionProfile{2, 3}}) {
      const auto rho = sample_family(f, dims, rng);
      const auto ev = herm_eigvals(rho.matrix());
      CHECK(ev.front() >= -1e-9);
      CHECK(rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(rho.matrix().hermiticity_defect() < 1e-12);
    }
  }
}

TEST_CASE("local unitary invariance") {
  CounterRng rng(25, 0);
  for (const auto& dims : {k22, DimensionProfile{2, 3}, DimensionProfile{3, 3}, DimensionProfile{2, 2, 2}}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto rho = sample_wishart(dims, rng);
      const auto a = budget_decompose(rho);
      const auto b = budget_decompose(random_local_unitary(rho, rng));
      CHECK(std::abs(a.P - b.P) < 1e-10);
      // Q only survives arbitrary local unitaries on qubit factors
      if (dims.all_qubits()) CHECK(std::abs(*a.Q - *b.Q) < 1e-10);
      CHECK(std::abs(a.BL - b.BL) < 1e-10);
      CHECK(std::abs(a.BNL - b.BNL) < 1e-10);
      for (std::size_t k = 0; k < dims.size(); ++k)
        CHECK(std::abs(marginal_purity(rho, k) - marginal_purity(random_local_unitary(rho, rng), k)) < 1e-10);
    }
  }
}

TEST_CASE("qudit overlap is invariant under local spin rotations") {
  CounterRng rng(26, 0);
  auto rotation = [&](std::size_t d) {
    const double j = (static_cast<double>(d) - 1.0) / 2.0;
    ComplexMatrix jp(d, d), jz(d, d);
    for (std::size_t b = 0; b < d; ++b) {
      const double m = j - static_cast<double>(b);
      jz(b, b) = m;
      if (b > 0) jp(b - 1, b) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    const ComplexMatrix jx = 0.5 * (jp + jp.adjoint());
    const ComplexMatrix jy = cplx(0.0, -0.5) * (jp - jp.adjoint());
    const ComplexMatrix gen = rng.normal() * jx + rng.normal() * jy + rng.normal() * jz;
    const auto es = herm_eig(gen);
    ComplexMatrix u(d, d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          u(a, b) += std::polar(1.0, -es.values[k]) * es.vectors(a, k) * std::conj(es.vectors(b, k));
    return u;
  };
  for (const auto& dims : {DimensionProfile{2, 3}, DimensionProfile{3, 3}, DimensionProfile{3, 4}}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto rho = sample_wishart(dims, rng);
      ComplexMatrix u = rotation(dims[0]);
      for (std::size_t k = 1; k < dims.size(); ++k) u = kron(u, rotation(dims[k]));
      const auto rot = DensityMatrix::validate(u * rho.matrix() * u.adjoint(), dims);
      CHECK(time_reversal_overlap(rot) == doctest::Approx(time_reversal_overlap(rho)).epsilon(1e-10));
    }
  }
}

TEST_CASE("seeded streams are reproducible") {
  CounterRng a(7, 3), b(7, 3), c(7, 4);
  const auto ra = sample_wishart(k22, a), rb = sample_wishart(k22, b), rc = sample_wishart(k22, c);
  CHECK(max_abs_diff(ra.matrix(), rb.matrix()) == 0.0);
  CHECK(max_abs_diff(ra.matrix(), rc.matrix()) > 0.0);
}
