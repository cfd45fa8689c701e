#include <cmath>
#include <numbers>

#include "budgetlab/budget.hpp"
#include "doctest.h"

using namespace budgetlab;

TEST_CASE("decomposition of reference states") {
  const DimensionProfile d22{2, 2};
  const auto o = budget_decompose(DensityMatrix::maximally_mixed(d22));
  CHECK(o.B == doctest::Approx(0.0));
  CHECK(o.X == 0.0);
  CHECK(o.Y == 0.0);
  CHECK_FALSE(o.theta.has_value());

  const auto b = budget_decompose(maximally_entangled(2));
  CHECK(b.BL == doctest::Approx(0.0));
  CHECK(b.BNL == doctest::Approx(3.0));
  CHECK(b.X == doctest::Approx(0.0));
  CHECK(b.Y == doctest::Approx(1.0));
  CHECK(*b.theta == doctest::Approx(std::numbers::pi / 2));

  const DimensionProfile d23{2, 3};
  const std::size_t zero[] = {0, 0};
  const auto p = budget_decompose(basis_state(d23, zero));
  CHECK(p.BL == doctest::Approx(3.0));
  CHECK(p.BNL == doctest::Approx(2.0));
}

TEST_CASE("rationalised coordinates") {
  const DimensionProfile d22{2, 2};
  auto r = rationalize(0, 3, 1, d22);
  CHECK(r.X == 0.0);
  CHECK(r.Y == doctest::Approx(1.0));
  CHECK(r.R == doctest::Approx(1.0));
  CHECK(*r.theta == doctest::Approx(std::numbers::pi / 2));
  r = rationalize(2, 1, 1, d22);
  CHECK(r.X * r.X == doctest::Approx(2.0 / 3));
  CHECK(r.Y * r.Y == doctest::Approx(1.0 / 3));
  r = rationalize(0, 1, 0.5, d22);
  CHECK(r.Y * r.Y == doctest::Approx(2.0 / 3));
  CHECK_THROWS_AS(rationalize(1, 1, 1, d22), DomainError);
  CHECK_THROWS_AS(rationalize(-1, 1, 0.25, d22), DomainError);
  CHECK_THROWS_AS(rationalize(0, 0, 0.1, d22), DomainError);
  // tiny negative round-off is clamped, not rejected
  CHECK(rationalize(-1e-12, 3, 1, d22).X == 0.0);
}

TEST_CASE("two-qubit overlap from budgets") {
  CHECK(two_qubit_Q_from_budgets(0, 3) == doctest::Approx(1.0));
  CHECK(two_qubit_Q_from_budgets(2, 1) == doctest::Approx(0.0));
  CHECK(two_qubit_Q_from_budgets(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("purity-only construction agrees with the state") {
  CounterRng rng(31, 0);
  for (const auto& dims : {DimensionProfile{2, 2}, DimensionProfile{2, 3}, DimensionProfile{2, 2, 2}}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto rho = sample_wishart(dims, rng);
      std::vector<double> pk;
      for (std::size_t k = 0; k < dims.size(); ++k) pk.push_back(marginal_purity(rho, k));
      const auto a = budget_decompose(rho);
      const auto b = budget_from_purities(purity(rho), pk, dims);
      CHECK(std::abs(a.BL - b.BL) < 1e-12);
      CHECK(std::abs(a.BNL - b.BNL) < 1e-12);
      CHECK(std::abs(a.X - b.X) < 1e-12);
      CHECK(a.B == doctest::Approx(a.BL + a.BNL).epsilon(1e-10));
      CHECK(a.R == doctest::Approx(a.X * a.X + a.Y * a.Y).epsilon(1e-12));
      if (dims.size() == 2 && dims[1] == 2) CHECK(std::abs(*a.Q - *b.Q) < 1e-10);
      if (a.BL > 0) CHECK(std::tan(*a.theta) == doctest::Approx(std::sqrt(a.BNL / a.BL)).epsilon(1e-10));
    }
  }
  const double bad[] = {0.4, 0.5};
  CHECK_THROWS_AS(budget_from_purities(1.0, bad, {2, 2}), DomainError);
}

TEST_CASE("inverse map") {
  const DimensionProfile d23{2, 3};
  for (double x : {0.0, 0.3, 0.7})
    for (double y : {0.0, 0.2, 0.6}) {
      const auto [bl, bnl] = budgets_from_xy(x, y, d23);
      const auto pt = budget_from_budgets(bl, bnl, d23);
      CHECK(std::abs(pt.X - x) < 1e-12);
      CHECK(std::abs(pt.Y - y) < 1e-12);
    }
}

TEST_CASE("permutation invariance for equal dimensions") {
  CounterRng rng(32, 0);
  const DimensionProfile d33{3, 3};
  ComplexMatrix swap(9, 9);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) swap(b * 3 + a, a * 3 + b) = 1.0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto rho = sample_wishart(d33, rng);
    const auto sw = DensityMatrix::validate(swap * rho.matrix() * swap, d33);
    const auto a = budget_decompose(rho), b = budget_decompose(sw);
    CHECK(std::abs(a.BL - b.BL) < 1e-10);
    CHECK(std::abs(a.BNL - b.BNL) < 1e-10);
    CHECK(std::abs(*a.Q - *b.Q) < 1e-10);
  }
}
