#include <cmath>

#include "budgetlab/budget.hpp"
#include "budgetlab/channels.hpp"
#include "budgetlab/envelopes.hpp"
#include "doctest.h"

using namespace budgetlab;

namespace {

DensityMatrix dm(const ComplexMatrix& m, const DimensionProfile& d) { return DensityMatrix::validate(m, d); }

DensityMatrix bell() { return maximally_entangled(2); }

DensityMatrix ket(std::initializer_list<std::size_t> digits, const DimensionProfile& d) {
  return basis_state(d, std::vector<std::size_t>(digits));
}

// q|11><11| + (1-q) I/4
DensityMatrix polarised(double q) {
  ComplexMatrix m = ComplexMatrix::identity(4) * ((1.0 - q) / 4.0);
  m(3, 3) += q;
  return dm(m, {2, 2});
}

std::vector<std::pair<std::string, DensityMatrix>> arrow_states() {
  const DimensionProfile d{2, 2};
  ComplexMatrix me = 0.6 * bell().matrix();
  me(1, 1) += 0.4;
  const double cl[] = {0.5, 0.0, 0.0, 0.5};
  return {{"bell", bell()},
          {"werner:0.8", werner(0.8, d)},
          {"mixed-entangled", dm(me, d)},
          {"product", ket({0, 0}, d)},
          {"mixed-separable", werner(0.3, d)},
          {"classical", classical_state(d, cl)}};
}

}  // namespace

TEST_CASE("kraus completeness across kinds and profiles") {
  for (const DimensionProfile dims : {DimensionProfile{2, 2}, DimensionProfile{2, 3}, DimensionProfile{3, 3}}) {
    for (ChannelKind k : {ChannelKind::Identity, ChannelKind::Dephasing, ChannelKind::Depolarizing, ChannelKind::AmplitudeDamping}) {
      for (double p : {0.0, 0.3, 1.0}) {
        CHECK(make_channel(k, p, dims).completeness_defect() < 1e-10);
        CHECK(make_channel(k, p, dims, {1}).completeness_defect() < 1e-10);
      }
    }
  }
  CHECK(make_channel(ChannelKind::CorrelatedPhaseFlip, 0.4, {2, 2, 2}).completeness_defect() < 1e-10);
  CHECK(make_channel(ChannelKind::CorrelatedAmplitudeDamping, 0.4, {2, 2, 2}, {0, 2}).completeness_defect() < 1e-10);
  CHECK_THROWS_AS(make_channel(ChannelKind::CorrelatedAmplitudeDamping, 0.4, {2, 3}), DomainError);
  CHECK_THROWS_AS(make_channel(ChannelKind::Dephasing, 1.5, {2, 2}), DomainError);
  CHECK_THROWS_AS(make_channel(ChannelKind::Dephasing, 0.5, {2, 2}, {2}), DomainError);
  CHECK(parse_channel_kind("depolarising") == ChannelKind::Depolarizing);
  for (auto k : all_channel_kinds()) CHECK(parse_channel_kind(channel_kind_name(k)) == k);
}

TEST_CASE("channel examples") {
  const DimensionProfile d22{2, 2};
  CounterRng rng(31, 0);
  const auto rho = sample_wishart(d22, rng);
  CHECK(max_abs_diff(apply(make_channel(ChannelKind::Depolarizing, 1.0, d22), rho).matrix(), 0.25 * ComplexMatrix::identity(4)) < 1e-14);
  CHECK(max_abs_diff(apply(make_channel(ChannelKind::Identity, 0.7, d22), rho).matrix(), rho.matrix()) < 1e-15);

  const auto out = apply(make_channel(ChannelKind::CorrelatedAmplitudeDamping, 1.0, d22), ket({1, 1}, d22));
  CHECK(max_abs_diff(out.matrix(), ket({0, 0}, d22).matrix()) < 1e-15);

  for (double p : {0.1, 0.5, 0.9}) {
    const auto f = fano_decompose(apply(make_channel(ChannelKind::Dephasing, p, d22), bell()));
    const auto f0 = fano_decompose(bell());
    const double s = (1.0 - p) * (1.0 - p);
    CHECK(f.t[0][0] == doctest::Approx(s * f0.t[0][0]).epsilon(1e-12));
    CHECK(f.t[1][1] == doctest::Approx(s * f0.t[1][1]).epsilon(1e-12));
    CHECK(f.t[2][2] == doctest::Approx(f0.t[2][2]).epsilon(1e-12));
  }
}

TEST_CASE("depolarising matches the partial-trace formula and composes") {
  const DimensionProfile d23{2, 3};
  CounterRng rng(32, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const auto rho = sample_wishart(d23, rng);
    for (double p : {0.2, 0.65}) {
      // target 0: (1-p) rho + p I/2 x Tr_0 rho
      const std::size_t keep1[] = {1};
      const auto expect0 = (1.0 - p) * rho.matrix() + p * kron(0.5 * ComplexMatrix::identity(2), partial_trace(rho.matrix(), d23, keep1));
      CHECK(max_abs_diff(apply(make_channel(ChannelKind::Depolarizing, p, d23, {0}), rho).matrix(), expect0) < 1e-13);
      const std::size_t keep0[] = {0};
      const auto expect1 = (1.0 - p) * rho.matrix() + p * kron(partial_trace(rho.matrix(), d23, keep0), ComplexMatrix::identity(3) * (1.0 / 3.0));
      CHECK(max_abs_diff(apply(make_channel(ChannelKind::Depolarizing, p, d23, {1}), rho).matrix(), expect1) < 1e-13);
    }
    const double p1 = 0.3, p2 = 0.45;
    const auto twice = apply(make_channel(ChannelKind::Depolarizing, p2, d23, {1}),
                             apply(make_channel(ChannelKind::Depolarizing, p1, d23, {1}), rho));
    const auto once = apply(make_channel(ChannelKind::Depolarizing, 1.0 - (1.0 - p1) * (1.0 - p2), d23, {1}), rho);
    CHECK(max_abs_diff(twice.matrix(), once.matrix()) < 1e-12);
  }
}

TEST_CASE("qutrit dephasing and damping") {
  const DimensionProfile d3{3};
  CounterRng rng(33, 0);
  const auto rho = sample_wishart(d3, rng);
  const double p = 0.35;
  const auto deph = apply(make_channel(ChannelKind::Dephasing, p, d3), rho).matrix();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const cplx expect = i == j ? rho.matrix()(i, j) : (1.0 - p) * rho.matrix()(i, j);
      CHECK(std::abs(deph(i, j) - expect) < 1e-13);
    }
  const auto damp = apply(make_channel(ChannelKind::AmplitudeDamping, p, d3), rho).matrix();
  const auto& r = rho.matrix();
  CHECK(std::abs(damp(0, 0) - (r(0, 0) + p * (r(1, 1) + r(2, 2)))) < 1e-13);
  CHECK(std::abs(damp(1, 1) - (1.0 - p) * r(1, 1)) < 1e-13);
  CHECK(std::abs(damp(1, 2) - (1.0 - p) * r(1, 2)) < 1e-13);
  CHECK(std::abs(damp(0, 1) - std::sqrt(1.0 - p) * r(0, 1)) < 1e-13);
}

TEST_CASE("outputs stay valid on random pairs") {
  CounterRng rng(34, 0);
  const std::vector<DimensionProfile> profiles{{2, 2}, {2, 3}, {2, 2, 2}};
  for (int rep = 0; rep < 300; ++rep) {
    const auto& dims = profiles[rng.below(profiles.size())];
    const auto rho = sample_wishart(dims, rng);
    const auto kinds = dims.all_qubits() ? methods_channel_kinds() : std::vector<ChannelKind>{ChannelKind::Dephasing, ChannelKind::Depolarizing, ChannelKind::AmplitudeDamping};
    const auto kind = kinds[rng.below(kinds.size())];
    std::vector<std::size_t> targets;
    if (kind == ChannelKind::CorrelatedAmplitudeDamping) targets = {0, 1};
    const auto out = apply(make_channel(kind, rng.uniform(), dims, targets), rho);
    CHECK(herm_eigvals(out.matrix()).front() > -1e-9);
  }
}

TEST_CASE("sweep geometry") {
  const DimensionProfile d22{2, 2};
  const auto dep = sweep(bell(), ChannelKind::Depolarizing, {}, 21, "bell");
  REQUIRE(dep.samples.size() == 21);
  for (std::size_t i = 0; i < dep.samples.size(); ++i) {
    CHECK(dep.samples[i].p == doctest::Approx(i / 20.0));
    CHECK(dep.samples[i].point.X < 1e-7);
    if (i > 0) CHECK(dep.samples[i].point.R < dep.samples[i - 1].point.R);
  }
  const auto deph = sweep(bell(), ChannelKind::Dephasing, {}, 21);
  for (std::size_t i = 1; i < deph.samples.size(); ++i) {
    CHECK(deph.samples[i].point.X < 1e-7);
    CHECK(deph.samples[i].point.Y < deph.samples[i - 1].point.Y);
  }
  // unanchored one-sided depolarisation slides down the Q = 0 wall
  const auto wall = sweep(ket({0, 0}, d22), ChannelKind::Depolarizing, {0}, 21);
  for (const auto& s : wall.samples) {
    CHECK(s.point.X * s.point.X == doctest::Approx(q_wall_2q()).epsilon(1e-9));
    CHECK(*s.point.Q < 1e-12);
  }
  CHECK_THROWS_AS(sweep(bell(), ChannelKind::Dephasing, {}, 1), DomainError);
}

TEST_CASE("unital channels never raise purity") {
  for (const auto& [name, rho] : arrow_states()) {
    for (ChannelKind k : {ChannelKind::Dephasing, ChannelKind::Depolarizing, ChannelKind::CorrelatedPhaseFlip}) {
      const auto tr = sweep(rho, k, {}, 51);
      for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        // the correlated flip is a unitary mixture that refocuses past p = 1/2
        if (k == ChannelKind::CorrelatedPhaseFlip && tr.samples[i].p > 0.5) break;
        CHECK(tr.samples[i].point.P <= tr.samples[i - 1].point.P + 1e-12);
      }
    }
  }
  // and at p = 1 it is unitary
  const auto rho = arrow_states()[2].second;
  const auto flipped = apply(make_channel(ChannelKind::CorrelatedPhaseFlip, 1.0, {2, 2}), rho);
  CHECK(purity(flipped) == doctest::Approx(purity(rho)).epsilon(1e-12));
}

TEST_CASE("correlated damping converts local polarisation into correlations") {
  for (double q : {0.5, 0.8}) {
    const auto tr = sweep(polarised(q), ChannelKind::CorrelatedAmplitudeDamping, {0, 1}, 101);
    int hits = 0;
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
      const auto& a = tr.samples[i - 1].point;
      const auto& b = tr.samples[i].point;
      hits += b.P < a.P - 1e-12 && b.BNL / b.B > a.BNL / a.B + 1e-12;
    }
    CHECK(hits > 0);
  }
}

TEST_CASE("purification") {
  const DimensionProfile d22{2, 2};
  CHECK(max_abs_diff(purify(bell(), 7).matrix(), bell().matrix()) < 1e-14);
  CHECK(max_abs_diff(purify(DensityMatrix::maximally_mixed(d22), 9).matrix(), 0.25 * ComplexMatrix::identity(4)) < 1e-15);
  const double d[] = {0.6, 0.4};
  const auto lim = purify(DensityMatrix::validate(ComplexMatrix::diagonal(d), {2}), 200);
  CHECK(std::abs(lim.matrix()(0, 0) - 1.0) < 1e-12);

  for (const auto& [name, rho] : arrow_states()) {
    const auto tr = purification_trajectory(rho, 30, name);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].point.P >= tr.samples[i - 1].point.P - 1e-12);
  }
  CHECK_THROWS_AS(purify(bell(), 0), DomainError);
}

TEST_CASE("arrow of decoherence") {
  for (const auto& [name, rho] : arrow_states()) {
    for (ChannelKind k : methods_channel_kinds()) {
      std::vector<std::size_t> targets;
      if (k == ChannelKind::CorrelatedAmplitudeDamping) targets = {0, 1};
      const auto tr = sweep(rho, k, targets, kDefaultSweepSteps, name);
      INFO(name, " ", channel_kind_name(k));
      CHECK(arrow_check(tr).empty());
    }
  }
  const auto me = arrow_states()[2].second;
  CHECK_FALSE(arrow_check(purification_trajectory(me, 20)).empty());
  const std::vector<std::pair<double, double>> flat(5, {0.5, 0.25});
  CHECK(arrow_check(flat).empty());
  const std::vector<std::pair<double, double>> up{{0.5, 0.2}, {0.6, 0.3}};
  CHECK(arrow_check(up) == std::vector<std::size_t>{1});
}

TEST_CASE("traced walls sit on the declared XY ellipses") {
  for (const auto& [dims, a, c] : {std::tuple{DimensionProfile{3, 3}, 2.0, 1.5}, std::tuple{DimensionProfile{2, 3}, 2.0, 1.6}}) {
    const auto tr = trace_wall(dims, 41, 9);
    for (const auto& p : tr.phases[0]) CHECK(std::abs(a * p.X * p.X + p.Y * p.Y - c) < 1e-8);
  }
}
