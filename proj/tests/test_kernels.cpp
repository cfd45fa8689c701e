#include <omp.h>

#include <cmath>
#include <cstring>

#include "budgetlab/kernels.hpp"
#include "doctest.h"

using namespace budgetlab;

namespace {

bool same(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same(const BudgetPoint& a, const BudgetPoint& b) {
  return same(a.P, b.P) && same(a.BL, b.BL) && same(a.BNL, b.BNL) && same(a.X, b.X) && same(a.Y, b.Y) &&
         a.Q.has_value() == b.Q.has_value() && (!a.Q || same(*a.Q, *b.Q));
}

// forces a multi-threaded team even on one core
struct Threads {
  int saved;
  explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("serial and parallel kernels agree bit for bit") {
  Threads t(4);
  for (Family f : methods_families()) {
    const auto a = kernels::serial::sample_cloud(f, {2, 3}, 300, 77);
    const auto b = kernels::omp::sample_cloud(f, {2, 3}, 300, 77);
    REQUIRE(a.size() == b.size());
    bool all = true;
    for (std::size_t i = 0; i < a.size(); ++i) all = all && same(a[i], b[i]);
    CHECK(all);
  }
  const auto ca = kernels::serial::canonical_grid(21), cb = kernels::omp::canonical_grid(21);
  bool all = true;
  for (std::size_t i = 0; i < ca.size(); ++i) all = all && same(ca[i].point, cb[i].point) && same(ca[i].min_eig, cb[i].min_eig);
  CHECK(all);

  const auto ra = kernels::serial::resource_cloud(Family::Wishart, 200, 5), rb = kernels::omp::resource_cloud(Family::Wishart, 200, 5);
  all = true;
  for (std::size_t i = 0; i < ra.size(); ++i)
    all = all && same(ra[i].report.negativity, rb[i].report.negativity) && same(*ra[i].report.discord, *rb[i].report.discord) &&
          same(*ra[i].report.magic, *rb[i].report.magic);
  CHECK(all);

  CnOptions opt;
  opt.starts = 4;
  const std::vector<double> grid{0.0, 0.4, 1.3};
  const auto na = kernels::serial::cn_grid({2, 3}, grid, opt), nb = kernels::omp::cn_grid({2, 3}, grid, opt);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(same(na[i].bnl, nb[i].bnl));

  ProfileOptions po;
  po.samples = 30;
  po.hill_steps = 20;
  const std::vector<double> th{0.3, 0.9, 1.5};
  const auto pa = kernels::serial::profile({2, 2}, 0.8, th, ProfileTarget::Negativity, po);
  const auto pb = kernels::omp::profile({2, 2}, 0.8, th, ProfileTarget::Negativity, po);
  for (std::size_t i = 0; i < th.size(); ++i) CHECK(same(pa[i].value, pb[i].value));
}

TEST_CASE("streams are per item") {
  // the i-th state does not depend on how many are drawn
  const auto a = kernels::serial::sample_cloud(Family::Wishart, {2, 2}, 10, 3);
  const auto b = kernels::serial::sample_cloud(Family::Wishart, {2, 2}, 40, 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same(a[i], b[i]));
}

TEST_CASE("canonical grid is PSD and covers the feasible region") {
  const auto g = kernels::omp::canonical_grid(120);
  const int cells = 25;
  const double xmax = std::sqrt(2.0 / 3.0);
  std::vector<int> hit(cells * cells, 0);
  double worst = 0.0;
  for (const auto& s : g) {
    worst = std::min(worst, s.min_eig);
    const int i = std::min(cells - 1, static_cast<int>(s.point.X / xmax * cells));
    const int j = std::min(cells - 1, static_cast<int>(s.point.Y * cells));
    hit[i * cells + j] = 1;
  }
  CHECK(worst >= -1e-10);
  int missing = 0;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      // only cells lying wholly inside the unit circle count
      const double x1 = (i + 1) * xmax / cells, y1 = (j + 1.0) / cells;
      if (x1 * x1 + y1 * y1 <= 1.0) missing += hit[i * cells + j] == 0;
    }
  CHECK(missing == 0);
}
