// Serial reference vs OpenMP kernels. Usage: bench_kernels [scale]
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "budgetlab/kernels.hpp"

using namespace budgetlab;

namespace {

double seconds(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, const std::function<void()>& serial, const std::function<void()>& parallel) {
  const double s = seconds(serial), p = seconds(parallel);
  std::printf("%-28s %10.3f %10.3f %8.2fx\n", name, s, p, s / p);
}

}  // namespace

int main(int argc, char** argv) {
  const double scale = argc > 1 ? std::atof(argv[1]) : 1.0;
  const auto n = [&](double base) { return static_cast<std::size_t>(base * scale) + 1; };
  std::printf("threads: %d\n%-28s %10s %10s %9s\n", omp_get_max_threads(), "kernel", "serial s", "omp s", "speedup");

  const DimensionProfile d22{2, 2}, d23{2, 3};
  row("sample_cloud wishart 2,3", [&] { kernels::serial::sample_cloud(Family::Wishart, d23, n(50000), 1); },
      [&] { kernels::omp::sample_cloud(Family::Wishart, d23, n(50000), 1); });
  row("canonical_grid", [&] { kernels::serial::canonical_grid(n(200)); }, [&] { kernels::omp::canonical_grid(n(200)); });
  row("resource_cloud wishart", [&] { kernels::serial::resource_cloud(Family::Wishart, n(20000), 2); },
      [&] { kernels::omp::resource_cloud(Family::Wishart, n(20000), 2); });
  CnOptions opt;
  const auto grid = cn_default_grid(d23, static_cast<int>(n(8)));
  row("cn_grid 2,3", [&] { kernels::serial::cn_grid(d23, grid, opt); }, [&] { kernels::omp::cn_grid(d23, grid, opt); });
  ProfileOptions po;
  std::vector<double> th;
  for (std::size_t i = 0; i < n(8); ++i) th.push_back(0.1 + 0.15 * static_cast<double>(i));
  row("profile negativity R=0.8", [&] { kernels::serial::profile(d22, 0.8, th, ProfileTarget::Negativity, po); },
      [&] { kernels::omp::profile(d22, 0.8, th, ProfileTarget::Negativity, po); });
  return 0;
}
