#include "budgetlab/kernels.hpp"

#include <exception>
#include <numbers>

namespace budgetlab::kernels {

namespace {

BudgetPoint cloud_item(Family family, const DimensionProfile& dims, std::uint64_t seed, std::size_t i) {
  CounterRng rng(seed, i);
  return budget_decompose(sample_family(family, dims, rng));
}

CanonicalSample canonical_item(std::size_t n, std::size_t k) {
  const double step = n > 1 ? 1.0 / static_cast<double>(n - 1) : 0.0;
  CanonicalSample s;
  s.mu = static_cast<double>(k / n) * step;
  s.alpha = static_cast<double>(k % n) * step * std::numbers::pi / 2.0;
  const auto rho = canonical_two_qubit({s.mu, s.alpha});
  s.min_eig = herm_eigvals(rho.matrix()).front();
  s.point = budget_decompose(rho);
  return s;
}

ResourceSample resource_item(Family family, std::uint64_t seed, std::size_t i) {
  CounterRng rng(seed, i);
  const auto rho = sample_family(family, {2, 2}, rng);
  return {budget_decompose(rho), resource_report(rho), morelli_check(rho), fano_decompose(rho).tsv};
}

}  // namespace

namespace serial {

std::vector<BudgetPoint> sample_cloud(Family family, const DimensionProfile& dims, std::size_t count, std::uint64_t seed) {
  std::vector<BudgetPoint> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = cloud_item(family, dims, seed, i);
  return out;
}

std::vector<CanonicalSample> canonical_grid(std::size_t n) {
  std::vector<CanonicalSample> out(n * n);
  for (std::size_t k = 0; k < n * n; ++k) out[k] = canonical_item(n, k);
  return out;
}

std::vector<ResourceSample> resource_cloud(Family family, std::size_t count, std::uint64_t seed) {
  std::vector<ResourceSample> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = resource_item(family, seed, i);
  return out;
}

std::vector<CnPoint> cn_grid(const DimensionProfile& dims, const std::vector<double>& bl_grid, const CnOptions& options) {
  std::vector<CnPoint> out(bl_grid.size());
  for (std::size_t i = 0; i < bl_grid.size(); ++i) out[i] = cn_point(dims, bl_grid[i], options, i);
  return out;
}

std::vector<ProfilePoint> profile(const DimensionProfile& dims, double R, const std::vector<double>& thetas,
                                  ProfileTarget target, const ProfileOptions& options) {
  std::vector<ProfilePoint> out(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) out[i] = max_profile_point(dims, R, thetas[i], target, options, i);
  return out;
}

}  // namespace serial

namespace omp {

// Exceptions must not escape an OpenMP region; the first one is rethrown.
template <class F>
void parallel_for(std::size_t count, F&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(budgetlab_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<BudgetPoint> sample_cloud(Family family, const DimensionProfile& dims, std::size_t count, std::uint64_t seed) {
  std::vector<BudgetPoint> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = cloud_item(family, dims, seed, i); });
  return out;
}

std::vector<CanonicalSample> canonical_grid(std::size_t n) {
  std::vector<CanonicalSample> out(n * n);
  parallel_for(n * n, [&](std::size_t k) { out[k] = canonical_item(n, k); });
  return out;
}

std::vector<ResourceSample> resource_cloud(Family family, std::size_t count, std::uint64_t seed) {
  std::vector<ResourceSample> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = resource_item(family, seed, i); });
  return out;
}

std::vector<CnPoint> cn_grid(const DimensionProfile& dims, const std::vector<double>& bl_grid, const CnOptions& options) {
  std::vector<CnPoint> out(bl_grid.size());
  parallel_for(bl_grid.size(), [&](std::size_t i) { out[i] = cn_point(dims, bl_grid[i], options, i); });
  return out;
}

std::vector<ProfilePoint> profile(const DimensionProfile& dims, double R, const std::vector<double>& thetas,
                                  ProfileTarget target, const ProfileOptions& options) {
  std::vector<ProfilePoint> out(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t i) { out[i] = max_profile_point(dims, R, thetas[i], target, options, i); });
  return out;
}

}  // namespace omp

CnResult cn_envelope_parallel(const DimensionProfile& dims, const std::vector<double>& bl_grid, const CnOptions& options) {
  auto pts = omp::cn_grid(dims, bl_grid, options);
  if (options.neighbour_pass) cn_neighbour_pass(dims, pts, options);
  return assemble_cn(dims, std::move(pts));
}

}  // namespace budgetlab::kernels
