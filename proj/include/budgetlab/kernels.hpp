#pragma once

// Data-parallel loops. Every item draws from its own rng stream (seed, index)
// and writes only its own slot, so the serial and OpenMP variants return
// bit-identical results; the serial one is the reference for tests.

#include <cstdint>
#include <vector>

#include "budgetlab/budget.hpp"
#include "budgetlab/envelopes.hpp"
#include "budgetlab/resources.hpp"
#include "budgetlab/states.hpp"

namespace budgetlab::kernels {

struct CanonicalSample {
  double mu = 0.0;
  double alpha = 0.0;
  double min_eig = 0.0;
  BudgetPoint point;
};

struct ResourceSample {
  BudgetPoint point;
  ResourceReport report;
  MorelliResult morelli;
  Vec3 tsv{};
};

namespace serial {
std::vector<BudgetPoint> sample_cloud(Family family, const DimensionProfile& dims, std::size_t count, std::uint64_t seed);
/// n x n grid over [0,1] x [0,pi/2], row-major in mu.
std::vector<CanonicalSample> canonical_grid(std::size_t n);
/// Two-qubit states of one family with their full resource report.
std::vector<ResourceSample> resource_cloud(Family family, std::size_t count, std::uint64_t seed);
/// cn_point over a grid, without the neighbour post-pass.
std::vector<CnPoint> cn_grid(const DimensionProfile& dims, const std::vector<double>& bl_grid, const CnOptions& options);
std::vector<ProfilePoint> profile(const DimensionProfile& dims, double R, const std::vector<double>& thetas,
                                  ProfileTarget target, const ProfileOptions& options);
}  // namespace serial

// Same contracts, loops run under OpenMP.
namespace omp {
std::vector<BudgetPoint> sample_cloud(Family family, const DimensionProfile& dims, std::size_t count, std::uint64_t seed);
std::vector<CanonicalSample> canonical_grid(std::size_t n);
std::vector<ResourceSample> resource_cloud(Family family, std::size_t count, std::uint64_t seed);
std::vector<CnPoint> cn_grid(const DimensionProfile& dims, const std::vector<double>& bl_grid, const CnOptions& options);
std::vector<ProfilePoint> profile(const DimensionProfile& dims, double R, const std::vector<double>& thetas,
                                  ProfileTarget target, const ProfileOptions& options);
}  // namespace omp

/// Full C^n envelope: parallel grid followed by the (sequential) neighbour pass.
CnResult cn_envelope_parallel(const DimensionProfile& dims, const std::vector<double>& bl_grid, const CnOptions& options = {});

}  // namespace budgetlab::kernels
