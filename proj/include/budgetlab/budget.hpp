#pragma once

#include <optional>
#include <span>

#include "budgetlab/states.hpp"

namespace budgetlab {

/// Round-off below this magnitude is clamped to zero before square roots.
inline constexpr double kBudgetClamp = 1e-10;

/// Macroscopic coordinates of a state.
struct BudgetPoint {
  double P = 0.0;            // global purity
  std::optional<double> Q;   // time-reversal overlap; absent when only purities are known (beyond 2x2)
  double B = 0.0;            // D P - 1
  double BL = 0.0;           // sum_k (d_k P_k - 1)
  double BNL = 0.0;          // B - BL
  double X = 0.0;
  double Y = 0.0;
  double R = 0.0;            // X^2 + Y^2
  std::optional<double> theta;  // indeterminate at the origin
};

struct Rationalised {
  double X = 0.0;
  double Y = 0.0;
  double R = 0.0;
  std::optional<double> theta;
};

BudgetPoint budget_decompose(const DensityMatrix& rho);

/// Builds the point from global and marginal purities alone. Q is filled in
/// only for two qubits, where it is fixed by the budgets.
BudgetPoint budget_from_purities(double P, std::span<const double> marginal_purities, const DimensionProfile& dims);

/// Budget point of an arbitrary (B_L, B_NL) pair.
BudgetPoint budget_from_budgets(double BL, double BNL, const DimensionProfile& dims);

Rationalised rationalize(double BL, double BNL, double P, const DimensionProfile& dims);

/// (1 - B_L + B_NL) / 4.
double two_qubit_Q_from_budgets(double BL, double BNL);

/// Inverse of the (X, Y) map: budgets of a rationalised point.
std::pair<double, double> budgets_from_xy(double X, double Y, const DimensionProfile& dims);

}  // namespace budgetlab
