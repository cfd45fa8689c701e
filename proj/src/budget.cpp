#include "budgetlab/budget.hpp"

#include <cmath>
#include <string>

namespace budgetlab {

namespace {

double clamp_small(double v) { return (v < 0.0 && v >= -kBudgetClamp) ? 0.0 : v; }

BudgetPoint assemble(double P, double BL, std::optional<double> BNL, const DimensionProfile& dims) {
  const double D = static_cast<double>(dims.total());
  BudgetPoint pt;
  pt.P = P;
  pt.B = clamp_small(D * P - 1.0);
  pt.BL = clamp_small(BL);
  pt.BNL = clamp_small(BNL.value_or(pt.B - pt.BL));
  const auto rat = rationalize(pt.BL, pt.BNL, P, dims);
  pt.X = rat.X;
  pt.Y = rat.Y;
  pt.R = rat.R;
  pt.theta = rat.theta;
  return pt;
}

}  // namespace

Rationalised rationalize(double BL, double BNL, double P, const DimensionProfile& dims) {
  const double D = static_cast<double>(dims.total());
  BL = clamp_small(BL);
  BNL = clamp_small(BNL);
  if (BL < 0.0 || BNL < 0.0) throw DomainError("rationalize: negative budget");
  if (!(P >= 1.0 / D - 1e-12 && P <= 1.0 + 1e-12)) throw DomainError("rationalize: purity outside [1/D, 1]");
  if (std::abs(BL + BNL - (D * P - 1.0)) > 1e-8)
    throw DomainError("rationalize: budgets do not add up to D P - 1");
  const double scale = (D - 1.0) * P;
  Rationalised out;
  out.X = std::sqrt(BL / scale);
  out.Y = std::sqrt(BNL / scale);
  out.R = out.X * out.X + out.Y * out.Y;
  if (BL + BNL > 0.0) out.theta = std::atan2(std::sqrt(BNL), std::sqrt(BL));
  return out;
}

BudgetPoint budget_decompose(const DensityMatrix& rho) {
  const auto& dims = rho.dims();
  double BL = 0.0;
  for (std::size_t k = 0; k < dims.size(); ++k)
    BL += static_cast<double>(dims[k]) * marginal_purity(rho, k) - 1.0;
  BudgetPoint pt = assemble(purity(rho), BL, std::nullopt, dims);
  pt.Q = time_reversal_overlap(rho);
  return pt;
}

BudgetPoint budget_from_purities(double P, std::span<const double> marginal_purities, const DimensionProfile& dims) {
  if (marginal_purities.size() != dims.size())
    throw DomainError("expected " + std::to_string(dims.size()) + " marginal purities");
  double BL = 0.0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const double pk = marginal_purities[k];
    const double d = static_cast<double>(dims[k]);
    if (!(pk >= 1.0 / d - 1e-12 && pk <= 1.0 + 1e-12))
      throw DomainError("marginal purity " + std::to_string(k + 1) + " outside [1/d, 1]");
    BL += d * pk - 1.0;
  }
  BudgetPoint pt = assemble(P, BL, std::nullopt, dims);
  if (dims == DimensionProfile{2, 2}) pt.Q = two_qubit_Q_from_budgets(pt.BL, pt.BNL);
  return pt;
}

BudgetPoint budget_from_budgets(double BL, double BNL, const DimensionProfile& dims) {
  const double D = static_cast<double>(dims.total());
  const double P = (1.0 + BL + BNL) / D;
  BudgetPoint pt = assemble(P, BL, BNL, dims);
  if (dims == DimensionProfile{2, 2}) pt.Q = two_qubit_Q_from_budgets(pt.BL, pt.BNL);
  return pt;
}

double two_qubit_Q_from_budgets(double BL, double BNL) { return (1.0 - BL + BNL) / 4.0; }

std::pair<double, double> budgets_from_xy(double X, double Y, const DimensionProfile& dims) {
  const double D = static_cast<double>(dims.total());
  const double R = X * X + Y * Y;
  if (!(R <= 1.0 + 1e-12)) throw DomainError("budgets_from_xy: point outside R <= 1");
  // (D - 1) P R = D P - 1  =>  P = 1 / (D - (D - 1) R)
  const double P = 1.0 / (D - (D - 1.0) * R);
  return {(D - 1.0) * P * X * X, (D - 1.0) * P * Y * Y};
}

}  // namespace budgetlab
