#pragma once

#include <optional>
#include <string>
#include <vector>

#include "budgetlab/budget.hpp"
#include "budgetlab/states.hpp"

namespace budgetlab {

enum class ChannelKind {
  Identity,
  Dephasing,        // off-diagonals scaled by 1 - p on every target
  Depolarizing,     // (1 - p) rho + p Tr_k(rho) x I/d_k on every target
  AmplitudeDamping, // |j> -> |0> with probability p for j >= 1, on every target
  CorrelatedPhaseFlip,        // (1 - p) rho + p Z..Z rho Z..Z over the target qubits
  CorrelatedAmplitudeDamping, // K0 = diag(1,1,1,sqrt(1-p)), K1 = sqrt(p)|00><11| on a qubit pair
};

std::optional<ChannelKind> parse_channel_kind(const std::string& name);
std::string channel_kind_name(ChannelKind kind);
const std::vector<ChannelKind>& all_channel_kinds();
/// The five noise models of the two-qubit flow study (no identity).
const std::vector<ChannelKind>& methods_channel_kinds();

struct KrausChannel {
  DimensionProfile dims;
  std::vector<ComplexMatrix> kraus;
  std::string label;

  /// max |sum K^dagger K - I|
  double completeness_defect() const;
};

/// Lifts an operator acting on `targets` (in the listed order) to the full space.
ComplexMatrix embed(const ComplexMatrix& op, const DimensionProfile& dims, std::span<const std::size_t> targets);

/// Single-subsystem Kraus set of a local kind on a d-level system.
std::vector<ComplexMatrix> local_kraus(ChannelKind kind, double p, std::size_t d);

/// Targets are 0-based subsystem indices; an empty target means all subsystems.
KrausChannel make_channel(ChannelKind kind, double p, const DimensionProfile& dims,
                          std::vector<std::size_t> targets = {});

/// sum_k K rho K^dagger, validated; throws NumericalError when the output is
/// not a state.
DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho);

struct TrajectorySample {
  double p = 0.0;
  BudgetPoint point;
};

struct Trajectory {
  std::string channel;
  std::string initial_state;
  std::vector<TrajectorySample> samples;
};

inline constexpr int kDefaultSweepSteps = 101;

/// Evaluates rho(p) on the uniform grid p_i = i / (steps - 1); the channel
/// is rebuilt at every strength.
Trajectory sweep(const DensityMatrix& rho0, ChannelKind kind, std::vector<std::size_t> targets, int steps = kDefaultSweepSteps,
                 std::string state_label = {});

/// rho^n / tr(rho^n).
DensityMatrix purify(const DensityMatrix& rho, unsigned n);

/// Budget points of purify(rho, n) for n = 1..max_power.
Trajectory purification_trajectory(const DensityMatrix& rho, unsigned max_power, std::string state_label = {});

inline constexpr double kArrowTol = 1e-12;

/// Indices i >= 1 where P and Q both grow by more than kArrowTol from
/// sample i-1 to sample i.
std::vector<std::size_t> arrow_check(std::span<const std::pair<double, double>> pq);
std::vector<std::size_t> arrow_check(const Trajectory& traj);

}  // namespace budgetlab
