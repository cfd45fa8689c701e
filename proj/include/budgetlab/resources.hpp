#pragma once

#include <optional>
#include <string>
#include <vector>

#include "budgetlab/budget.hpp"
#include "budgetlab/states.hpp"

namespace budgetlab {

/// Sum of |negative eigenvalues| of the partial transpose on subsystem `cut`.
double negativity(const DensityMatrix& rho, std::size_t cut = 0);

/// Two-qubit ceiling max(0, sqrt(9R / (64 - 48R)) - 1/4).
double negativity_ceiling(double R);

/// Geometric discord with measurement on `side` (1 or 2):
/// (|v|^2 + |t|_F^2 - k_max) / 4, k_max the top eigenvalue of v v^T + t t^T
/// (side 1, v = r) or v v^T + t^T t (side 2, v = s).
double geometric_discord_2q(const DensityMatrix& rho, int side = 1);

struct DiscordBounds {
  double lower = 0.0;           // (B_NL - t_max^2) / 4
  double tight_upper = 0.0;     // (|v|^2 + B_NL - t_max^2) / 4
  double absolute_upper = 0.0;  // R / (2 (4 - 3R)), i.e. B / 6
};

DiscordBounds discord_bounds(const DensityMatrix& rho, int side = 1);
/// The purity-only ceiling B / 6 written in R.
double discord_ceiling(double R);

/// 2 sqrt(t_p^2 + t_q^2) from the two largest singular values of t.
double chsh_max(const DensityMatrix& rho);

enum class ChshFlag { Impossible, Possible, Guaranteed };
std::string chsh_flag_name(ChshFlag f);
/// Two-qubit region test: B_NL <= 1 impossible, B_NL > 3/2 guaranteed.
ChshFlag chsh_flags(const BudgetPoint& point);

struct SteeringResult {
  double S3 = 0.0;  // |t|_F^2
  bool steerable = false;
};
SteeringResult steering_ls3(const DensityMatrix& rho);

/// -log2((1 + S_4) / (1 + B)).
double magic_renyi2(const PauliSpectrum& spec);

struct MagicBounds {
  double lower = 0.0;  // M_B - log2(1 + x_max^2 B)
  double upper = 0.0;  // M_B - log2(1 + B^2 / n_P)
};
MagicBounds magic_bounds(const PauliSpectrum& spec);
/// Upper bound as a function of B alone.
double magic_ceiling(double B, std::size_t n_qubits);

struct MorelliResult {
  double upper_margin = 0.0;  // 3 + B_L - 4|r||s| - 4||r| - |s|| - B_NL
  double lower_margin = 0.0;  // sqrt(B_NL) - (|r| + |s| - 1)
  bool upper_ok = false;
  bool lower_ok = false;
};
MorelliResult morelli_check(const DensityMatrix& rho, double tol = 1e-9);

struct ResourceReport {
  double negativity = 0.0;
  std::optional<double> negativity_ceiling;
  std::optional<double> discord;
  std::optional<DiscordBounds> discord_bounds;
  std::optional<double> chsh_max;
  std::optional<SteeringResult> steering;
  std::optional<double> magic;
  std::optional<MagicBounds> magic_bounds;
};

/// Everything that applies to the dims of rho (two-qubit-only entries stay empty otherwise).
ResourceReport resource_report(const DensityMatrix& rho);

// ---------------------------------------------------------------------------

enum class ProfileTarget { Negativity, Magic };
std::optional<ProfileTarget> parse_profile_target(const std::string& name);
std::string profile_target_name(ProfileTarget t);

struct ProfileOptions {
  int samples = 400;        // seeds drawn per theta
  int hill_steps = 200;
  int climbers = 4;         // best seeds that get hill-climbed
  double theta_window = 5e-3;
  std::uint64_t seed = 0;
};

struct ProfilePoint {
  double theta = 0.0;
  double value = 0.0;    // best value found; a lower bound on the true maximum
  double ceiling = 0.0;  // analytic ceiling at this R
  bool found = false;    // false when no seed landed on the shell
};

/// Value of the profile target for one state.
double profile_value(ProfileTarget target, const DensityMatrix& rho);
double profile_ceiling(ProfileTarget target, const DimensionProfile& dims, double R);

/// Best value at one (R, theta) shell point; rng streams are derived from
/// (options.seed, index).
ProfilePoint max_profile_point(const DimensionProfile& dims, double R, double theta, ProfileTarget target,
                               const ProfileOptions& options, std::uint64_t index);

/// Mixes rho with white noise so that it lands on radius R (theta is
/// unchanged). Requires R(rho) >= R.
DensityMatrix mix_to_radius(const DensityMatrix& rho, double R);

}  // namespace budgetlab
