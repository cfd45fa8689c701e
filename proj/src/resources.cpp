#include "budgetlab/resources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace budgetlab {

namespace {

void require_two_qubits(const DensityMatrix& rho, const char* what) {
  if (rho.dims() != DimensionProfile{2, 2}) throw DomainError(std::string(what) + " is defined for 2x2 only");
}

double norm2(const Vec3& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }

double frob2(const Mat3& t) {
  double s = 0.0;
  for (const auto& row : t)
    for (double x : row) s += x * x;
  return s;
}

double top_eigenvalue(const Mat3& k) {
  ComplexMatrix m(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = k[i][j];
  return herm_eigvals(m).back();
}

}  // namespace

double negativity(const DensityMatrix& rho, std::size_t cut) {
  if (cut >= rho.dims().size()) throw DomainError("negativity: cut index out of range");
  double neg = 0.0;
  for (double ev : herm_eigvals(partial_transpose(rho.matrix(), rho.dims(), cut)))
    if (ev < 0.0) neg -= ev;
  return neg;
}

double negativity_ceiling(double R) {
  if (!(R >= -1e-12 && R <= 1.0 + 1e-12)) throw DomainError("negativity_ceiling: R outside [0,1]");
  R = std::clamp(R, 0.0, 1.0);
  return std::max(0.0, std::sqrt(9.0 * R / (64.0 - 48.0 * R)) - 0.25);
}

double geometric_discord_2q(const DensityMatrix& rho, int side) {
  require_two_qubits(rho, "geometric discord");
  if (side != 1 && side != 2) throw DomainError("discord side must be 1 or 2");
  const auto f = fano_decompose(rho);
  const Vec3& v = side == 1 ? f.r : f.s;
  Mat3 k{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double acc = v[i] * v[j];
      for (std::size_t l = 0; l < 3; ++l) acc += side == 1 ? f.t[i][l] * f.t[j][l] : f.t[l][i] * f.t[l][j];
      k[i][j] = acc;
    }
  return std::max(0.0, (norm2(v) + frob2(f.t) - top_eigenvalue(k)) / 4.0);
}

double discord_ceiling(double R) {
  if (!(R >= -1e-12 && R <= 1.0 + 1e-12)) throw DomainError("discord_ceiling: R outside [0,1]");
  return R / (2.0 * (4.0 - 3.0 * R));
}

DiscordBounds discord_bounds(const DensityMatrix& rho, int side) {
  require_two_qubits(rho, "discord bounds");
  if (side != 1 && side != 2) throw DomainError("discord side must be 1 or 2");
  const auto f = fano_decompose(rho);
  const double bnl = frob2(f.t);
  const double tmax2 = f.tsv[0] * f.tsv[0];
  const double v2 = norm2(side == 1 ? f.r : f.s);
  DiscordBounds b;
  b.lower = (bnl - tmax2) / 4.0;
  b.tight_upper = (v2 + bnl - tmax2) / 4.0;
  b.absolute_upper = discord_ceiling(budget_decompose(rho).R);
  return b;
}

double chsh_max(const DensityMatrix& rho) {
  require_two_qubits(rho, "chsh_max");
  const auto f = fano_decompose(rho);
  return 2.0 * std::sqrt(f.tsv[0] * f.tsv[0] + f.tsv[1] * f.tsv[1]);
}

std::string chsh_flag_name(ChshFlag f) {
  switch (f) {
    case ChshFlag::Impossible: return "impossible";
    case ChshFlag::Possible: return "possible";
    case ChshFlag::Guaranteed: return "guaranteed";
  }
  return "?";
}

ChshFlag chsh_flags(const BudgetPoint& point) {
  if (point.BNL <= 1.0) return ChshFlag::Impossible;
  if (point.BNL > 1.5) return ChshFlag::Guaranteed;
  return ChshFlag::Possible;
}

SteeringResult steering_ls3(const DensityMatrix& rho) {
  require_two_qubits(rho, "steering_ls3");
  const double s3 = frob2(fano_decompose(rho).t);
  return {s3, s3 > 1.0};
}

double magic_renyi2(const PauliSpectrum& spec) {
  const double B = spec.second_moment();
  // Stabiliser states give S_4 = B up to rounding; do not report -1e-17.
  return std::max(0.0, -std::log2((1.0 + spec.fourth_moment()) / (1.0 + B)));
}

double magic_ceiling(double B, std::size_t n_qubits) {
  const double np = std::pow(4.0, static_cast<double>(n_qubits)) - 1.0;
  return std::log2(1.0 + B) - std::log2(1.0 + B * B / np);
}

MagicBounds magic_bounds(const PauliSpectrum& spec) {
  const double B = spec.second_moment();
  const double xm = spec.max_abs();
  MagicBounds mb;
  mb.lower = std::log2(1.0 + B) - std::log2(1.0 + xm * xm * B);
  mb.upper = std::log2(1.0 + B) - std::log2(1.0 + B * B / static_cast<double>(spec.n_p()));
  return mb;
}

MorelliResult morelli_check(const DensityMatrix& rho, double tol) {
  require_two_qubits(rho, "morelli_check");
  const auto f = fano_decompose(rho);
  const double nr = std::sqrt(norm2(f.r));
  const double ns = std::sqrt(norm2(f.s));
  const double bl = norm2(f.r) + norm2(f.s);
  const double bnl = frob2(f.t);
  MorelliResult m;
  m.upper_margin = 3.0 + bl - 4.0 * nr * ns - 4.0 * std::abs(nr - ns) - bnl;
  m.lower_margin = std::sqrt(bnl) - (nr + ns - 1.0);
  m.upper_ok = m.upper_margin >= -tol;
  m.lower_ok = m.lower_margin >= -tol;
  return m;
}

ResourceReport resource_report(const DensityMatrix& rho) {
  ResourceReport rep;
  rep.negativity = negativity(rho, 0);
  const bool two_qubits = rho.dims() == DimensionProfile{2, 2};
  if (two_qubits) {
    const double R = budget_decompose(rho).R;
    rep.negativity_ceiling = negativity_ceiling(R);
    rep.discord = geometric_discord_2q(rho, 1);
    rep.discord_bounds = discord_bounds(rho, 1);
    rep.chsh_max = chsh_max(rho);
    rep.steering = steering_ls3(rho);
  }
  if (rho.dims().all_qubits() && rho.dims().size() <= 8) {
    const auto spec = pauli_spectrum(rho);
    rep.magic = magic_renyi2(spec);
    rep.magic_bounds = magic_bounds(spec);
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::optional<ProfileTarget> parse_profile_target(const std::string& name) {
  if (name == "negativity") return ProfileTarget::Negativity;
  if (name == "magic") return ProfileTarget::Magic;
  return std::nullopt;
}

std::string profile_target_name(ProfileTarget t) { return t == ProfileTarget::Negativity ? "negativity" : "magic"; }

double profile_value(ProfileTarget target, const DensityMatrix& rho) {
  return target == ProfileTarget::Negativity ? negativity(rho, 0) : magic_renyi2(pauli_spectrum(rho));
}

double profile_ceiling(ProfileTarget target, const DimensionProfile& dims, double R) {
  if (target == ProfileTarget::Negativity) return negativity_ceiling(R);
  const double D = static_cast<double>(dims.total());
  const double B = (D - 1.0) * R / (D - (D - 1.0) * R);
  return magic_ceiling(B, dims.size());
}

DensityMatrix mix_to_radius(const DensityMatrix& rho, double R) {
  const double D = static_cast<double>(rho.dim());
  const double B = D * purity(rho) - 1.0;
  const double B0 = (D - 1.0) * R / (D - (D - 1.0) * R);
  if (B0 <= 0.0) return DensityMatrix::maximally_mixed(rho.dims());
  if (B < B0 * (1.0 - 1e-12)) throw DomainError("mix_to_radius: state lies inside the target radius");
  const double lam = std::min(1.0, std::sqrt(B0 / B));
  ComplexMatrix m = lam * rho.matrix();
  for (std::size_t i = 0; i < rho.dim(); ++i) m(i, i) += (1.0 - lam) / D;
  return DensityMatrix::trusted(std::move(m), rho.dims());
}

namespace {

constexpr double kShellSlack = 1e-12;

struct ShellProblem {
  const DimensionProfile& dims;
  double R;
  double theta;
  ProfileTarget target;
  double window;
};

// Lands a candidate on the shell, or returns nothing when it cannot reach it.
std::optional<DensityMatrix> to_shell(const ShellProblem& pb, const DensityMatrix& rho) {
  const auto pt = budget_decompose(rho);
  if (pt.R < pb.R - kShellSlack) return std::nullopt;
  const double th = pt.theta.value_or(0.0);
  if (pt.theta && std::abs(th - pb.theta) > pb.window) return std::nullopt;
  if (!pt.theta && pb.R > 0.0) return std::nullopt;
  return mix_to_radius(rho, pb.R);
}

std::optional<DensityMatrix> canonical_seed(const ShellProblem& pb, CounterRng& rng) {
  const double s = std::sin(pb.theta) * std::sin(pb.theta);
  const double c = std::cos(pb.theta) * std::cos(pb.theta);
  for (int attempt = 0; attempt < 64; ++attempt) {
    double mu = rng.uniform() < 0.5 ? 1.0 : rng.uniform_open0();
    double u;
    if (s < 1e-15) {
      mu = 0.0;
      u = rng.uniform();
    } else {
      // tan^2(theta) = mu^2 (1 + 2u) / ((1 + mu^2)(1 - u)) with u = sin^2(alpha)
      const double m2 = mu * mu;
      u = (s * (1.0 + m2) - c * m2) / (s * (1.0 + m2) + 2.0 * c * m2);
    }
    if (!(u >= 0.0 && u <= 1.0)) continue;
    const auto rho = canonical_two_qubit({mu, std::asin(std::sqrt(u))});
    auto shell = to_shell(pb, random_local_unitary(rho, rng));
    if (shell) return shell;
  }
  return std::nullopt;
}

std::optional<DensityMatrix> ginibre_seed(const ShellProblem& pb, CounterRng& rng) {
  const std::size_t D = pb.dims.total();
  for (int attempt = 0; attempt < 256; ++attempt) {
    const std::size_t rank = pb.R >= 1.0 - kShellSlack ? 1 : 1 + static_cast<std::size_t>(rng.below(D));
    auto shell = to_shell(pb, sample_ginibre(pb.dims, rank, rng));
    if (shell) return shell;
  }
  return std::nullopt;
}

ComplexMatrix random_hermitian(std::size_t d, CounterRng& rng) {
  ComplexMatrix h(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    h(i, i) = rng.normal();
    for (std::size_t j = i + 1; j < d; ++j) {
      h(i, j) = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return (1.0 / h.frobenius_norm()) * h;
}

ComplexMatrix exp_hermitian(const ComplexMatrix& h, double eps) {
  const auto es = herm_eig(h);
  const std::size_t d = h.rows();
  ComplexMatrix out(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const double w = std::exp(eps * es.values[k]);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(i, j) += w * es.vectors(i, k) * std::conj(es.vectors(j, k));
  }
  return out;
}

}  // namespace

ProfilePoint max_profile_point(const DimensionProfile& dims, double R, double theta, ProfileTarget target,
                               const ProfileOptions& options, std::uint64_t index) {
  if (!(R > 0.0 && R <= 1.0)) throw DomainError("max_profile: R must lie in (0,1]");
  if (target == ProfileTarget::Negativity && dims != DimensionProfile{2, 2})
    throw DomainError("max_profile: the negativity ceiling is known for 2x2 only");
  if (target == ProfileTarget::Magic && !dims.all_qubits()) throw DomainError("max_profile: magic needs qubits");

  const ShellProblem pb{dims, R, theta, target, options.theta_window};
  const bool canonical = dims == DimensionProfile{2, 2};
  ProfilePoint out;
  out.theta = theta;
  out.ceiling = profile_ceiling(target, dims, R);

  std::vector<std::pair<double, DensityMatrix>> seeds;
  const CounterRng base(options.seed, index);
  for (int i = 0; i < options.samples; ++i) {
    CounterRng rng = base.split(static_cast<std::uint64_t>(i));
    const bool use_canonical = canonical && (i % 10) < 7;
    auto seed = use_canonical ? canonical_seed(pb, rng) : ginibre_seed(pb, rng);
    if (!seed) continue;
    seeds.emplace_back(profile_value(target, *seed), std::move(*seed));
  }
  if (seeds.empty()) return out;
  std::stable_sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  out.found = true;
  out.value = seeds.front().first;

  const std::size_t climbers = std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(std::max(options.climbers, 0)));
  for (std::size_t c = 0; c < climbers; ++c) {
    CounterRng rng = base.split(0x100000000ULL + c);
    DensityMatrix cur = seeds[c].second;
    double best = seeds[c].first;
    double eps = 0.1;
    for (int step = 0; step < options.hill_steps; ++step) {
      const auto e = exp_hermitian(random_hermitian(cur.dim(), rng), eps);
      ComplexMatrix m = e * cur.matrix() * e;
      m *= 1.0 / m.trace().real();
      m = 0.5 * (m + m.adjoint());
      auto cand = to_shell(pb, DensityMatrix::trusted(std::move(m), dims));
      if (!cand) {
        eps = std::max(eps * 0.7, 1e-4);
        continue;
      }
      const double v = profile_value(target, *cand);
      if (v > best) {
        best = v;
        cur = std::move(*cand);
        eps = std::min(eps * 1.2, 0.5);
      } else {
        eps = std::max(eps * 0.9, 1e-4);
      }
    }
    out.value = std::max(out.value, best);
  }
  return out;
}

}  // namespace budgetlab
