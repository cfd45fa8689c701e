#include "budgetlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "budgetlab/channels.hpp"
#include "budgetlab/envelopes.hpp"
#include "budgetlab/io.hpp"
#include "budgetlab/kernels.hpp"

namespace budgetlab::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

// detail strings keep 3-4 significant digits
std::string g(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Result region(const Options& o) {
  const DimensionProfile d22{2, 2};
  Result r;
  r.pass = true;
  std::ostringstream det;
  std::uint64_t stream = 0;
  for (Family f : methods_families()) {
    const auto pts = kernels::omp::sample_cloud(f, d22, o.ensemble_count, o.seed + stream++);
    std::size_t bad = 0;
    double worst_bnl = 0.0;
    for (const auto& p : pts) {
      const double q = p.Q.value_or(0.0);
      bool ok = p.X * p.X <= 2.0 / 3.0 + 1e-8 && p.R <= 1.0 + 1e-10 && q >= -1e-10;
      if (f == Family::Classical) {
        worst_bnl = std::max(worst_bnl, p.BNL);
        ok = ok && p.BNL <= 1.0 + 1e-9;
      }
      bad += !ok;
    }
    r.pass = r.pass && bad == 0 && pts.size() == o.ensemble_count;
    det << family_name(f) << ' ' << bad << '/' << pts.size();
    if (f == Family::Classical) det << " (max BNL " << g(worst_bnl) << ')';
    det << "; ";
  }
  r.detail = det.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

Result holes(const Options&) {
  constexpr int n = 200, cells = 50;
  const double xmax = std::sqrt(2.0 / 3.0);
  const auto grid = kernels::omp::canonical_grid(n);
  std::vector<char> hit(cells * cells, 0);
  double worst = 0.0;
  for (const auto& s : grid) {
    worst = std::min(worst, s.min_eig);
    const int i = std::clamp(static_cast<int>(s.point.X / xmax * cells), 0, cells - 1);
    const int j = std::clamp(static_cast<int>(s.point.Y * cells), 0, cells - 1);
    hit[i * cells + j] = 1;
  }
  // a cell belongs to the feasible region when its centre does
  int feasible = 0, missed = 0;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      const double x = (i + 0.5) * xmax / cells, y = (j + 0.5) / cells;
      if (x * x + y * y > 1.0) continue;
      ++feasible;
      missed += !hit[i * cells + j];
    }
  Result r;
  r.pass = worst >= -1e-10 && missed == 0;
  r.detail = std::to_string(grid.size()) + " states, min eig " + g(worst) + ", " + std::to_string(missed) + " of " +
             std::to_string(feasible) + " feasible cells missed";
  return r;
}

Result vertices(const Options&) {
  using RP = RationalPoint;
  auto q = [](long a, long b = 1) { return Rational(a, b); };
  struct Case {
    TierSpec tier;
    std::vector<RP> expect;
  };
  const std::vector<Case> cases{
      {{{2, 2}, 1}, {{q(0), q(1)}, {q(2), q(1)}}},
      {{{2, 3}, 1}, {{q(0), q(1)}, {q(1, 2), q(3, 2)}, {q(3), q(2)}}},
      {{{3, 3}, 1}, {{q(0), q(2)}, {q(4), q(4)}}},
      {{{2, 2, 2}, 1}, {{q(0), q(3)}, {q(3), q(4)}}},
      {{{2, 2, 2}, 2}, {{q(0), q(3)}, {q(1), q(6)}}},
  };
  Result r;
  r.pass = true;
  std::ostringstream det;
  for (const auto& c : cases) {
    const auto curve = qc_envelope(c.tier);
    bool ok = curve.vertices.size() == c.expect.size();
    for (std::size_t i = 0; ok && i < c.expect.size(); ++i) ok = curve.vertices[i].bl == c.expect[i].bl && curve.vertices[i].bnl == c.expect[i].bnl;
    r.pass = r.pass && ok;
    det << c.tier.dims.to_string() << " m=" << c.tier.m << (ok ? " ok" : " MISMATCH") << "; ";
  }
  // 3x3 hull lies on B_NL = B_L/2 + 2
  const auto v33 = qc_envelope({{3, 3}, 1}).vertices;
  for (const auto& v : v33) r.pass = r.pass && v.bnl == v.bl / 2 + 2;
  r.detail = det.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

// Best B_NL over joint 2x3 distributions with entries in (1/24)Z and exactly
// uniform marginals, i.e. B_L = 0.
double simplex_oracle_23() {
  constexpr int N = 24;
  const DimensionProfile d23{2, 3};
  double best = 0.0;
  int c[6];
  std::vector<double> p(6);
  for (c[0] = 0; c[0] <= N; ++c[0])
    for (c[1] = 0; c[0] + c[1] <= N; ++c[1])
      for (c[2] = 0; c[0] + c[1] + c[2] <= N; ++c[2]) {
        if (c[0] + c[1] + c[2] != N / 2) continue;
        for (c[3] = 0; c[3] <= N / 2; ++c[3])
          for (c[4] = 0; c[3] + c[4] <= N / 2; ++c[4]) {
            c[5] = N / 2 - c[3] - c[4];
            if (c[0] + c[3] != N / 3 || c[1] + c[4] != N / 3) continue;
            for (int k = 0; k < 6; ++k) p[k] = c[k] / static_cast<double>(N);
            best = std::max(best, classical_nonlocal_budget(d23, p));
          }
      }
  return best;
}

Result c2_separation(const Options&) {
  const DimensionProfile d23{2, 3};
  const double oracle = simplex_oracle_23();
  CnOptions opt;
  const double at0 = kernels::omp::cn_grid(d23, {0.0}, opt).front().bnl;

  std::vector<double> ts;
  for (int k = 0; k <= 8; ++k) ts.push_back(std::pow(10.0, -4.0 + 2.0 * k / 8.0));
  const auto pts = kernels::omp::cn_grid(d23, ts, opt);
  // least-squares slope of log(cn(T) - cn(0)) against log T
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(ts.size());
  bool positive = true;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double gain = pts[i].bnl - at0;
    positive = positive && gain > 0.0;
    const double x = std::log(ts[i]), y = std::log(std::max(gain, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  Result r;
  r.pass = std::abs(at0 - oracle) <= 1e-3 && std::abs(at0 - 2.0 / 3.0) <= 1e-3 && positive && slope >= 0.4 && slope <= 0.6;
  r.detail = "cn(0) = " + io::fmt(at0) + ", grid oracle = " + io::fmt(oracle) + ", exponent " + g(slope);
  return r;
}

Result bracketing(const Options& o) {
  const auto cloud = kernels::omp::resource_cloud(Family::Wishart, o.wishart_count, o.seed ^ 0xB0B0ULL);
  constexpr double tol = 1e-9;
  std::size_t neg = 0, disc = 0, magic = 0, impossible = 0, guaranteed = 0, steer = 0, morelli = 0;
  for (const auto& s : cloud) {
    const auto& rep = s.report;
    const auto& p = s.point;
    neg += rep.negativity > *rep.negativity_ceiling + tol;
    disc += rep.discord_bounds->lower > *rep.discord + tol || *rep.discord > rep.discord_bounds->tight_upper + tol ||
            *rep.discord > rep.discord_bounds->absolute_upper + tol;
    magic += rep.magic_bounds->lower > *rep.magic + tol || *rep.magic > rep.magic_bounds->upper + tol;
    impossible += p.BNL <= 1.0 && *rep.chsh_max > 2.0 + tol;
    guaranteed += p.BNL > 1.5 && !(*rep.chsh_max > 2.0);
    steer += rep.steering->steerable != (p.BNL > 1.0);
    morelli += !(s.morelli.upper_ok && s.morelli.lower_ok);
  }
  Result r;
  r.pass = cloud.size() == o.wishart_count && neg + disc + magic + impossible + guaranteed + steer == 0;
  r.detail = std::to_string(cloud.size()) + " states; violations: negativity " + std::to_string(neg) + ", discord " +
             std::to_string(disc) + ", magic " + std::to_string(magic) + ", chsh-impossible " + std::to_string(impossible) +
             ", chsh-guaranteed " + std::to_string(guaranteed) + ", steering " + std::to_string(steer) +
             " (morelli surrogate " + std::to_string(morelli) + ")";
  return r;
}

Result known_values(const Options&) {
  const auto bell = maximally_entangled(2);
  const auto rep = resource_report(bell);
  const auto b = budget_decompose(bell);
  const double p = 1.0 / std::sqrt(2.0);
  const auto w = budget_decompose(werner(p, 2));
  const double ellipse = w.Y - chsh_guarantee_2q(w.X);
  struct Item {
    const char* name;
    double got, want;
  };
  const Item items[] = {{"N", rep.negativity, 0.5},
                        {"D_G", *rep.discord, 0.5},
                        {"chsh", *rep.chsh_max, 2.0 * std::sqrt(2.0)},
                        {"magic", *rep.magic, 0.0},
                        {"Q", *b.Q, 1.0},
                        {"werner ellipse", ellipse, 0.0},
                        {"ceiling(1/3)", negativity_ceiling(1.0 / 3.0), 0.0}};
  Result r;
  r.pass = true;
  double worst = 0.0;
  std::string bad;
  for (const auto& it : items) {
    const double e = std::abs(it.got - it.want);
    worst = std::max(worst, e);
    if (!(e <= 1e-10)) {
      r.pass = false;
      bad += std::string(" ") + it.name;
    }
  }
  r.detail = "7 values, max error " + g(worst) + (bad.empty() ? "" : ", off:" + bad);
  return r;
}

Result walls(const Options& o) {
  Result r;
  r.pass = true;
  std::ostringstream det;
  struct Ellipse {
    DimensionProfile dims;
    double a, c;
  };
  for (const auto& e : {Ellipse{{3, 3}, 2.0, 1.5}, Ellipse{{2, 3}, 2.0, 1.6}}) {
    const auto tr = trace_wall(e.dims, 101, o.seed);
    double dev = 0.0;
    for (const auto& p : tr.phases.at(0)) dev = std::max(dev, std::abs(p.Y - std::sqrt(std::max(0.0, e.c - e.a * p.X * p.X))));
    r.pass = r.pass && dev < 1e-8;
    det << e.dims.to_string() << " deviation " << g(dev) << "; ";
  }

  // three qubits: roof 2X^2 + Y^2 = 10/7, then the cliff B_NL = B_L - 1 at X^2 = 4/7 down to Y = 0
  const auto tr = trace_wall({2, 2, 2}, 101, o.seed);
  bool shape = tr.phases.size() == 2;
  double dev = 0.0;
  if (shape) {
    for (const auto& p : tr.phases[0]) dev = std::max(dev, std::abs(2 * p.X * p.X + p.Y * p.Y - 10.0 / 7.0));
    for (const auto& p : tr.phases[1]) {
      dev = std::max(dev, std::abs(p.X * p.X - 4.0 / 7.0));
      dev = std::max(dev, std::abs(p.BNL - (p.BL - 1.0)));
    }
    const auto& end = tr.phases[1].back();
    dev = std::max(dev, std::abs(end.Y));
    // roof first: it starts above the cliff
    shape = tr.phases[0].front().X * tr.phases[0].front().X < 4.0 / 7.0 - 1e-3;
  }
  r.pass = r.pass && shape && dev < 1e-6;
  det << "2,2,2 roof then cliff, deviation " << g(dev);
  r.detail = det.str();
  return r;
}

Result arrow(const Options&) {
  const DimensionProfile d22{2, 2};
  const std::vector<std::string> seeds{"bell", "chsh", "mixed-entangled", "product", "mixed-separable", "classical"};
  std::size_t runs = 0, violations = 0;
  for (const auto& name : seeds) {
    const auto rho = io::builtin_state(name, d22);
    for (ChannelKind k : methods_channel_kinds()) {
      std::vector<std::size_t> targets;
      if (k == ChannelKind::CorrelatedAmplitudeDamping) targets = {0, 1};
      violations += arrow_check(sweep(rho, k, targets, kDefaultSweepSteps, name)).size();
      ++runs;
    }
  }
  std::size_t purification = 0;
  std::ostringstream pur;
  for (const auto& name : {"chsh", "mixed-entangled", "mixed-separable"}) {
    const auto n = arrow_check(purification_trajectory(io::builtin_state(name, d22), 20, name)).size();
    purification += n;
    pur << ' ' << name << '=' << n;
  }
  Result r;
  r.pass = runs == 30 && violations == 0 && purification >= 1;
  r.detail = std::to_string(runs) + " sweeps x " + std::to_string(kDefaultSweepSteps) + " steps, " + std::to_string(violations) +
             " violations; purification steps:" + pur.str();
  return r;
}

Result profiles(const Options& o) {
  const DimensionProfile d22{2, 2};
  ProfileOptions opt;
  opt.samples = 200;
  opt.hill_steps = 100;
  opt.seed = o.seed;
  const double half_pi = std::numbers::pi / 2;
  const auto top = kernels::omp::profile(d22, 1.0, {half_pi}, ProfileTarget::Negativity, opt).front();

  std::vector<double> thetas;
  for (int i = 0; i <= 12; ++i) thetas.push_back(half_pi * i / 12.0);
  double low_max = 0.0;
  for (const auto& p : kernels::omp::profile(d22, 1.0 / 3.0, thetas, ProfileTarget::Negativity, opt)) low_max = std::max(low_max, p.value);

  std::size_t points = 0, over = 0;
  for (ProfileTarget t : {ProfileTarget::Negativity, ProfileTarget::Magic})
    for (double R : {1.0 / 3.0, 0.6, 1.0})
      for (const auto& p : kernels::omp::profile(d22, R, thetas, t, opt)) {
        if (!p.found) continue;
        ++points;
        over += p.value > p.ceiling + 1e-9;
      }
  Result r;
  r.pass = top.found && top.value >= 0.5 - 1e-6 && low_max <= 1e-10 && over == 0 && points > 0;
  r.detail = "N(R=1, pi/2) = " + io::fmt(top.value) + ", max N at R=1/3 = " + g(low_max) + ", " + std::to_string(over) + " of " +
             std::to_string(points) + " points above ceiling";
  return r;
}

struct Entry {
  const char* suite;
  const char* title;
  double limit_s;  // 0 = no runtime bound
  Result (*fn)(const Options&);
};

const Entry kEntries[] = {
    {"region", "region containment", 60.0, region},
    {"holes", "hole-freeness", 0.0, holes},
    {"vertices", "envelope vertices", 0.0, vertices},
    {"c2", "C2 separation", 300.0, c2_separation},
    {"bounds", "bound bracketing", 0.0, bracketing},
    {"known", "known values", 0.0, known_values},
    {"walls", "wall tracing", 0.0, walls},
    {"arrow", "arrow of decoherence", 30.0, arrow},
    {"profiles", "profile endpoints", 0.0, profiles},
};

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kEntries) v.emplace_back(e.suite);
    return v;
  }();
  return names;
}

std::optional<int> criterion_for(const std::string& suite) {
  for (std::size_t i = 0; i < std::size(kEntries); ++i)
    if (suite == kEntries[i].suite || suite == std::to_string(i + 1)) return static_cast<int>(i + 1);
  return std::nullopt;
}

Result run(int criterion, const Options& options) {
  if (criterion < 1 || criterion > static_cast<int>(std::size(kEntries))) throw DomainError("no criterion " + std::to_string(criterion));
  const auto& e = kEntries[criterion - 1];
  const auto t0 = Clock::now();
  Result r;
  try {
    r = e.fn(options);
  } catch (const std::exception& ex) {
    r.pass = false;
    r.detail = std::string("threw: ") + ex.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  r.id = criterion;
  r.name = e.title;
  if (e.limit_s > 0.0 && r.seconds >= e.limit_s) {
    r.pass = false;
    r.detail += "; over the " + g(e.limit_s) + " s budget";
  }
  return r;
}

std::string format_line(const Result& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail << " (" << r.seconds << " s)";
  return os.str();
}

std::vector<Result> run_all(const Options& options, std::ostream& out, const std::vector<int>& which) {
  std::vector<int> ids = which;
  if (ids.empty())
    for (std::size_t i = 1; i <= std::size(kEntries); ++i) ids.push_back(static_cast<int>(i));
  std::vector<Result> results;
  for (int id : ids) {
    results.push_back(run(id, options));
    out << format_line(results.back()) << std::endl;
  }
  return results;
}

}  // namespace budgetlab::acceptance
