#include "budgetlab/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "budgetlab/channels.hpp"

namespace budgetlab {

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

std::string plane_name(Plane p) { return p == Plane::Budget ? "budget" : "rationalised"; }

namespace {

double as_double(const Rational& q) { return boost::rational_cast<double>(q); }

Vec2 as_vec(const RationalPoint& p) { return {as_double(p.bl), as_double(p.bnl)}; }

Piece segment(const Vec2& a, const Vec2& b) {
  Piece pc;
  pc.kind = Piece::Kind::Segment;
  pc.v0 = a;
  pc.v1 = b;
  pc.x_range = {std::min(a[0], b[0]), std::max(a[0], b[0])};
  pc.y_range = {std::min(a[1], b[1]), std::max(a[1], b[1])};
  return pc;
}

bool within(double v, const Vec2& range, double tol = 1e-12) { return v >= range[0] - tol && v <= range[1] + tol; }

}  // namespace

EnvelopeCurve polyline(const std::vector<Vec2>& pts, std::string label) {
  EnvelopeCurve c;
  c.label = std::move(label);
  for (std::size_t i = 1; i < pts.size(); ++i) c.pieces.push_back(segment(pts[i - 1], pts[i]));
  return c;
}

EnvelopeCurve polyline(const std::vector<RationalPoint>& pts, std::string label) {
  std::vector<Vec2> v;
  for (const auto& p : pts) v.push_back(as_vec(p));
  auto c = polyline(v, std::move(label));
  c.vertices = pts;
  return c;
}

BudgetLine line_through(const Vec2& p, const Vec2& q) {
  const double c1 = q[1] - p[1];
  const double c2 = -(q[0] - p[0]);
  return {c1, c2, c1 * p[0] + c2 * p[1]};
}

std::array<double, 3> line_to_arc(const BudgetLine& l, std::size_t D) {
  const double d = static_cast<double>(D);
  double a = (d - 1.0) * (l.c1 + l.c3);
  double b = (d - 1.0) * (l.c2 + l.c3);
  double c = l.c3 * d;
  // present as (a/b) X^2 + Y^2 = c/b, or X^2 = c/a for vertical arcs
  const double s = std::abs(b) > 1e-14 ? b : a;
  if (std::abs(s) > 1e-14) {
    a /= s;
    b /= s;
    c /= s;
  }
  if (std::abs(b) < 1e-14) b = 0.0;
  if (std::abs(a) < 1e-14) a = 0.0;
  return {a, b, c};
}

BudgetLine arc_to_line(double a, double b, double c, std::size_t D) {
  // a B_L + b B_NL = c (D-1) P, with D P = 1 + B_L + B_NL
  const double d = static_cast<double>(D);
  const double k = c * (d - 1.0) / d;
  return {a - k, b - k, k};
}

Vec2 to_xy(const Vec2& budget, std::size_t D) {
  const double d = static_cast<double>(D);
  const double P = (1.0 + budget[0] + budget[1]) / d;
  const double scale = (d - 1.0) * P;
  return {std::sqrt(std::max(0.0, budget[0]) / scale), std::sqrt(std::max(0.0, budget[1]) / scale)};
}

Vec2 to_budget(const Vec2& xy, std::size_t D) {
  const double d = static_cast<double>(D);
  const double R = xy[0] * xy[0] + xy[1] * xy[1];
  const double P = 1.0 / (d - (d - 1.0) * R);
  return {(d - 1.0) * P * xy[0] * xy[0], (d - 1.0) * P * xy[1] * xy[1]};
}

EnvelopeCurve to_rationalised(const EnvelopeCurve& curve, std::size_t D) {
  if (curve.plane == Plane::Rationalised) return curve;
  EnvelopeCurve out;
  out.plane = Plane::Rationalised;
  out.label = curve.label;
  out.vertices = curve.vertices;
  for (const auto& pc : curve.pieces) {
    if (pc.v0 == pc.v1) continue;
    const auto abc = line_to_arc(line_through(pc.v0, pc.v1), D);
    Piece arc = segment(to_xy(pc.v0, D), to_xy(pc.v1, D));
    arc.kind = Piece::Kind::Arc;
    arc.a = abc[0];
    arc.b = abc[1];
    arc.c = abc[2];
    out.pieces.push_back(arc);
  }
  return out;
}

EnvelopeCurve to_budget_plane(const EnvelopeCurve& curve, std::size_t D) {
  if (curve.plane == Plane::Budget) return curve;
  EnvelopeCurve out;
  out.plane = Plane::Budget;
  out.label = curve.label;
  out.vertices = curve.vertices;
  for (const auto& pc : curve.pieces) out.pieces.push_back(segment(to_budget(pc.v0, D), to_budget(pc.v1, D)));
  return out;
}

std::optional<double> curve_value(const EnvelopeCurve& curve, double bl) {
  if (curve.plane != Plane::Budget) throw DomainError("curve_value expects a budget-plane curve");
  std::optional<double> best;
  for (const auto& pc : curve.pieces) {
    const double dx = pc.v1[0] - pc.v0[0];
    if (dx == 0.0 || !within(bl, pc.x_range)) continue;
    const double t = std::clamp((bl - pc.v0[0]) / dx, 0.0, 1.0);
    const double v = pc.v0[1] + t * (pc.v1[1] - pc.v0[1]);
    if (!best || v > *best) best = v;
  }
  return best;
}

std::optional<double> curve_y(const EnvelopeCurve& curve, double x) {
  if (curve.plane != Plane::Rationalised) throw DomainError("curve_y expects an XY curve");
  std::optional<double> best;
  for (const auto& pc : curve.pieces) {
    if (pc.b == 0.0 || pc.x_range[0] == pc.x_range[1] || !within(x, pc.x_range)) continue;
    const double v = std::sqrt(std::max(0.0, (pc.c - pc.a * x * x) / pc.b));
    if (!best || v > *best) best = v;
  }
  return best;
}

std::optional<double> curve_x(const EnvelopeCurve& curve, double y) {
  if (curve.plane != Plane::Rationalised) throw DomainError("curve_x expects an XY curve");
  std::optional<double> best;
  for (const auto& pc : curve.pieces) {
    if (pc.a == 0.0 || pc.y_range[0] == pc.y_range[1] || !within(y, pc.y_range)) continue;
    const double v = std::sqrt(std::max(0.0, (pc.c - pc.b * y * y) / pc.a));
    if (!best || v > *best) best = v;
  }
  return best;
}

std::vector<Vec2> sample_curve(const EnvelopeCurve& curve, int per_piece) {
  per_piece = std::max(per_piece, 2);
  std::vector<Vec2> out;
  for (const auto& pc : curve.pieces) {
    for (int i = 0; i < per_piece; ++i) {
      if (!out.empty() && i == 0) continue;  // shared endpoint
      const double t = static_cast<double>(i) / (per_piece - 1);
      Vec2 p{pc.v0[0] + t * (pc.v1[0] - pc.v0[0]), pc.v0[1] + t * (pc.v1[1] - pc.v0[1])};
      if (pc.kind == Piece::Kind::Arc) {
        if (pc.b != 0.0 && pc.x_range[0] != pc.x_range[1])
          p[1] = std::sqrt(std::max(0.0, (pc.c - pc.a * p[0] * p[0]) / pc.b));
        else if (pc.a != 0.0)
          p[0] = std::sqrt(std::max(0.0, (pc.c - pc.b * p[1] * p[1]) / pc.a));
      }
      out.push_back(p);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double classical_envelope_2q(double X) {
  if (!(X >= 0.0 && X <= std::sqrt(2.0 / 3.0) + 1e-12)) throw DomainError("classical envelope: X outside [0, sqrt(2/3)]");
  return std::sqrt(std::max(0.0, 2.0 / 3.0 - X * X / 2.0));
}

double chsh_guarantee_2q(double X) {
  if (!(X >= 0.0 && X <= std::sqrt(2.0 / 3.0) + 1e-12)) throw DomainError("chsh guarantee: X outside [0, sqrt(2/3)]");
  return std::sqrt(4.0 / 5.0 - 3.0 * X * X / 5.0);
}

EnvelopeCurve classical_envelope_2q_curve() {
  return polyline(std::vector<RationalPoint>{{Rational(0), Rational(1)}, {Rational(2), Rational(1)}}, "C");
}

EnvelopeCurve chsh_guarantee_2q_curve() {
  // B_NL = 3/2 until it meets the pure line B_NL = 3 - B_L
  return polyline(std::vector<RationalPoint>{{Rational(0), Rational(3, 2)}, {Rational(3, 2), Rational(3, 2)}},
                  "chsh-guarantee");
}

// ---------------------------------------------------------------------------

HullInputs qc_candidates(const TierSpec& tier) {
  const auto& dims = tier.dims;
  const std::size_t n = dims.size();
  if (n < 2) throw DomainError("qc_envelope needs at least two subsystems");
  if (tier.m < 1 || tier.m > n - 1) throw DomainError("qc_envelope: m must lie in [1, n-1]");
  const auto D = static_cast<std::int64_t>(dims.total());

  HullInputs h;
  std::int64_t bl_pure = 0;
  const std::size_t upto = tier.m == 1 ? n : n - tier.m;
  for (std::size_t i = 0; i < upto; ++i) bl_pure += static_cast<std::int64_t>(dims[i]) - 1;
  h.v_pure = {Rational(bl_pure), Rational(D - 1 - bl_pure)};
  h.v_cor = {Rational(0), Rational(D / static_cast<std::int64_t>(dims[tier.m]) - 1)};

  std::int64_t sum_d = 0;
  for (std::size_t k = 0; k < n; ++k) sum_d += static_cast<std::int64_t>(dims[k]);
  std::set<std::size_t> cmins;
  for (std::size_t i = 0; i <= tier.m; ++i) cmins.insert(dims[i]);
  for (std::size_t c : cmins) {
    const auto cc = static_cast<std::int64_t>(c);
    const Rational bl = Rational(sum_d, cc) - Rational(static_cast<std::int64_t>(n));
    const Rational bnl = Rational(D, cc) - Rational(1) - bl;
    if (bl <= 0 || bl >= h.v_pure.bl) continue;
    const RationalPoint hp{bl, bnl};
    if (std::find(h.hinges.begin(), h.hinges.end(), hp) == h.hinges.end()) h.hinges.push_back(hp);
  }
  return h;
}

std::vector<RationalPoint> upper_hull(std::vector<RationalPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.bl < b.bl || (a.bl == b.bl && a.bnl > b.bnl);
  });
  std::vector<RationalPoint> hull;
  for (const auto& p : pts) {
    if (!hull.empty() && hull.back().bl == p.bl) continue;  // keep the highest at each B_L
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const Rational cross = (b.bl - a.bl) * (p.bnl - a.bnl) - (b.bnl - a.bnl) * (p.bl - a.bl);
      if (cross >= 0) hull.pop_back();  // b is on or below the chord a-p
      else break;
    }
    hull.push_back(p);
  }
  return hull;
}

EnvelopeCurve qc_envelope(const TierSpec& tier) {
  const auto h = qc_candidates(tier);
  std::vector<RationalPoint> pts = h.hinges;
  pts.push_back(h.v_cor);
  pts.push_back(h.v_pure);
  return polyline(upper_hull(std::move(pts)), "QC:" + std::to_string(tier.m));
}

// ---------------------------------------------------------------------------

namespace {

struct Marginals {
  std::vector<std::vector<double>> m;
};

// digit table: digits[i * n + k] is the k-th digit of joint index i
std::vector<std::size_t> digit_table(const DimensionProfile& dims) {
  const std::size_t n = dims.size(), D = dims.total();
  std::vector<std::size_t> t(D * n);
  for (std::size_t i = 0; i < D; ++i) {
    std::size_t rest = i;
    for (std::size_t k = n; k-- > 0;) {
      t[i * n + k] = rest % dims[k];
      rest /= dims[k];
    }
  }
  return t;
}

class ClassicalProblem {
 public:
  explicit ClassicalProblem(const DimensionProfile& dims)
      : dims_(dims), n_(dims.size()), D_(dims.total()), digits_(digit_table(dims)) {
    for (std::size_t k = 0; k < n_; ++k) max_bl_ += static_cast<double>(dims[k]) - 1.0;
  }

  std::size_t size() const { return D_; }
  double max_bl() const { return max_bl_; }

  std::vector<std::vector<double>> marginals(std::span<const double> p) const {
    std::vector<std::vector<double>> m(n_);
    for (std::size_t k = 0; k < n_; ++k) m[k].assign(dims_[k], 0.0);
    for (std::size_t i = 0; i < D_; ++i)
      for (std::size_t k = 0; k < n_; ++k) m[k][digits_[i * n_ + k]] += p[i];
    return m;
  }

  // Budgets as squared deviations from uniform, which keeps B_L accurate
  // near zero where d sum m^2 - 1 cancels.
  double bl(std::span<const double> p) const {
    const auto m = marginals(p);
    double s = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      double q = 0.0;
      const double u = 1.0 / static_cast<double>(dims_[k]);
      for (double x : m[k]) q += (x - u) * (x - u);
      s += static_cast<double>(dims_[k]) * q;
    }
    return s;
  }

  double total(std::span<const double> p) const {
    double q = 0.0;
    const double u = 1.0 / static_cast<double>(D_);
    for (double x : p) q += (x - u) * (x - u);
    return static_cast<double>(D_) * q;
  }

  double bnl(std::span<const double> p) const { return total(p) - bl(p); }

  // B_NL - w (B_L - T)^2 and its gradient
  double penalised(std::span<const double> p, double target, double w, std::vector<double>* grad) const {
    const auto m = marginals(p);
    double blv = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      double q = 0.0;
      const double u = 1.0 / static_cast<double>(dims_[k]);
      for (double x : m[k]) q += (x - u) * (x - u);
      blv += static_cast<double>(dims_[k]) * q;
    }
    const double dev = blv - target;
    if (grad) {
      grad->assign(D_, 0.0);
      const double f = 1.0 + 2.0 * w * dev;
      for (std::size_t i = 0; i < D_; ++i) {
        double gbl = 0.0;
        for (std::size_t k = 0; k < n_; ++k) gbl += 2.0 * static_cast<double>(dims_[k]) * m[k][digits_[i * n_ + k]];
        (*grad)[i] = 2.0 * static_cast<double>(D_) * p[i] - f * gbl;
      }
    }
    return total(p) - blv - w * dev * dev;
  }

  // Iterative proportional fitting towards uniform marginals. Falls back to
  // the uniform distribution when the support cannot carry them.
  std::vector<double> uniformise(const std::vector<double>& p) const {
    std::vector<double> e(p);
    for (int it = 0; it < 500; ++it) {
      double err = 0.0;
      for (std::size_t k = 0; k < n_; ++k) {
        const auto m = marginals(e);
        const double u = 1.0 / static_cast<double>(dims_[k]);
        for (std::size_t j = 0; j < dims_[k]; ++j) {
          if (m[k][j] <= 0.0) return std::vector<double>(D_, 1.0 / static_cast<double>(D_));
          err = std::max(err, std::abs(m[k][j] - u));
        }
        for (std::size_t i = 0; i < D_; ++i) e[i] *= u / m[k][digits_[i * n_ + k]];
      }
      if (err < 1e-15) return e;
    }
    return std::vector<double>(D_, 1.0 / static_cast<double>(D_));
  }

  // Moves p onto B_L = target exactly. Mixing with any distribution of
  // uniform marginals scales B_L by (1-t)^2; mixing towards a point mass
  // raises it.
  void polish(std::vector<double>& p, double target) const {
    // B_L is quadratic in the marginal error, so no early exit above target
    const double cur = bl(p);
    if (cur > target) {
      const double keep = std::sqrt(std::max(0.0, target) / cur);
      const auto e = uniformise(p);
      for (std::size_t i = 0; i < D_; ++i) p[i] = keep * p[i] + (1.0 - keep) * e[i];
      return;
    }
    if (target - cur < 1e-15) return;
    const std::size_t top = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    auto mix = [&](double t) {
      std::vector<double> q(p);
      for (auto& x : q) x *= (1.0 - t);
      q[top] += t;
      return q;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (bl(mix(mid)) < target ? lo : hi) = mid;
    }
    p = mix(hi);
  }

  const DimensionProfile& dims() const { return dims_; }
  std::size_t digit(std::size_t i, std::size_t k) const { return digits_[i * n_ + k]; }

 private:
  DimensionProfile dims_;
  std::size_t n_, D_;
  std::vector<std::size_t> digits_;
  double max_bl_ = 0.0;
};

void project_simplex(std::vector<double>& v) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    css += u[j];
    const double t = (css - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (auto& x : v) x = std::max(0.0, x - theta);
}

// Projected gradient ascent with Armijo backtracking on a fixed penalty weight.
void ascend(const ClassicalProblem& pb, std::vector<double>& p, double target, double w, int iters) {
  std::vector<double> g, trial(p.size());
  double f = pb.penalised(p, target, w, &g);
  double step = 1.0 / (2.0 * static_cast<double>(pb.size()) * (1.0 + w));
  for (int it = 0; it < iters; ++it) {
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t i = 0; i < p.size(); ++i) trial[i] = p[i] + step * g[i];
      project_simplex(trial);
      double lin = 0.0, dist = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        lin += g[i] * (trial[i] - p[i]);
        dist += (trial[i] - p[i]) * (trial[i] - p[i]);
      }
      if (dist < 1e-30) break;
      const double ft = pb.penalised(trial, target, w, nullptr);
      if (ft >= f + 1e-4 * lin) {
        p.swap(trial);
        f = pb.penalised(p, target, w, &g);
        moved = true;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
}

// Ascent on B_NL restricted to the constraint surface: every trial point is
// polished back onto B_L = target before it is compared.
void ascend_on_surface(const ClassicalProblem& pb, std::vector<double>& p, double target, int iters) {
  pb.polish(p, target);
  std::vector<double> g, trial;
  double f = pb.bnl(p);
  double step = 0.05;
  for (int it = 0; it < iters; ++it) {
    pb.penalised(p, target, 0.0, &g);
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt) {
      trial = p;
      for (std::size_t i = 0; i < p.size(); ++i) trial[i] += step * g[i];
      project_simplex(trial);
      pb.polish(trial, target);
      const double ft = pb.bnl(trial);
      if (ft > f + 1e-15) {
        p.swap(trial);
        f = ft;
        moved = true;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
}

std::vector<double> optimise_from(const ClassicalProblem& pb, std::vector<double> p, double target, int iterations) {
  static constexpr double kWeights[] = {1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  const int per_stage = std::max(iterations / 10, 20);
  for (double w : kWeights) ascend(pb, p, target, w, per_stage);
  ascend_on_surface(pb, p, target, std::max(iterations - 7 * per_stage, 100));
  return p;
}

// Quantile (north-west corner) coupling of the given marginals.
std::vector<double> comonotone(const ClassicalProblem& pb, std::vector<std::vector<double>> m) {
  const auto& dims = pb.dims();
  const std::size_t n = dims.size();
  std::vector<double> p(pb.size(), 0.0);
  std::vector<std::size_t> at(n, 0);
  for (int guard = 0; guard < 10000; ++guard) {
    double mass = 1.0;
    for (std::size_t k = 0; k < n; ++k) mass = std::min(mass, m[k][at[k]]);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) idx = idx * dims[k] + at[k];
    p[idx] += mass;
    bool done = false;
    for (std::size_t k = 0; k < n; ++k) {
      m[k][at[k]] -= mass;
      if (m[k][at[k]] <= 1e-15) {
        if (at[k] + 1 < dims[k]) ++at[k];
        else done = true;
      }
    }
    if (done) break;
  }
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= s;
  return p;
}

std::vector<std::vector<double>> structured_seeds(const ClassicalProblem& pb, double target) {
  const auto& dims = pb.dims();
  const std::size_t n = dims.size();
  std::vector<std::vector<double>> seeds;
  const double lam = pb.max_bl() > 0.0 ? std::sqrt(std::clamp(target / pb.max_bl(), 0.0, 1.0)) : 0.0;
  // couplings of marginals (1 - lam) u + lam e_j, the peak placed first or last
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::vector<double>> m(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double d = static_cast<double>(dims[k]);
      m[k].assign(dims[k], (1.0 - lam) / d);
      m[k][(mask >> k) & 1 ? dims[k] - 1 : 0] += lam;
    }
    seeds.push_back(comonotone(pb, m));
  }
  // peaked diagonal: mass on |k...k>, k < d_1, tilted towards |0...0>
  for (double tilt : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    std::vector<double> p(pb.size(), 0.0);
    for (std::size_t k = 0; k < dims[0]; ++k) {
      std::size_t idx = 0;
      for (std::size_t s = 0; s < n; ++s) idx = idx * dims[s] + k;
      p[idx] += (1.0 - tilt) / static_cast<double>(dims[0]);
    }
    p[0] += tilt;
    seeds.push_back(std::move(p));
  }
  return seeds;
}

}  // namespace

double classical_local_budget(const DimensionProfile& dims, std::span<const double> p) {
  if (p.size() != dims.total()) throw DomainError("distribution length does not match dims");
  return ClassicalProblem(dims).bl(p);
}

double classical_nonlocal_budget(const DimensionProfile& dims, std::span<const double> p) {
  if (p.size() != dims.total()) throw DomainError("distribution length does not match dims");
  return ClassicalProblem(dims).bnl(p);
}

CnPoint cn_point(const DimensionProfile& dims, double target_bl, const CnOptions& options, std::uint64_t index) {
  const ClassicalProblem pb(dims);
  if (!(target_bl >= -1e-12 && target_bl <= pb.max_bl() + 1e-12)) throw DomainError("cn_envelope: B_L outside [0, sum(d_k - 1)]");
  target_bl = std::clamp(target_bl, 0.0, pb.max_bl());

  std::vector<std::vector<double>> starts = structured_seeds(pb, target_bl);
  CounterRng rng(options.seed, index);
  for (int s = 0; s < options.starts; ++s) {
    std::vector<double> p(pb.size());
    double sum = 0.0;
    for (auto& x : p) sum += (x = rng.exponential());
    for (auto& x : p) x /= sum;
    starts.push_back(std::move(p));
  }

  CnPoint best;
  best.bl = target_bl;
  best.bnl = -1.0;
  std::vector<double> values;
  for (auto& s : starts) {
    auto p = optimise_from(pb, std::move(s), target_bl, options.iterations);
    const double v = pb.bnl(p);
    values.push_back(v);
    if (v > best.bnl) {
      best.bnl = v;
      best.distribution = std::move(p);
    }
  }
  int agree = 0;
  for (double v : values) agree += v >= best.bnl - 1e-7;
  best.converged = agree >= 2;
  return best;
}

void cn_neighbour_pass(const DimensionProfile& dims, std::vector<CnPoint>& points, const CnOptions& options) {
  const ClassicalProblem pb(dims);
  for (int sweep = 0; sweep < 10; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j : {i - 1, i + 1}) {
        if (j >= points.size()) continue;
        auto p = optimise_from(pb, points[j].distribution, points[i].bl, options.iterations);
        const double v = pb.bnl(p);
        if (v > points[i].bnl + 1e-12) {
          points[i].bnl = v;
          points[i].distribution = std::move(p);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
}

CnResult assemble_cn(const DimensionProfile& dims, std::vector<CnPoint> points) {
  CnResult r;
  r.dims = dims;
  std::vector<Vec2> pts;
  for (const auto& p : points) pts.push_back({p.bl, p.bnl});
  r.curve = polyline(pts, "C");
  r.points = std::move(points);
  return r;
}

std::vector<double> cn_default_grid(const DimensionProfile& dims, int n) {
  double top = 0.0;
  for (std::size_t k = 0; k < dims.size(); ++k) top += static_cast<double>(dims[k]) - 1.0;
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(top * i / std::max(n - 1, 1));
  return g;
}

CnResult cn_envelope(const DimensionProfile& dims, const std::vector<double>& bl_grid, const CnOptions& options) {
  std::vector<CnPoint> pts;
  for (std::size_t i = 0; i < bl_grid.size(); ++i) pts.push_back(cn_point(dims, bl_grid[i], options, i));
  if (options.neighbour_pass) cn_neighbour_pass(dims, pts, options);
  return assemble_cn(dims, std::move(pts));
}

// ---------------------------------------------------------------------------

EnvelopeCurve feasibility_wall(const DimensionProfile& dims) {
  const std::size_t n = dims.size();
  std::vector<RationalPoint> v;
  for (std::size_t k = 0; k < n; ++k) {
    std::int64_t bl = 0, prod = 1;
    for (std::size_t j = k; j < n; ++j) {
      bl += static_cast<std::int64_t>(dims[j]) - 1;
      prod *= static_cast<std::int64_t>(dims[j]);
    }
    v.push_back({Rational(bl), Rational(prod - 1 - bl)});
  }
  return polyline(v, "wall");
}

std::vector<cplx> find_null_anchor(std::size_t d, CounterRng& rng, int restarts, double tol) {
  const ComplexMatrix u = spin_flip(d);
  // only the symmetric part of U survives in psi^T U psi
  const ComplexMatrix s = 0.5 * (u + u.transpose());
  auto overlap = [&](const std::vector<cplx>& psi, std::vector<cplx>* spsi) {
    cplx w = 0.0;
    std::vector<cplx> sp(d);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) sp[a] += s(a, b) * psi[b];
      w += psi[a] * sp[a];
    }
    if (spsi) *spsi = std::move(sp);
    return w;
  };
  std::vector<cplx> best;
  double best_f = 1e300;
  for (int r = 0; r < restarts && best_f > 1e-24; ++r) {
    auto psi = haar_vector(d, rng);
    std::vector<cplx> sp;
    cplx w = overlap(psi, &sp);
    double f = std::norm(w);
    double eta = 0.5;
    for (int it = 0; it < 2000 && f > 1e-28; ++it) {
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        std::vector<cplx> trial(d);
        double nrm = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
          trial[a] = psi[a] - 2.0 * eta * w * std::conj(sp[a]);
          nrm += std::norm(trial[a]);
        }
        for (auto& z : trial) z /= std::sqrt(nrm);
        std::vector<cplx> tsp;
        const cplx tw = overlap(trial, &tsp);
        if (std::norm(tw) < f) {
          psi = std::move(trial);
          sp = std::move(tsp);
          w = tw;
          f = std::norm(w);
          eta *= 1.5;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;
    }
    if (f < best_f) {
      best_f = f;
      best = psi;
    }
  }
  if (!(best_f < tol)) throw NumericalError("anchor search: no time-reversal-null state found for d=" + std::to_string(d));
  return best;
}

WallTrace trace_wall(const DimensionProfile& dims, int steps_per_phase, std::uint64_t seed) {
  if (steps_per_phase < 2) throw DomainError("trace_wall: need at least two steps per phase");
  const std::size_t n = dims.size();
  if (n < 2) throw DomainError("trace_wall: need at least two subsystems");
  WallTrace tr;
  CounterRng rng(seed, 0);
  ComplexMatrix rho0 = ComplexMatrix::identity(1);
  for (std::size_t k = 0; k < n; ++k) {
    CounterRng sub = rng.split(k);
    const auto psi = find_null_anchor(dims[k], sub);
    const auto local = ComplexMatrix::outer(psi);
    tr.max_anchor_overlap = std::max(tr.max_anchor_overlap, time_reversal_overlap(local));
    rho0 = kron(rho0, local);
  }
  DensityMatrix start = DensityMatrix::validate(rho0, dims);

  std::vector<Vec2> verts{{budget_decompose(start).BL, budget_decompose(start).BNL}};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::vector<BudgetPoint> phase;
    const std::vector<std::size_t> target{k};
    for (int i = 0; i < steps_per_phase; ++i) {
      const double p = static_cast<double>(i) / (steps_per_phase - 1);
      phase.push_back(budget_decompose(apply(make_channel(ChannelKind::Depolarizing, p, dims, target), start)));
    }
    start = apply(make_channel(ChannelKind::Depolarizing, 1.0, dims, target), start);
    verts.push_back({phase.back().BL, phase.back().BNL});
    tr.phases.push_back(std::move(phase));
  }
  tr.curve = polyline(verts, "wall-trace");
  return tr;
}

// ---------------------------------------------------------------------------

double frustrated_curve_23(double bnl) {
  if (!(bnl >= 2.0 - 1e-12 && bnl <= 4.5 + 1e-12)) throw DomainError("frustrated curve: B_NL outside [2, 9/2]");
  bnl = std::clamp(bnl, 2.0, 4.5);
  return bnl + 2.0 - std::sqrt(8.0 * bnl);
}

EnvelopeCurve frustrated_curve_23_curve(int segments) {
  std::vector<Vec2> pts;
  for (int i = 0; i <= segments; ++i) {
    const double bnl = 2.0 + 2.5 * i / segments;
    pts.push_back({frustrated_curve_23(bnl), bnl});
  }
  return polyline(pts, "frustrated");
}

DensityMatrix frustrated_ansatz(double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("frustrated ansatz: w outside [0,1]");
  const DimensionProfile dims{2, 3};
  ComplexMatrix m(6, 6);
  // |Phi+> = (|00> + |11>)/sqrt(2), indices 0 and 4
  for (std::size_t a : {0u, 4u})
    for (std::size_t b : {0u, 4u}) m(a, b) = w / 2.0;
  m(2, 2) += (1.0 - w) / 2.0;
  m(5, 5) += (1.0 - w) / 2.0;
  return DensityMatrix::validate(m, dims);
}

// ---------------------------------------------------------------------------

EnvelopeSet make_envelope_set(const DimensionProfile& dims, int cn_grid) {
  if (dims.size() < 2) throw DomainError("envelopes need at least two subsystems");
  EnvelopeSet s;
  s.dims = dims;
  if (dims == DimensionProfile{2, 2}) s.classical = classical_envelope_2q_curve();
  else s.classical = cn_envelope(dims, cn_default_grid(dims, cn_grid)).curve;
  for (std::size_t m = 1; m < dims.size(); ++m) s.qc.push_back(qc_envelope({dims, m}));
  s.wall = feasibility_wall(dims);
  return s;
}

bool RegionReport::has(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

RegionReport classify(const BudgetPoint& pt, const EnvelopeSet& env) {
  const auto& dims = env.dims;
  const std::size_t D = dims.total();
  const std::size_t n = dims.size();
  RegionReport rep;

  auto above = [&](const EnvelopeCurve& c, const std::string& name) {
    const auto xy = to_rationalised(c, D);
    if (auto y = curve_y(xy, pt.X)) rep.margins[name] = pt.Y - *y;
    const auto v = curve_value(c, pt.BL);
    return v && pt.BNL > *v + kClassifyTol;
  };

  double max_bl = 0.0;
  for (std::size_t k = 0; k < n; ++k) max_bl += static_cast<double>(dims[k]) - 1.0;
  rep.margins["radius"] = 1.0 - pt.R;
  bool unphysical = pt.R > 1.0 + 1e-10 || pt.BL > max_bl + kClassifyTol;
  if (auto xw = curve_x(to_rationalised(env.wall, D), pt.Y)) {
    rep.margins["wall"] = *xw - pt.X;
    unphysical = unphysical || *xw - pt.X < -kClassifyTol;
  }

  const bool above_c = above(env.classical, "C");
  std::vector<bool> above_qc;
  for (std::size_t m = 1; m <= env.qc.size(); ++m) above_qc.push_back(above(env.qc[m - 1], "QC:" + std::to_string(m)));
  const bool two_qubits = dims == DimensionProfile{2, 2};
  if (two_qubits) {
    if (auto y = curve_y(to_rationalised(chsh_guarantee_2q_curve(), D), pt.X)) rep.margins["chsh-guarantee"] = pt.Y - *y;
  }

  if (unphysical) {
    rep.flags.push_back("unphysical");
    return rep;
  }
  const bool abs_sep = n == 2 ? pt.R <= 1.0 / (static_cast<double>(D) - 1.0) + kClassifyTol : pt.B <= kClassifyTol;
  if (abs_sep) rep.flags.push_back("absolutely-separable");
  if (!above_c) rep.flags.push_back("classically-feasible");
  if (above_c) rep.flags.push_back("guaranteed-discord");
  for (std::size_t m = 1; m <= above_qc.size(); ++m)
    if (above_qc[m - 1]) rep.flags.push_back(n == 2 ? "guaranteed-npt" : "guaranteed-npt:" + std::to_string(m));
  if (n >= 3 && above_qc.back()) rep.flags.push_back("guaranteed-gme");
  if (two_qubits) {
    if (pt.BNL > 1.0 + kClassifyTol) {
      rep.flags.push_back("steerable-guaranteed");
      rep.flags.push_back("chsh-possible");
    }
    if (pt.BNL > 1.5 + kClassifyTol) rep.flags.push_back("chsh-guaranteed");
  }
  return rep;
}

}  // namespace budgetlab
