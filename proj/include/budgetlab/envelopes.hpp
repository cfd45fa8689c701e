#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "budgetlab/budget.hpp"
#include "budgetlab/states.hpp"

namespace budgetlab {

using Rational = boost::rational<std::int64_t>;

struct RationalPoint {
  Rational bl;
  Rational bnl;
  friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
};

std::string to_string(const Rational& q);

enum class Plane { Budget, Rationalised };
std::string plane_name(Plane p);

using Vec2 = std::array<double, 2>;

/// Either a segment v0 -> v1 or the arc a X^2 + b Y^2 = c restricted to
/// x_range x y_range. Budget-plane curves use segments only; an XY arc is
/// the image of one budget-plane segment.
struct Piece {
  enum class Kind { Segment, Arc };
  Kind kind = Kind::Segment;
  Vec2 v0{}, v1{};
  double a = 0.0, b = 0.0, c = 0.0;
  Vec2 x_range{}, y_range{};
};

struct EnvelopeCurve {
  Plane plane = Plane::Budget;
  std::vector<Piece> pieces;
  std::string label;
  /// Exact vertices when the construction is rational (budget plane).
  std::vector<RationalPoint> vertices;
};

EnvelopeCurve polyline(const std::vector<Vec2>& pts, std::string label);
EnvelopeCurve polyline(const std::vector<RationalPoint>& pts, std::string label);

/// Budget-plane line c1 B_L + c2 B_NL = c3 through two points.
struct BudgetLine {
  double c1, c2, c3;
};
BudgetLine line_through(const Vec2& p, const Vec2& q);
/// Image of a budget-plane line in XY: (D-1)(c1+c3) X^2 + (D-1)(c2+c3) Y^2 = c3 D.
std::array<double, 3> line_to_arc(const BudgetLine& line, std::size_t D);
/// Inverse of line_to_arc.
BudgetLine arc_to_line(double a, double b, double c, std::size_t D);

/// Budget-plane point -> (X, Y), and back.
Vec2 to_xy(const Vec2& budget, std::size_t D);
Vec2 to_budget(const Vec2& xy, std::size_t D);

EnvelopeCurve to_rationalised(const EnvelopeCurve& curve, std::size_t D);
EnvelopeCurve to_budget_plane(const EnvelopeCurve& curve, std::size_t D);

/// Upper value B_NL of a budget-plane curve at B_L (interpolating its
/// non-vertical segments); nothing outside its B_L range.
std::optional<double> curve_value(const EnvelopeCurve& curve, double bl);
/// Y of an XY curve at X (non-vertical pieces); nothing outside its range.
std::optional<double> curve_y(const EnvelopeCurve& curve, double x);
/// X of an XY curve at Y (pieces with a != 0); nothing outside its range.
std::optional<double> curve_x(const EnvelopeCurve& curve, double y);

/// Samples an XY or budget-plane curve as (x, y) pairs, `per_piece` points per piece.
std::vector<Vec2> sample_curve(const EnvelopeCurve& curve, int per_piece);

// ---------------------------------------------------------------------------
// Two-qubit analytic curves (XY plane).

/// sqrt(2/3 - X^2/2) on [0, sqrt(2/3)].
double classical_envelope_2q(double X);
/// sqrt(4/5 - 3X^2/5): states strictly above violate CHSH.
double chsh_guarantee_2q(double X);
/// Radius R below which every two-qubit state is separable.
inline constexpr double separability_radius() { return 1.0 / 3.0; }
/// X^2 of the Q = 0 wall.
inline constexpr double q_wall_2q() { return 2.0 / 3.0; }

EnvelopeCurve classical_envelope_2q_curve();
EnvelopeCurve chsh_guarantee_2q_curve();

// ---------------------------------------------------------------------------

/// m quantum subsystems out of n; m = 0 denotes the all-classical tier.
struct TierSpec {
  DimensionProfile dims;
  std::size_t m = 1;
};

/// Exact Q^m C^(n-m) envelope in the budget plane.
EnvelopeCurve qc_envelope(const TierSpec& tier);

struct HullInputs {
  RationalPoint v_pure;
  RationalPoint v_cor;
  std::vector<RationalPoint> hinges;  // after the discard rule and dedupe
};
HullInputs qc_candidates(const TierSpec& tier);
/// Upper concave hull of points sorted by B_L (slopes non-increasing).
std::vector<RationalPoint> upper_hull(std::vector<RationalPoint> pts);

// ---------------------------------------------------------------------------
// All-classical envelope: maximise B_NL over joint distributions at fixed B_L.

struct CnOptions {
  int starts = 64;
  int iterations = 4000;
  std::uint64_t seed = 0x5EEDC0DEULL;
  bool neighbour_pass = true;
};

struct CnPoint {
  double bl = 0.0;
  double bnl = 0.0;
  bool converged = false;
  std::vector<double> distribution;
};

struct CnResult {
  DimensionProfile dims;
  std::vector<CnPoint> points;
  EnvelopeCurve curve;
};

/// B_L of a joint distribution over the product alphabet.
double classical_local_budget(const DimensionProfile& dims, std::span<const double> p);
double classical_nonlocal_budget(const DimensionProfile& dims, std::span<const double> p);

/// Best B_NL at one B_L target; the rng stream is fixed by (options.seed, index).
CnPoint cn_point(const DimensionProfile& dims, double target_bl, const CnOptions& options, std::uint64_t index);
/// Evaluates the grid (serial); see kernels for the parallel variant.
CnResult cn_envelope(const DimensionProfile& dims, const std::vector<double>& bl_grid, const CnOptions& options = {});
/// Re-seeds each grid point from its neighbours' optimisers until nothing improves.
void cn_neighbour_pass(const DimensionProfile& dims, std::vector<CnPoint>& points, const CnOptions& options);
CnResult assemble_cn(const DimensionProfile& dims, std::vector<CnPoint> points);
/// Uniform grid over [0, sum(d_k - 1)].
std::vector<double> cn_default_grid(const DimensionProfile& dims, int n);

// ---------------------------------------------------------------------------
// Feasibility (Q = 0) walls.

/// Exact wall from a time-reversal-null pure product: subsystems are
/// depolarised one at a time, smallest first. Vertex k has the first k
/// subsystems maximally mixed.
EnvelopeCurve feasibility_wall(const DimensionProfile& dims);

/// Pure local state with tr(psi psi~) below `tol`, found by gradient descent
/// from Haar-random starts.
std::vector<cplx> find_null_anchor(std::size_t d, CounterRng& rng, int restarts = 100, double tol = 1e-8);

struct WallTrace {
  std::vector<std::vector<BudgetPoint>> phases;  // one trajectory per depolarised subsystem
  EnvelopeCurve curve;                           // segment per phase, from the endpoints
  double max_anchor_overlap = 0.0;
};

/// Numeric trace with searched anchors and explicit channel application.
WallTrace trace_wall(const DimensionProfile& dims, int steps_per_phase, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Qubit-qutrit specials.

/// B_L = B_NL + 2 - sqrt(8 B_NL) for B_NL in [2, 9/2].
double frustrated_curve_23(double bnl);
EnvelopeCurve frustrated_curve_23_curve(int segments = 64);
/// w |Phi+><Phi+| + (1 - w) I/2 x |2><2| on 2x3.
DensityMatrix frustrated_ansatz(double w);

// ---------------------------------------------------------------------------
// Region classification.

struct EnvelopeSet {
  DimensionProfile dims;
  EnvelopeCurve classical;            // budget plane
  std::vector<EnvelopeCurve> qc;      // qc[m-1] for m = 1..n-1
  EnvelopeCurve wall;                 // budget plane
};

/// The classical envelope is analytic for 2x2 and numeric (cn_envelope on
/// `cn_grid` points) otherwise.
EnvelopeSet make_envelope_set(const DimensionProfile& dims, int cn_grid = 41);

struct RegionReport {
  std::vector<std::string> flags;
  std::map<std::string, double> margins;  // positive = above an envelope / inside a wall
  bool has(const std::string& flag) const;
};

/// Tolerance on boundary comparisons.
inline constexpr double kClassifyTol = 1e-9;

RegionReport classify(const BudgetPoint& point, const EnvelopeSet& envelopes);

}  // namespace budgetlab
