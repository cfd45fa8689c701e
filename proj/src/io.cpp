#include "budgetlab/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

namespace budgetlab::io {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string opt_csv(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

void banner(std::ostream& os, const std::string& kind) { os << "# budgetlab " << kind << " csv v" << kCsvVersion << '\n'; }

json vec(const Vec2& v) { return json::array({v[0], v[1]}); }

}  // namespace

json to_json(const BudgetPoint& p) {
  return {{"P", p.P}, {"Q", opt(p.Q)}, {"B", p.B}, {"BL", p.BL}, {"BNL", p.BNL},
          {"X", p.X}, {"Y", p.Y},      {"R", p.R}, {"theta", opt(p.theta)}};
}

json to_json(const ResourceReport& r) {
  json j{{"negativity", r.negativity}};
  if (r.negativity_ceiling) j["negativity_ceiling"] = *r.negativity_ceiling;
  if (r.discord) j["discord"] = *r.discord;
  if (r.discord_bounds) {
    j["discord_lower"] = r.discord_bounds->lower;
    j["discord_tight_upper"] = r.discord_bounds->tight_upper;
    j["discord_absolute_upper"] = r.discord_bounds->absolute_upper;
  }
  if (r.chsh_max) j["chsh_max"] = *r.chsh_max;
  if (r.steering) {
    j["steering_S3"] = r.steering->S3;
    j["steerable"] = r.steering->steerable;
  }
  if (r.magic) j["magic"] = *r.magic;
  if (r.magic_bounds) {
    j["magic_lower"] = r.magic_bounds->lower;
    j["magic_upper"] = r.magic_bounds->upper;
  }
  return j;
}

json to_json(const RegionReport& r) {
  json j{{"flags", r.flags}};
  for (const auto& [k, v] : r.margins) j["margin_" + k] = v;
  return j;
}

json to_json(const EnvelopeCurve& c) {
  json pieces = json::array();
  for (const auto& p : c.pieces) {
    if (p.kind == Piece::Kind::Segment) {
      pieces.push_back({{"type", "segment"}, {"v0", vec(p.v0)}, {"v1", vec(p.v1)}});
    } else {
      pieces.push_back({{"type", "arc"}, {"a", p.a}, {"b", p.b}, {"c", p.c}, {"x_range", vec(p.x_range)},
                        {"y_range", vec(p.y_range)}, {"v0", vec(p.v0)}, {"v1", vec(p.v1)}});
    }
  }
  json j{{"label", c.label}, {"plane", plane_name(c.plane)}, {"pieces", pieces}};
  if (!c.vertices.empty()) {
    json v = json::array();
    for (const auto& q : c.vertices) v.push_back({to_string(q.bl), to_string(q.bnl)});
    j["vertices"] = v;
  }
  return j;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  banner(os, "trajectory");
  os << "# channel=" << t.channel << " state=" << t.initial_state << '\n';
  os << "step,p,P,Q,B,BL,BNL,X,Y,R,theta\n";
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const auto& s = t.samples[i];
    const auto& q = s.point;
    os << i << ',' << fmt(s.p) << ',' << fmt(q.P) << ',' << opt_csv(q.Q) << ',' << fmt(q.B) << ',' << fmt(q.BL) << ','
       << fmt(q.BNL) << ',' << fmt(q.X) << ',' << fmt(q.Y) << ',' << fmt(q.R) << ',' << opt_csv(q.theta) << '\n';
  }
}

void write_profile_csv(std::ostream& os, const std::vector<ProfilePoint>& pts) {
  banner(os, "profile");
  os << "theta,value,ceiling\n";
  for (const auto& p : pts) os << fmt(p.theta) << ',' << (p.found ? fmt(p.value) : "") << ',' << fmt(p.ceiling) << '\n';
}

void write_curve_csv(std::ostream& os, const EnvelopeCurve& c, int per_piece) {
  banner(os, "curve");
  os << "# label=" << c.label << " plane=" << plane_name(c.plane) << '\n';
  os << (c.plane == Plane::Budget ? "BL,BNL\n" : "X,Y\n");
  for (const auto& p : sample_curve(c, per_piece)) os << fmt(p[0]) << ',' << fmt(p[1]) << '\n';
}

void write_cloud_header(std::ostream& os) {
  banner(os, "cloud");
  os << "family,P,Q,B,BL,BNL,X,Y,R,theta\n";
}

void write_cloud_rows(std::ostream& os, const std::string& family, const std::vector<BudgetPoint>& pts) {
  for (const auto& q : pts)
    os << family << ',' << fmt(q.P) << ',' << opt_csv(q.Q) << ',' << fmt(q.B) << ',' << fmt(q.BL) << ',' << fmt(q.BNL)
       << ',' << fmt(q.X) << ',' << fmt(q.Y) << ',' << fmt(q.R) << ',' << opt_csv(q.theta) << '\n';
}

// ---------------------------------------------------------------------------

json state_to_json(const DensityMatrix& rho) {
  const auto& m = rho.matrix();
  json re = json::array(), im = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json a = json::array(), b = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      a.push_back(m(i, j).real());
      b.push_back(m(i, j).imag());
    }
    re.push_back(std::move(a));
    im.push_back(std::move(b));
  }
  return {{"dims", rho.dims().dims()}, {"re", re}, {"im", im}};
}

DensityMatrix state_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("dims") || !doc.contains("re")) throw DomainError("state file needs \"dims\" and \"re\"");
  std::vector<std::size_t> d;
  try {
    d = doc.at("dims").get<std::vector<std::size_t>>();
  } catch (const json::exception&) {
    throw DomainError("state file: dims must be a list of integers");
  }
  const DimensionProfile dims(d);
  const std::size_t D = dims.total();
  const json& re = doc.at("re");
  const json* im = doc.contains("im") ? &doc.at("im") : nullptr;
  auto rows_ok = [&](const json& a) {
    if (!a.is_array() || a.size() != D) return false;
    for (const auto& r : a)
      if (!r.is_array() || r.size() != D) return false;
    return true;
  };
  if (!rows_ok(re) || (im && !rows_ok(*im))) throw DomainError("state file: re/im must be " + std::to_string(D) + "x" + std::to_string(D));
  ComplexMatrix m(D, D);
  try {
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = 0; j < D; ++j)
        m(i, j) = cplx(re[i][j].get<double>(), im ? (*im)[i][j].get<double>() : 0.0);
  } catch (const json::exception&) {
    throw DomainError("state file: matrix entries must be numbers");
  }
  return DensityMatrix::validate(m, dims);
}

DensityMatrix read_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open state file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DomainError("state file " + path + ": " + e.what());
  }
  return state_from_json(doc);
}

void write_state_file(const std::string& path, const DensityMatrix& rho) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << state_to_json(rho).dump(1) << '\n';
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& builtin_state_names() {
  static const std::vector<std::string> names{"bell",           "ghz",           "w",         "werner:p",    "product",
                                              "mixed-entangled", "mixed-separable", "classical", "chsh",        "maxmixed"};
  return names;
}

bool is_builtin_state(const std::string& spec) {
  if (spec.rfind("werner:", 0) == 0) return true;
  for (const auto& n : builtin_state_names())
    if (n == spec) return true;
  return false;
}

namespace {

void require_two_qubits(const std::string& name, const DimensionProfile& dims) {
  if (!(dims == DimensionProfile{2, 2})) throw DomainError(name + " is defined on 2,2 only");
}

}  // namespace

DensityMatrix builtin_state(const std::string& spec, const DimensionProfile& dims) {
  const std::size_t n = dims.size();
  if (spec.rfind("werner:", 0) == 0) {
    double p = 0.0;
    const auto s = spec.substr(7);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), p);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw DomainError("werner:p needs a number, got '" + s + "'");
    return werner(p, dims);
  }
  if (spec == "bell") {
    if (n != 2 || dims[0] != dims[1]) throw DomainError("bell needs a d,d profile");
    return maximally_entangled(dims[0]);
  }
  if (spec == "ghz") return ghz(dims);
  if (spec == "w") {
    if (!dims.all_qubits() || n < 2) throw DomainError("w needs an all-qubit profile");
    return w_state(n);
  }
  if (spec == "product") return basis_state(dims, std::vector<std::size_t>(n, 0));
  if (spec == "maxmixed") return DensityMatrix::maximally_mixed(dims);
  if (spec == "classical") {
    // uniform over |k...k>, k < d_1
    std::vector<double> p(dims.total(), 0.0);
    for (std::size_t k = 0; k < dims[0]; ++k) {
      std::size_t idx = 0;
      for (std::size_t s = 0; s < n; ++s) idx = idx * dims[s] + k;
      p[idx] = 1.0 / static_cast<double>(dims[0]);
    }
    return classical_state(dims, p);
  }
  if (spec == "mixed-entangled") {
    // 0.6 |Phi><Phi| + 0.4 |0 1 0 ... 0>
    std::vector<std::size_t> digits(n, 0);
    digits[1] = 1;
    const auto m = 0.6 * werner(1.0, dims).matrix() + 0.4 * basis_state(dims, digits).matrix();
    return DensityMatrix::validate(m, dims);
  }
  if (spec == "mixed-separable") return werner(0.9 / static_cast<double>(dims[0] + 1), dims);
  if (spec == "chsh") {
    require_two_qubits(spec, dims);
    return werner(0.8, dims);
  }
  throw DomainError("unknown state '" + spec + "'");
}

}  // namespace budgetlab::io
