// budgetlab command-line front end.
//
// Exit codes: 0 ok, 1 usage, 2 validation or domain error, 3 numerical
// failure, 4 an acceptance criterion failed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "budgetlab/acceptance.hpp"
#include "budgetlab/io.hpp"
#include "budgetlab/kernels.hpp"

using namespace budgetlab;
using io::json;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("BUDGETLAB_SEED");
  if (!env || !*env) return 1;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("BUDGETLAB_SEED must be an unsigned integer, got '") + env + "'");
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

DensityMatrix load_state(const std::string& spec, const DimensionProfile& dims) {
  return io::is_builtin_state(spec) ? io::builtin_state(spec, dims) : io::read_state_file(spec);
}

// Output sink: a file under --out, or stdout when no directory was given.
class Sink {
 public:
  explicit Sink(const std::string& dir) : dir_(dir) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  bool to_files() const { return !dir_.empty(); }

  std::ostream& open(const std::string& name) {
    if (!to_files()) return std::cout;
    file_.close();
    file_.open(fs::path(dir_) / name);
    if (!file_) throw DomainError("cannot write " + (fs::path(dir_) / name).string());
    file_.precision(17);
    return file_;
  }

  // recorded verbatim; no timestamps so reruns are byte-identical
  void manifest(const json& m) {
    if (!to_files()) return;
    std::ofstream f(fs::path(dir_) / "manifest.json");
    f << m.dump(1) << '\n';
  }

 private:
  std::string dir_;
  std::ofstream file_;
};

json manifest_base(const std::string& command, const DimensionProfile& dims, std::uint64_t seed, const std::string& out,
                   const std::string& format) {
  return {{"command", command}, {"dims", dims.dims()}, {"seed", seed}, {"output_directory", out}, {"format", format},
          {"csv_version", io::kCsvVersion}};
}

std::string help_footer() {
  std::string s = "Channels (kind:target, target = all or 0-based subsystem indices like 0,1):\n ";
  for (ChannelKind k : all_channel_kinds()) s += " " + channel_kind_name(k);
  s += "\nBuiltin states (or a JSON state file {dims, re, im}):\n ";
  for (const auto& n : io::builtin_state_names()) s += " " + n;
  s += "\nFamilies:\n ";
  for (Family f : methods_families()) s += " " + family_name(f);
  s += " wishart\nVerify suites:\n  all";
  for (const auto& n : acceptance::suite_names()) s += " " + n;
  s += "\nBUDGETLAB_SEED sets the default --seed.\n";
  return s;
}

std::pair<ChannelKind, std::vector<std::size_t>> parse_channel(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const auto kind = parse_channel_kind(name);
  if (!kind) throw UsageError("unknown channel '" + name + "'");
  std::vector<std::size_t> targets;
  if (colon != std::string::npos && spec.substr(colon + 1) != "all") {
    for (double t : parse_list(spec.substr(colon + 1))) {
      if (t < 0 || t != static_cast<double>(static_cast<std::size_t>(t))) throw UsageError("bad channel target in '" + spec + "'");
      targets.push_back(static_cast<std::size_t>(t));
    }
  }
  return {*kind, targets};
}

std::string supported_tiers(const DimensionProfile& dims) {
  std::string s = "c";
  for (std::size_t m = 1; m < dims.size(); ++m) s += ", qc:" + std::to_string(m);
  s += ", wall";
  if (dims == DimensionProfile{2, 2}) s += ", chsh";
  if (dims == DimensionProfile{2, 3}) s += ", frustrated";
  return s;
}

EnvelopeCurve build_envelope(const DimensionProfile& dims, const std::string& tier, int resolution, int iterations,
                             std::uint64_t seed) {
  const bool two_qubit = dims == DimensionProfile{2, 2};
  if (tier == "c") {
    if (two_qubit) return classical_envelope_2q_curve();
    CnOptions opt;
    opt.seed = seed;
    opt.iterations = iterations;
    return kernels::cn_envelope_parallel(dims, cn_default_grid(dims, resolution), opt).curve;
  }
  if (tier.rfind("qc:", 0) == 0) {
    const auto m = parse_list(tier.substr(3)).front();
    if (m >= 1 && m < static_cast<double>(dims.size()) && m == static_cast<std::size_t>(m))
      return qc_envelope({dims, static_cast<std::size_t>(m)});
  } else if (tier == "wall") {
    return feasibility_wall(dims);
  } else if (tier == "chsh" && two_qubit) {
    return chsh_guarantee_2q_curve();
  } else if (tier == "frustrated" && dims == DimensionProfile{2, 3}) {
    return frustrated_curve_23_curve(resolution);
  }
  throw DomainError("tier '" + tier + "' is not available for dims " + dims.to_string() + "; supported: " + supported_tiers(dims));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Purity budgets of multipartite states: locate, sample, bound and classify."};
  app.require_subcommand(1);
  app.footer(help_footer());

  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  std::string dims_text = "2,2", state, out, format = "csv";
  std::function<void()> action;

  auto common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--dims", dims_text, "Comma-separated local dimensions")->capture_default_str();
    if (with_out) sub->add_option("--out", out, "Output directory (stdout when omitted)");
  };

  // locate
  auto* locate = app.add_subcommand("locate", "Budget coordinates of one state");
  common(locate, false);
  locate->add_option("--state", state, "Builtin name or JSON state file")->required();
  locate->callback([&] {
    action = [&] {
      const auto dims = DimensionProfile::parse(dims_text);
      const auto rho = load_state(state, dims);
      const auto pt = budget_decompose(rho);
      auto rec = io::to_json(pt);
      // signed distance above each exact QC envelope
      for (std::size_t m = 1; m < rho.dims().size(); ++m)
        if (const auto v = curve_value(qc_envelope({rho.dims(), m}), pt.BL)) rec["above_QC:" + std::to_string(m)] = pt.BNL - *v;
      rec["dims"] = rho.dims().dims();
      rec["state"] = state;
      std::cout << rec.dump() << '\n';
    };
  });

  // sample
  auto* sample = app.add_subcommand("sample", "Monte Carlo point cloud of one ensemble");
  common(sample, true);
  std::string family;
  std::size_t count = 1000;
  sample->add_option("--family", family, "Ensemble name")->required();
  sample->add_option("--count", count, "Number of states")->capture_default_str();
  sample->add_option("--seed", seed, "Seed (default BUDGETLAB_SEED or 1)");
  sample->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
  sample->callback([&] {
    action = [&] {
      const auto dims = DimensionProfile::parse(dims_text);
      const auto f = parse_family(family);
      if (!f) throw UsageError("unknown family '" + family + "'");
      const auto pts = kernels::omp::sample_cloud(*f, dims, count, seed);
      Sink sink(out);
      auto& os = sink.open("cloud." + format);
      if (format == "csv") {
        io::write_cloud_header(os);
        io::write_cloud_rows(os, family, pts);
      } else {
        for (const auto& p : pts) {
          auto j = io::to_json(p);
          j["family"] = family;
          os << j.dump() << '\n';
        }
      }
      auto m = manifest_base("sample", dims, seed, out, format);
      m["family"] = family;
      m["count"] = count;
      sink.manifest(m);
    };
  });

  // envelope
  auto* envelope = app.add_subcommand("envelope", "Boundary curve of one tier (JSON pieces and a sampled CSV polyline)");
  common(envelope, true);
  std::string tier;
  int resolution = 41, iterations = CnOptions{}.iterations;
  envelope->add_option("--tier", tier, "c | qc:m | wall | chsh | frustrated")->required();
  envelope->add_option("--resolution", resolution, "Grid points (numeric tiers) and samples per piece")->capture_default_str()->check(CLI::Range(2, 100000));
  envelope->add_option("--seed", seed, "Seed for the numeric classical envelope");
  envelope->add_option("--iterations", iterations, "Ascent steps per start (numeric classical envelope)")->capture_default_str()->check(CLI::Range(1, 100000000));
  envelope->callback([&] {
    action = [&] {
      const auto dims = DimensionProfile::parse(dims_text);
      const auto curve = build_envelope(dims, tier, resolution, iterations, seed);
      const json doc{{"dims", dims.dims()}, {"tier", tier}, {"budget", io::to_json(curve)},
                     {"rationalised", io::to_json(to_rationalised(curve, dims.total()))}};
      Sink sink(out);
      std::string stem = tier;
      std::replace(stem.begin(), stem.end(), ':', '_');
      sink.open("envelope_" + stem + ".json") << doc.dump(1) << '\n';
      if (sink.to_files()) {
        io::write_curve_csv(sink.open("envelope_" + stem + "_budget.csv"), curve, resolution);
        io::write_curve_csv(sink.open("envelope_" + stem + "_xy.csv"), to_rationalised(curve, dims.total()), resolution);
      }
      auto m = manifest_base("envelope", dims, seed, out, "json+csv");
      m["tier"] = tier;
      m["resolution"] = resolution;
      m["iterations"] = iterations;
      sink.manifest(m);
    };
  });

  // evolve
  auto* evolve = app.add_subcommand("evolve", "Trajectory of a state under a channel family");
  common(evolve, true);
  std::string channel;
  int steps = kDefaultSweepSteps;
  evolve->add_option("--state", state, "Builtin name or JSON state file")->required();
  evolve->add_option("--channel", channel, "kind:target, or 'all' for the five noise models on every subsystem")->required();
  evolve->add_option("--steps", steps, "Strength grid size")->capture_default_str()->check(CLI::Range(2, 1000000));
  evolve->callback([&] {
    action = [&] {
      const auto dims = DimensionProfile::parse(dims_text);
      const auto rho = load_state(state, dims);
      std::vector<std::pair<ChannelKind, std::vector<std::size_t>>> runs;
      if (channel == "all")
        for (ChannelKind k : methods_channel_kinds()) runs.push_back({k, {}});
      else
        runs.push_back(parse_channel(channel));
      Sink sink(out);
      for (const auto& [kind, targets] : runs) {
        const auto tr = sweep(rho, kind, targets, steps, state);
        io::write_trajectory_csv(sink.open("trajectory_" + channel_kind_name(kind) + ".csv"), tr);
      }
      auto m = manifest_base("evolve", rho.dims(), seed, out, "csv");
      m["state"] = state;
      m["channel"] = channel;
      m["steps"] = steps;
      sink.manifest(m);
    };
  });

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Searched maximum of a resource on a purity shell, with its ceiling");
  common(bounds, true);
  std::string target = "negativity";
  double radius = 1.0;
  int theta_grid = 19, samples = 400;
  bounds->add_option("--target", target, "negativity or magic")->capture_default_str();
  bounds->add_option("--R", radius, "Shell radius in [0,1]")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  bounds->add_option("--theta-grid", theta_grid, "Angles spread over [0, pi/2]")->capture_default_str()->check(CLI::Range(1, 100000));
  bounds->add_option("--samples", samples, "Seeds per angle")->capture_default_str()->check(CLI::Range(1, 10000000));
  bounds->add_option("--seed", seed, "Seed");
  bounds->callback([&] {
    action = [&] {
      const auto dims = DimensionProfile::parse(dims_text);
      const auto t = parse_profile_target(target);
      if (!t) throw UsageError("unknown target '" + target + "'");
      std::vector<double> thetas;
      for (int i = 0; i < theta_grid; ++i)
        thetas.push_back(theta_grid == 1 ? std::numbers::pi / 2 : std::numbers::pi / 2 * i / (theta_grid - 1));
      ProfileOptions opt;
      opt.samples = samples;
      opt.seed = seed;
      Sink sink(out);
      io::write_profile_csv(sink.open("profile_" + target + ".csv"), kernels::omp::profile(dims, radius, thetas, *t, opt));
      auto m = manifest_base("bounds", dims, seed, out, "csv");
      m["target"] = target;
      m["R"] = radius;
      m["theta_grid"] = theta_grid;
      m["samples"] = samples;
      sink.manifest(m);
    };
  });

  // classify
  auto* cls = app.add_subcommand("classify", "Region report from purities alone or from a state");
  common(cls, false);
  double P = -1.0;
  std::string marginals;
  int cn_grid = 41;
  auto* p_opt = cls->add_option("--P", P, "Global purity");
  auto* m_opt = cls->add_option("--marginals", marginals, "Comma-separated marginal purities");
  auto* s_opt = cls->add_option("--state", state, "Builtin name or JSON state file");
  p_opt->needs(m_opt);
  m_opt->needs(p_opt);
  s_opt->excludes(p_opt)->excludes(m_opt);
  cls->add_option("--resolution", cn_grid, "Grid for the numeric classical envelope")->capture_default_str()->check(CLI::Range(2, 100000));
  cls->callback([&] {
    action = [&] {
      auto dims = DimensionProfile::parse(dims_text);
      BudgetPoint pt;
      if (!state.empty()) {
        const auto rho = load_state(state, dims);
        dims = rho.dims();
        pt = budget_decompose(rho);
      } else if (!marginals.empty()) {
        const auto mp = parse_list(marginals);
        pt = budget_from_purities(P, mp, dims);
      } else {
        throw UsageError("classify needs --state or --P with --marginals");
      }
      const auto report = classify(pt, make_envelope_set(dims, cn_grid));
      json j = io::to_json(report);
      j["point"] = io::to_json(pt);
      std::cout << j.dump() << '\n';
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "Run acceptance criteria");
  std::string suite = "all";
  acceptance::Options aopt;
  verify->add_option("--suite", suite, "all, a suite name or a criterion number")->capture_default_str();
  verify->add_option("--count", aopt.ensemble_count, "States per ensemble in the sampling checks")->capture_default_str();
  verify->callback([&] {
    action = [&] {
      aopt.wishart_count = aopt.ensemble_count;
      std::vector<int> which;
      if (suite != "all") {
        const auto id = acceptance::criterion_for(suite);
        if (!id) throw UsageError("unknown suite '" + suite + "'");
        which.push_back(*id);
      }
      for (const auto& r : acceptance::run_all(aopt, std::cout, which))
        if (!r.pass) std::exit(4);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::cout.precision(17);
    action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
