#include "budgetlab/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace budgetlab {

std::optional<ChannelKind> parse_channel_kind(const std::string& name) {
  for (auto k : all_channel_kinds())
    if (channel_kind_name(k) == name) return k;
  if (name == "depolarising") return ChannelKind::Depolarizing;
  return std::nullopt;
}

std::string channel_kind_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Identity: return "identity";
    case ChannelKind::Dephasing: return "dephasing";
    case ChannelKind::Depolarizing: return "depolarizing";
    case ChannelKind::AmplitudeDamping: return "amplitude-damping";
    case ChannelKind::CorrelatedPhaseFlip: return "correlated-phase-flip";
    case ChannelKind::CorrelatedAmplitudeDamping: return "correlated-amplitude-damping";
  }
  return "?";
}

const std::vector<ChannelKind>& all_channel_kinds() {
  static const std::vector<ChannelKind> k = {ChannelKind::Identity,         ChannelKind::Dephasing,
                                             ChannelKind::Depolarizing,     ChannelKind::AmplitudeDamping,
                                             ChannelKind::CorrelatedPhaseFlip, ChannelKind::CorrelatedAmplitudeDamping};
  return k;
}

const std::vector<ChannelKind>& methods_channel_kinds() {
  static const std::vector<ChannelKind> k = {ChannelKind::Dephasing, ChannelKind::Depolarizing,
                                             ChannelKind::AmplitudeDamping, ChannelKind::CorrelatedPhaseFlip,
                                             ChannelKind::CorrelatedAmplitudeDamping};
  return k;
}

double KrausChannel::completeness_defect() const {
  ComplexMatrix sum(dims.total(), dims.total());
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return max_abs_diff(sum, ComplexMatrix::identity(dims.total()));
}

ComplexMatrix embed(const ComplexMatrix& op, const DimensionProfile& dims, std::span<const std::size_t> targets) {
  std::size_t tdim = 1;
  std::vector<bool> is_target(dims.size(), false);
  for (std::size_t t : targets) {
    if (t >= dims.size()) throw DomainError("embed: subsystem index out of range");
    if (is_target[t]) throw DomainError("embed: repeated target");
    is_target[t] = true;
    tdim *= dims[t];
  }
  if (op.rows() != tdim || op.cols() != tdim) throw DomainError("embed: operator size does not match targets");
  const std::size_t n = dims.total();
  // Split every full index into (target multi-index, rest multi-index).
  std::vector<std::size_t> tidx(n), ridx(n);
  std::vector<std::size_t> digits(dims.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (std::size_t k = dims.size(); k-- > 0;) {
      digits[k] = rest % dims[k];
      rest /= dims[k];
    }
    std::size_t ti = 0;
    for (std::size_t t : targets) ti = ti * dims[t] + digits[t];
    std::size_t ri = 0;
    for (std::size_t k = 0; k < dims.size(); ++k)
      if (!is_target[k]) ri = ri * dims[k] + digits[k];
    tidx[i] = ti;
    ridx[i] = ri;
  }
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (ridx[i] == ridx[j]) out(i, j) = op(tidx[i], tidx[j]);
  return out;
}

std::vector<ComplexMatrix> local_kraus(ChannelKind kind, double p, std::size_t d) {
  const double dd = static_cast<double>(d);
  std::vector<ComplexMatrix> ks;
  switch (kind) {
    case ChannelKind::Identity:
      ks.push_back(ComplexMatrix::identity(d));
      break;
    case ChannelKind::Dephasing: {
      // (1 - p) rho + p diag(rho), diag(rho) = (1/d) sum_b Z^b rho Z^-b
      ks.push_back(std::sqrt(1.0 - p + p / dd) * ComplexMatrix::identity(d));
      for (std::size_t b = 1; b < d; ++b) {
        ComplexMatrix z(d, d);
        for (std::size_t j = 0; j < d; ++j)
          z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(b * j) / dd);
        ks.push_back(std::sqrt(p / dd) * z);
      }
      break;
    }
    case ChannelKind::Depolarizing: {
      // Weyl operators X^a Z^b average any operator to tr(.) I/d
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
          ComplexMatrix w(d, d);
          for (std::size_t j = 0; j < d; ++j)
            w((j + a) % d, j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(b * j) / dd);
          const double weight = (a == 0 && b == 0) ? 1.0 - p + p / (dd * dd) : p / (dd * dd);
          ks.push_back(std::sqrt(weight) * w);
        }
      break;
    }
    case ChannelKind::AmplitudeDamping: {
      ComplexMatrix k0(d, d);
      k0(0, 0) = 1.0;
      for (std::size_t j = 1; j < d; ++j) k0(j, j) = std::sqrt(1.0 - p);
      ks.push_back(std::move(k0));
      for (std::size_t j = 1; j < d; ++j) {
        ComplexMatrix kj(d, d);
        kj(0, j) = std::sqrt(p);
        ks.push_back(std::move(kj));
      }
      break;
    }
    default:
      throw DomainError("local_kraus: " + channel_kind_name(kind) + " is not a local channel");
  }
  return ks;
}

KrausChannel make_channel(ChannelKind kind, double p, const DimensionProfile& dims, std::vector<std::size_t> targets) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("channel strength must lie in [0,1]");
  if (targets.empty())
    for (std::size_t k = 0; k < dims.size(); ++k) targets.push_back(k);
  for (std::size_t t : targets)
    if (t >= dims.size()) throw DomainError("channel target out of range for dims " + dims.to_string());

  KrausChannel ch;
  ch.dims = dims;
  std::ostringstream label;
  label << channel_kind_name(kind) << "(p=" << p << ";targets=";
  for (std::size_t i = 0; i < targets.size(); ++i) label << (i ? "," : "") << targets[i];
  label << ")";
  ch.label = label.str();

  switch (kind) {
    case ChannelKind::Identity:
    case ChannelKind::Dephasing:
    case ChannelKind::Depolarizing:
    case ChannelKind::AmplitudeDamping: {
      ch.kraus = {ComplexMatrix::identity(dims.total())};
      for (std::size_t t : targets) {
        const std::size_t one[] = {t};
        std::vector<ComplexMatrix> next;
        for (const auto& k : local_kraus(kind, p, dims[t])) {
          const auto lifted = embed(k, dims, one);
          for (const auto& prev : ch.kraus) next.push_back(lifted * prev);
        }
        ch.kraus = std::move(next);
      }
      break;
    }
    case ChannelKind::CorrelatedPhaseFlip: {
      if (targets.size() < 2) throw DomainError("correlated-phase-flip needs at least two target qubits");
      ComplexMatrix zz = ComplexMatrix::identity(1);
      for (std::size_t t : targets) {
        if (dims[t] != 2) throw DomainError("correlated-phase-flip is defined on qubits only");
        zz = kron(zz, ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}});
      }
      ch.kraus = {std::sqrt(1.0 - p) * ComplexMatrix::identity(dims.total()), std::sqrt(p) * embed(zz, dims, targets)};
      break;
    }
    case ChannelKind::CorrelatedAmplitudeDamping: {
      if (targets.size() != 2 || dims[targets[0]] != 2 || dims[targets[1]] != 2)
        throw DomainError("correlated-amplitude-damping needs exactly two target qubits");
      ComplexMatrix k0 = ComplexMatrix::identity(4);
      k0(3, 3) = std::sqrt(1.0 - p);
      ComplexMatrix k1(4, 4);
      k1(0, 3) = std::sqrt(p);
      ch.kraus = {embed(k0, dims, targets), embed(k1, dims, targets)};
      break;
    }
  }
  return ch;
}

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dims() != ch.dims) throw DomainError("apply: state and channel dimensions differ");
  ComplexMatrix out(rho.dim(), rho.dim());
  for (const auto& k : ch.kraus) out += k * rho.matrix() * k.adjoint();
  try {
    return DensityMatrix::validate(out, rho.dims());
  } catch (const ValidationError& e) {
    throw NumericalError("channel " + ch.label + " produced an invalid state: " + e.what());
  }
}

Trajectory sweep(const DensityMatrix& rho0, ChannelKind kind, std::vector<std::size_t> targets, int steps,
                 std::string state_label) {
  if (steps < 2) throw DomainError("sweep: need at least two grid points");
  Trajectory traj;
  traj.initial_state = std::move(state_label);
  traj.samples.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(steps - 1);
    const auto ch = make_channel(kind, p, rho0.dims(), targets);
    if (i == 0) traj.channel = ch.label.substr(0, ch.label.find("(p=")) + ch.label.substr(ch.label.find(";targets"));
    traj.samples.push_back({p, budget_decompose(apply(ch, rho0))});
  }
  if (!traj.channel.empty() && traj.channel.find(";targets") != std::string::npos)
    traj.channel = traj.channel.replace(traj.channel.find(";targets"), 1, "(");
  return traj;
}

DensityMatrix purify(const DensityMatrix& rho, unsigned n) {
  if (n == 0) throw DomainError("purify: power must be >= 1");
  ComplexMatrix m = mat_power(rho.matrix(), n);
  const double tr = m.trace().real();
  if (!(tr > 1e-300)) throw NumericalError("purify: tr(rho^n) underflowed");
  m *= 1.0 / tr;
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix::trusted(std::move(m), rho.dims());
}

Trajectory purification_trajectory(const DensityMatrix& rho, unsigned max_power, std::string state_label) {
  Trajectory traj;
  traj.channel = "purify";
  traj.initial_state = std::move(state_label);
  for (unsigned n = 1; n <= max_power; ++n)
    traj.samples.push_back({static_cast<double>(n), budget_decompose(purify(rho, n))});
  return traj;
}

std::vector<std::size_t> arrow_check(std::span<const std::pair<double, double>> pq) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 1; i < pq.size(); ++i)
    if (pq[i].first - pq[i - 1].first > kArrowTol && pq[i].second - pq[i - 1].second > kArrowTol) bad.push_back(i);
  return bad;
}

std::vector<std::size_t> arrow_check(const Trajectory& traj) {
  std::vector<std::pair<double, double>> pq;
  pq.reserve(traj.samples.size());
  for (const auto& s : traj.samples) pq.emplace_back(s.point.P, s.point.Q.value_or(0.0));
  return arrow_check(pq);
}

}  // namespace budgetlab
