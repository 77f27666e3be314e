#include "qet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "qet/errors.hpp"
#include "qet/squeezed_qet.hpp"
#include "qet/vacuum_qet.hpp"

namespace qet {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr int kReanchor = 256;
constexpr int kMinModes = 4096;
constexpr double kNodesPerPeriod = 48.0;
constexpr double kLogFloor = 1e-6;  // lowest log node, relative to Omega

// Trapezoid nodes over a profile's support, fine enough that the aliased
// copies of the transform sit beyond the profile's spectral width.
struct XNodes {
  std::vector<double> weight;  // trapezoid weight times the smearing factor
  std::vector<double> phase;   // f at the node, minus `reference`
  double reference = 0.0;
};

int node_count(const SmearingProfile& g, double cutoff) {
  const double h = std::min(2.0 * kPi / (cutoff + 12.0 / g.width()), g.support().width() / 64.0);
  return static_cast<int>(std::ceil(g.support().width() / h)) + 1;
}

template <class Weight, class Position>
XNodes make_nodes(const SmearingProfile& g, const SqueezeProfile& f, double cutoff, Weight weight,
                  Position position) {
  const int n = node_count(g, cutoff);
  const Interval s = g.support();
  const double h = s.width() / (n - 1);
  XNodes out;
  out.reference = f(position(g.center()));
  out.weight.resize(n);
  out.phase.resize(n);
  for (int j = 0; j < n; ++j) {
    const double x = j == n - 1 ? s.hi : s.lo + h * j;
    const double end = (j == 0 || j == n - 1) ? 0.5 : 1.0;
    const double p = position(x);
    out.weight[j] = end * h * weight(x) * f.derivative(p);
    out.phase[j] = f(p) - out.reference;
  }
  return out;
}

// Running exp(-i w phase_j) over uniform w, re-anchored periodically.
class Phasors {
 public:
  Phasors(const std::vector<double>& phase, double step)
      : phase_(phase), step_(phase.size()), current_(phase.size()) {
    for (std::size_t j = 0; j < phase.size(); ++j) step_[j] = std::polar(1.0, -step * phase[j]);
  }
  void set(double omega) {
    for (std::size_t j = 0; j < phase_.size(); ++j) current_[j] = std::polar(1.0, -omega * phase_[j]);
  }
  void advance() {
    for (std::size_t j = 0; j < phase_.size(); ++j) current_[j] *= step_[j];
  }
  cplx sum(const std::vector<double>& w) const {
    cplx s{0.0, 0.0};
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * current_[j];
    return s;
  }

 private:
  const std::vector<double>& phase_;
  std::vector<cplx> step_;
  std::vector<cplx> current_;
};

struct Accumulator {
  double var_eps = 0.0, var_2eps = 0.0, var_4eps = 0.0, var_half = 0.0;
  double ab_eps = 0.0, ab_2eps = 0.0, ab_4eps = 0.0, ab_half = 0.0;
};

}  // namespace

void ModeGrid::validate() const {
  std::ostringstream msg;
  if (!(eps > 0.0) || !std::isfinite(eps)) msg << "mode grid needs eps > 0";
  else if (!(cutoff > 0.0) || !std::isfinite(cutoff)) msg << "mode grid needs Omega > 0";
  else if (cutoff * eps < 5.0 * (1.0 - 1e-12)) msg << "mode grid needs Omega eps >= 5 (got " << cutoff * eps << ")";
  else if (n_modes < 16) msg << "mode grid needs at least 16 modes";
  const std::string what = msg.str();
  if (!what.empty()) throw Error(ErrorCode::ParameterViolation, what);
}

ModeGrid ModeGrid::for_configuration(const SmearingProfile& gA, const SmearingProfile& gB,
                                     const ProtocolGeometry& geo, const SqueezeProfile& profile,
                                     NodeRule rule) {
  const double sigma = std::min(gA.width(), gB.width());
  ModeGrid g;
  g.cutoff = 100.0 / sigma;
  g.eps = 0.05 * sigma;
  g.rule = rule;
  const double span = gB.support().hi + geo.T - gA.support().lo + std::abs(profile.shift());
  const double period = 2.0 * kPi / span;
  if (rule == NodeRule::uniform) {
    const double step = std::min(period / kNodesPerPeriod, g.cutoff / kMinModes);
    g.n_modes = static_cast<int>(std::ceil(g.cutoff / step));
    g.n_modes += g.n_modes % 2;
  } else {
    // Resolve the oscillation up to the point where the gaussian transform
    // has died off (about 10 / sigma).
    const double dlog = period / kNodesPerPeriod / (10.0 / sigma);
    g.n_modes = std::max(kMinModes, static_cast<int>(std::ceil(-std::log(kLogFloor) / dlog)) + 1);
  }
  return g;
}

OracleMoments oracle_moments(const SmearingProfile& gA_in, const SmearingProfile& gB_in,
                             const ProtocolGeometry& geo_in, const SqueezeProfile& profile,
                             const ModeGrid& grid) {
  grid.validate();
  const CheckedConfiguration c = validate_assignment(gA_in, gB_in, geo_in);
  const double T = c.geometry.T;
  const double omega_max = grid.cutoff;

  const XNodes a = make_nodes(
      c.gA, profile, omega_max, [&](double x) { return c.gA(x); }, [](double x) { return x; });
  const XNodes b = make_nodes(
      c.gB, profile, omega_max, [&](double y) { return c.gB.derivative(y); },
      [T](double y) { return y + T; });
  const double offset = a.reference - b.reference;

  OracleMoments out;
  out.x_nodes = static_cast<int>(a.weight.size() + b.weight.size());
  out.modes = grid.n_modes;

  // Integrands in w without damping:
  //   variance:  (w / 4 pi) |SA|^2
  //   cross:    -(w / 4 pi) Re[e^{-i w offset} SA conj(SB)]
  auto integrands = [&](double w, const cplx& sa, const cplx& sb) {
    const cplx sep = std::polar(1.0, -w * offset);
    const double pref = w / (4.0 * kPi);
    return std::pair{pref * std::norm(sa), -pref * std::real(sep * sa * std::conj(sb))};
  };

  Accumulator acc;
  auto add = [&](double w, double weight, double half_weight, const cplx& sa, const cplx& sb) {
    const auto [var, ab] = integrands(w, sa, sb);
    const double d1 = std::exp(-grid.eps * w), d2 = d1 * d1, d4 = d2 * d2;
    acc.var_eps += weight * d1 * var;
    acc.var_2eps += weight * d2 * var;
    acc.var_4eps += weight * d4 * var;
    acc.ab_eps += weight * d1 * ab;
    acc.ab_2eps += weight * d2 * ab;
    acc.ab_4eps += weight * d4 * ab;
    acc.var_half += half_weight * d1 * var;
    acc.ab_half += half_weight * d1 * ab;
  };

  if (grid.rule == NodeRule::uniform) {
    const int n = grid.n_modes + grid.n_modes % 2;
    const double dw = omega_max / n;
    Phasors pa(a.phase, dw), pb(b.phase, dw);
    for (int k = 0; k <= n; ++k) {
      const double w = dw * k;
      if (k % kReanchor == 0) {
        pa.set(w);
        pb.set(w);
      } else {
        pa.advance();
        pb.advance();
      }
      const double weight = (k == 0 || k == n) ? 0.5 * dw : dw;
      const double half = k < n / 2 ? weight : (k == n / 2 ? 0.5 * dw : 0.0);
      add(w, weight, half, pa.sum(a.weight), pb.sum(b.weight));
    }
    // Euler-Maclaurin end correction for the variance: its integrand starts
    // linearly, F'(0) = |SA(0)|^2 / 4 pi (the cross term starts quadratically
    // because int gB' = 0).
    double sa0 = 0.0;
    for (double w : a.weight) sa0 += w;
    const double slope0 = sa0 * sa0 / (4.0 * kPi);
    const double corr = dw * dw / 12.0 * slope0;
    acc.var_eps += corr;
    acc.var_2eps += corr;
    acc.var_4eps += corr;
    acc.var_half += corr;
  } else {
    const int n = grid.n_modes;
    const double lo = omega_max * kLogFloor;
    const double dlog = std::log(omega_max / lo) / (n - 1);
    const double half_w = 0.5 * omega_max;
    for (int k = 0; k < n; ++k) {
      const double w = k == n - 1 ? omega_max : lo * std::exp(dlog * k);
      cplx sa{0.0, 0.0}, sb{0.0, 0.0};
      for (std::size_t j = 0; j < a.weight.size(); ++j) sa += a.weight[j] * std::polar(1.0, -w * a.phase[j]);
      for (std::size_t j = 0; j < b.weight.size(); ++j) sb += b.weight[j] * std::polar(1.0, -w * b.phase[j]);
      double weight = w * dlog * ((k == 0 || k == n - 1) ? 0.5 : 1.0);
      // [0, lo] with an integrand that is linear there.
      if (k == 0) weight += 0.5 * lo;
      add(w, weight, w <= half_w ? weight : 0.0, sa, sb);
    }
  }

  out.A_variance_eps = acc.var_eps;
  out.A_variance_2eps = acc.var_2eps;
  out.A_variance_4eps = acc.var_4eps;
  out.AB_moment_eps = acc.ab_eps;
  out.AB_moment_2eps = acc.ab_2eps;
  out.AB_moment_4eps = acc.ab_4eps;
  // Two Richardson levels. The damping enters <A^2> with all powers of eps
  // and the separated cross moment with even powers only.
  auto richardson = [](double i1, double i2, double i4, double p, double q) {
    const double r1 = (std::pow(2.0, p) * i1 - i2) / (std::pow(2.0, p) - 1.0);
    const double r2 = (std::pow(2.0, p) * i2 - i4) / (std::pow(2.0, p) - 1.0);
    return (std::pow(2.0, q) * r1 - r2) / (std::pow(2.0, q) - 1.0);
  };
  out.A_variance = richardson(acc.var_eps, acc.var_2eps, acc.var_4eps, 1.0, 2.0);
  out.AB_moment = richardson(acc.ab_eps, acc.ab_2eps, acc.ab_4eps, 2.0, 4.0);
  out.A_variance_truncation = std::abs(acc.var_eps - acc.var_half);
  out.AB_moment_truncation = std::abs(acc.ab_eps - acc.ab_half);

  out.A_mean = 0.0;
  const double s = std::exp(-2.0 * out.A_variance) * std::sin(2.0 * out.A_mean);
  out.p = {0.5 * (1.0 + s), 0.5 * (1.0 - s)};

  // G_B on a trapezoid grid of its own.
  const int nb = node_count(c.gB, omega_max);
  const Interval sb = c.gB.support();
  const double hb = sb.width() / (nb - 1);
  double gsum = 0.0;
  for (int j = 0; j < nb; ++j) {
    const double d = c.gB.derivative(sb.lo + hb * j);
    gsum += ((j == 0 || j == nb - 1) ? 0.5 : 1.0) * d * d;
  }
  out.G_B = gsum * hb;
  return out;
}

OracleFault oracle_fault_from_string(std::string_view name) {
  if (name == "none" || name.empty()) return OracleFault::none;
  if (name == "damping") return OracleFault::damping;
  throw Error(ErrorCode::ConfigError, "unknown fault '" + std::string(name) + "'");
}

double oracle_energy(const OracleMoments& m, double G_B, OracleFault fault) {
  if (!(G_B > 0.0)) throw Error(ErrorCode::DegenerateProfile, "G_B must be positive");
  const double exponent = fault == OracleFault::damping ? 8.0 : 4.0;
  return 4.0 * m.AB_moment * m.AB_moment * std::exp(-exponent * m.A_variance) / G_B;
}

OracleComparison compare_with_oracle(const SmearingProfile& gA, const SmearingProfile& gB,
                                     const ProtocolGeometry& geo, const SqueezeProfile& profile,
                                     const QuadratureConfig& cfg, OracleFault fault,
                                     NodeRule rule) {
  const TeleportReport main = profile.kind() == SqueezeKind::identity
                                  ? teleported_energy(gA, gB, geo, cfg)
                                  : teleported_energy_squeezed(gA, gB, geo, profile, cfg);
  OracleComparison out;
  const CheckedConfiguration c = validate_assignment(gA, gB, geo);
  out.grid = ModeGrid::for_configuration(c.gA, c.gB, c.geometry, profile, rule);
  out.moments = oracle_moments(gA, gB, geo, profile, out.grid);

  auto entry = [](std::string name, double oracle, double main_value) {
    ComparisonEntry e;
    e.quantity = std::move(name);
    e.oracle = oracle;
    e.main = main_value;
    const double scale = std::max(std::abs(main_value), std::abs(oracle));
    e.rel_diff = scale > 0.0 ? std::abs(oracle - main_value) / scale : 0.0;
    e.pass = e.rel_diff <= kOracleTolerance;
    return e;
  };
  out.entries.push_back(entry("A_variance", out.moments.A_variance, main.A_variance));
  out.entries.push_back(entry("AB_moment", out.moments.AB_moment, main.AB_moment));
  out.entries.push_back(
      entry("E_B", oracle_energy(out.moments, out.moments.G_B, fault), main.E_B));
  out.all_pass = std::all_of(out.entries.begin(), out.entries.end(),
                             [](const ComparisonEntry& e) { return e.pass; });
  return out;
}

}  // namespace qet
