#include "qet/vacuum_qet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "qet/errors.hpp"

namespace qet {

namespace {

constexpr double kPi = std::numbers::pi;

// Breaks for a frequency integral over [0, cutoff]. |g~|^2 of a profile of
// half-width h oscillates on a scale pi/h; one panel per oscillation keeps the
// adaptive rule from chasing zeros.
std::vector<double> frequency_breaks(const SmearingProfile& g, double cutoff) {
  const double half = 0.5 * g.support().width();
  const double step = std::max(kPi / half, cutoff / 4096.0);
  std::vector<double> breaks{0.0};
  for (double w = step; w < cutoff; w += step) breaks.push_back(w);
  breaks.push_back(cutoff);
  return breaks;
}

QuadratureResult frequency_moment(const SmearingProfile& g, int power,
                                  const QuadratureConfig& cfg) {
  const double cutoff = frequency_cutoff(g, power, cfg);
  const auto breaks = frequency_breaks(g, cutoff);
  auto r = integrate_1d(
      [&](double w) { return fourier_power(g, w, cfg) * std::pow(w, power); }, breaks, cfg);
  r.value /= 4.0 * kPi;
  r.error /= 4.0 * kPi;
  return r;
}

struct KernelFrame {
  // Smallest and typical denominators over the product of supports.
  double min_gap;
  double scale;
};

KernelFrame kernel_frame(const SmearingProfile& gA, const SmearingProfile& gB,
                         const ProtocolGeometry& geo, double shift_l) {
  const double offset = geo.T - shift_l;
  const double min_gap = gB.support().lo - gA.support().hi + offset;
  if (!(min_gap > 0.0)) {
    std::ostringstream msg;
    msg << "denominator xb - xa + T - l reaches " << min_gap
        << " over the supports (l = " << shift_l << ")";
    throw Error(ErrorCode::SingularKernel, msg.str());
  }
  const double typical = gB.center() - gA.center() + offset;
  return {min_gap, std::max(typical, min_gap)};
}

}  // namespace

QuadratureResult injected_energy(const SmearingProfile& gA, const QuadratureConfig& cfg) {
  return frequency_moment(gA, 2, cfg);
}

QuadratureResult a_variance(const SmearingProfile& gA, const QuadratureConfig& cfg) {
  return frequency_moment(gA, 1, cfg);
}

QuadratureResult a_variance_position_space(const SmearingProfile& gA,
                                           const QuadratureConfig& cfg) {
  const Interval s = gA.support();
  // Inner integrals run over the distance r = |x - y| so the logarithm never
  // sees a difference rounded to zero.
  auto inner = [&](double x) {
    double v = 0.0;
    if (x > s.lo) {
      v += integrate_1d([&](double r) { return gA.derivative(x - r) * std::log(r); }, 0.0,
                        x - s.lo, cfg, EndpointSingularity::left)
               .value;
    }
    if (x < s.hi) {
      v += integrate_1d([&](double r) { return gA.derivative(x + r) * std::log(r); }, 0.0,
                        s.hi - x, cfg, EndpointSingularity::left)
               .value;
    }
    return gA.derivative(x) * v;
  };
  auto r = integrate_on_support(gA, inner, cfg);
  r.value /= -4.0 * kPi;
  r.error /= 4.0 * kPi;
  return r;
}

QuadratureResult ab_moment(const SmearingProfile& gA, const SmearingProfile& gB,
                           const ProtocolGeometry& geo, double shift_l,
                           const QuadratureConfig& cfg) {
  const KernelFrame frame = kernel_frame(gA, gB, geo, shift_l);
  const double offset = geo.T - shift_l;
  // Integrate the kernel scaled by scale^3 so abs_tol is meaningful for any
  // separation, then undo the scaling.
  Kernel2D k;
  k.value = [&](double xa, double xb) {
    const double r = frame.scale / (xb - xa + offset);
    return gA(xa) * gB(xb) * r * r * r;
  };
  k.denominator_min = [&](const Interval& a, const Interval& b) {
    return b.lo - a.hi + offset;
  };
  auto r = integrate_2d(k, gA.support(), gB.support(), cfg);
  const double norm = 2.0 * kPi * frame.scale * frame.scale * frame.scale;
  r.value /= norm;
  r.error /= norm;
  return r;
}

QuadratureResult ab_moment_iterated(const SmearingProfile& gA, const SmearingProfile& gB,
                                    const ProtocolGeometry& geo, double shift_l,
                                    const QuadratureConfig& cfg) {
  const KernelFrame frame = kernel_frame(gA, gB, geo, shift_l);
  const double offset = geo.T - shift_l;
  int evaluations = 0;
  auto outer = [&](double xa) {
    const double ga = gA(xa);
    if (ga == 0.0) return 0.0;
    auto r = integrate_on_support(
        gB,
        [&](double xb) {
          const double q = frame.scale / (xb - xa + offset);
          return gB(xb) * q * q * q;
        },
        cfg);
    evaluations += r.evaluations;
    return ga * r.value;
  };
  auto r = integrate_on_support(gA, outer, cfg);
  r.evaluations += evaluations;
  const double norm = 2.0 * kPi * frame.scale * frame.scale * frame.scale;
  r.value /= norm;
  r.error /= norm;
  return r;
}

std::array<double, 2> correlation_from_moments(double ab, double variance) {
  // <sin(2A) B'> = 2 <A B'> exp(-2<A^2>) for a zero-mean Gaussian state, and
  // Xi_mu = (1 +- sin 2A)/2.
  const double c0 = 2.0 * ab * std::exp(-2.0 * variance);
  return {c0, -c0};
}

std::array<double, 2> measurement_correlation(const SmearingProfile& gA,
                                              const SmearingProfile& gB,
                                              const ProtocolGeometry& geo, double shift_l,
                                              const QuadratureConfig& cfg) {
  return correlation_from_moments(ab_moment(gA, gB, geo, shift_l, cfg).value,
                                  a_variance(gA, cfg).value);
}

double optimal_theta(double C, double G_B) {
  if (!(G_B > 0.0) || !std::isfinite(G_B)) {
    throw Error(ErrorCode::DegenerateProfile, "G_B must be positive to optimise theta");
  }
  return 2.0 * C / G_B;
}

TeleportReport evaluate_protocol(const CheckedConfiguration& checked, double shift_l,
                                 const QuadratureConfig& cfg) {
  cfg.validate();
  const auto& gA = checked.gA;
  const auto& gB = checked.gB;
  const auto& geo = checked.geometry;

  TeleportReport rep;
  rep.L = geo.L();
  rep.T = geo.T;
  rep.shift_l = shift_l;
  rep.gA_signed = checked.gA_signed;
  rep.gB_signed = checked.gB_signed;

  const auto ea = injected_energy(gA, cfg);
  const auto var = a_variance(gA, cfg);
  const auto ab = ab_moment(gA, gB, geo, shift_l, cfg);
  rep.E_A = ea.value;
  rep.E_A_error = ea.error;
  rep.A_variance = var.value;
  rep.A_variance_error = var.error;
  rep.AB_moment = ab.value;
  rep.AB_moment_error = ab.error;
  rep.G_B = gradient_norm_GB(gB, cfg);
  rep.C = correlation_from_moments(ab.value, var.value);
  // Odd moments of a zero-mean Gaussian vanish, so <sin 2A> = 0 and both
  // outcomes are equally likely.
  rep.p = {0.5, 0.5};
  for (int mu = 0; mu < 2; ++mu) rep.theta[mu] = optimal_theta(rep.C[mu], rep.G_B);
  rep.E_B = (rep.p[0] * rep.C[0] * rep.C[0] + rep.p[1] * rep.C[1] * rep.C[1]) / rep.G_B;

  const double J = 2.0 * kPi * ab_moment_iterated(gA, gB, geo, shift_l, cfg).value;
  const double var_x = a_variance_position_space(gA, cfg).value;
  rep.E_B_closed_form = J * J / (kPi * kPi * rep.G_B * std::exp(4.0 * var_x));

  const double scale = std::max(std::abs(rep.E_B), std::abs(rep.E_B_closed_form));
  rep.route_rel_diff = scale > 0.0 ? std::abs(rep.E_B - rep.E_B_closed_form) / scale : 0.0;
  if (rep.route_rel_diff > kRouteTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "moment route E_B = " << rep.E_B << " vs closed form " << rep.E_B_closed_form
        << " (relative difference " << rep.route_rel_diff << ")";
    throw Error(ErrorCode::RouteMismatch, msg.str());
  }

  rep.bound_value = 1.0 / (12.0 * kPi * rep.L);
  rep.bound_ratio = 12.0 * kPi * rep.L * rep.E_B;
  return rep;
}

TeleportReport teleported_energy(const SmearingProfile& gA, const SmearingProfile& gB,
                                 const ProtocolGeometry& geo, const QuadratureConfig& cfg) {
  return evaluate_protocol(validate_assignment(gA, gB, geo), 0.0, cfg);
}

}  // namespace qet
