#pragma once

// Observables of the vacuum-state teleportation protocol.
//
// Alice measures A = int gA(x) Pi(x) dx with outcome mu in {0, 1}; Bob applies
// exp(i theta_mu B) with B = int gB(x) dphi(x) after the signal arrives at time
// T. Everything reduces to two Gaussian moments of the field state:
//   <A^2>      = (1/4pi) int_0^inf |gA~|^2 w dw
//   <A B'(T)>  = (1/2pi) int int gA(xa) gB(xb) / (xb - xa + T - l)^3
// where l is the asymptotic shift of a squeezed state (0 for the vacuum).

#include <array>

#include "qet/profiles.hpp"
#include "qet/quadrature.hpp"

namespace qet {

struct TeleportReport {
  double L = 0.0;
  double T = 0.0;
  double shift_l = 0.0;

  double E_A = 0.0;
  double E_A_error = 0.0;
  double A_variance = 0.0;
  double A_variance_error = 0.0;
  double AB_moment = 0.0;
  double AB_moment_error = 0.0;
  std::array<double, 2> C{};
  std::array<double, 2> p{};
  std::array<double, 2> theta{};
  double G_B = 0.0;

  /// Moment route (primary value).
  double E_B = 0.0;
  /// Closed-form route: squared double integral over pi^2 G_B exp(4<A^2>),
  /// evaluated with nested 1D rules and the position-space variance.
  double E_B_closed_form = 0.0;
  double route_rel_diff = 0.0;

  double bound_value = 0.0;
  double bound_ratio = 0.0;

  bool squeezed = false;
  double E_C = 0.0;
  double E_C_window = 0.0;
  /// Same profiles with l = 0 (only filled for squeezed runs).
  double E_B_vacuum = 0.0;

  bool gA_signed = false;
  bool gB_signed = false;
};

/// Relative tolerance between the two E_B routes.
inline constexpr double kRouteTolerance = 1e-8;

QuadratureResult injected_energy(const SmearingProfile& gA, const QuadratureConfig& cfg = {});
QuadratureResult a_variance(const SmearingProfile& gA, const QuadratureConfig& cfg = {});

/// <A^2> from the position-space form -(1/4pi) int int gA' gA' ln|x - x'|.
QuadratureResult a_variance_position_space(const SmearingProfile& gA,
                                           const QuadratureConfig& cfg = {});

/// <A B'(T)> with the kernel denominator (xb - xa + T - l). Profiles are taken
/// in the coordinates of `geo` as given. Throws SingularKernel when the
/// denominator is not positive over the product of supports.
QuadratureResult ab_moment(const SmearingProfile& gA, const SmearingProfile& gB,
                           const ProtocolGeometry& geo, double shift_l = 0.0,
                           const QuadratureConfig& cfg = {});

/// Same quantity by iterated 1D integration.
QuadratureResult ab_moment_iterated(const SmearingProfile& gA, const SmearingProfile& gB,
                                    const ProtocolGeometry& geo, double shift_l = 0.0,
                                    const QuadratureConfig& cfg = {});

/// Correlations C_mu = <Xi_mu B'(T)> for outcomes mu = 0, 1.
std::array<double, 2> correlation_from_moments(double ab_moment, double a_variance);

std::array<double, 2> measurement_correlation(const SmearingProfile& gA,
                                              const SmearingProfile& gB,
                                              const ProtocolGeometry& geo, double shift_l = 0.0,
                                              const QuadratureConfig& cfg = {});

/// theta = 2 C / G_B. Throws DegenerateProfile unless G_B > 0.
double optimal_theta(double C, double G_B);

/// Full protocol evaluation with both routes; validates and centers the
/// configuration first. Throws RouteMismatch when the routes disagree.
TeleportReport teleported_energy(const SmearingProfile& gA, const SmearingProfile& gB,
                                 const ProtocolGeometry& geo, const QuadratureConfig& cfg = {});

/// Protocol evaluation on an already checked configuration with shift l.
TeleportReport evaluate_protocol(const CheckedConfiguration& checked, double shift_l,
                                 const QuadratureConfig& cfg = {});

}  // namespace qet
