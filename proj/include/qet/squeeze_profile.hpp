#pragma once

// Squeeze profiles f(x): non-decreasing maps that are affine with unit slope
// outside a finite squeezed region,
//   f(x) = x + l_left   left of the region,
//   f(x) = x - l_right  right of it,
// with total shift l = l_left + l_right. The squeezed state built on the modes
// exp(-i w f(x)) / sqrt(4 pi w) has the two-point function
//   <Pi(x) Pi(x')> = -f'(x) f'(x') / (4 pi (f(x) - f(x'))^2).

#include <complex>
#include <functional>
#include <memory>
#include <string_view>
#include <utility>
#include <vector>

#include "qet/interpolation.hpp"
#include "qet/quadrature.hpp"

namespace qet {

enum class SqueezeKind { identity, piecewise_quadratic, tabulated, scale_factor };

std::string_view to_string(SqueezeKind kind) noexcept;
SqueezeKind squeeze_kind_from_string(std::string_view name);

enum class Side { left, right };

class SqueezeProfile {
 public:
  static SqueezeProfile identity();

  /// Odd profile: f = u0 x on [0, xbar], f = x - l/2 + lambda (x - d)^2 on
  /// [xbar, d], f = x - l/2 beyond d, with u0 = 1 - 2 lambda (d - xbar) and
  /// l = 2 lambda (d^2 - xbar^2). Requires 0 < xbar < d and
  /// 0 < lambda < 1 / (2 (d - xbar)).
  static SqueezeProfile piecewise_quadratic(double lambda, double xbar, double d);

  /// Piecewise-quadratic profile with half-width d and the given shift
  /// (0 <= l < 2d); identity when l = 0.
  static SqueezeProfile piecewise_quadratic_for_shift(double l, double d);

  /// Monotone C1 interpolant of samples (x, f(x)); the end slopes are pinned
  /// to 1 so the affine continuation is C1. Derivatives are clamped >= 1e-9.
  static SqueezeProfile tabulated(std::vector<std::pair<double, double>> table);

  /// f is the inverse of X(x) = int_0^x a(x') dx' for a piecewise-linear
  /// scale factor given as (x, a) samples; a = 1 outside the table. A
  /// repeated x encodes a jump of a (f is then only C0).
  static SqueezeProfile from_scale_factor(std::vector<std::pair<double, double>> a_table);

  /// Samples a callable scale factor at `samples` uniform points of `domain`.
  static SqueezeProfile from_scale_factor(const std::function<double(double)>& a,
                                          const Interval& domain, int samples = 1025);

  double operator()(double x) const;
  double derivative(double x) const;
  /// Inverse map f^{-1}(y).
  double inverse(double y) const;

  /// Derivatives 1..3 on the given side of x (the side only matters at knots).
  struct Jet {
    double d1, d2, d3;
  };
  Jet jet(double x, Side side) const;

  SqueezeKind kind() const noexcept { return kind_; }
  double shift() const noexcept { return shift_; }
  double left_offset() const noexcept { return left_offset_; }
  double right_offset() const noexcept { return right_offset_; }
  /// Region outside of which f is affine with unit slope.
  Interval squeezed_region() const noexcept { return region_; }
  /// Coordinates where the piecewise definition changes (sorted).
  const std::vector<double>& knots() const noexcept { return knots_; }
  bool is_knot(double x) const;
  /// Largest one-sided value/slope mismatch over the knots.
  double continuity_defect() const;
  bool is_c1() const { return continuity_defect() <= 1e-12; }
  double min_slope() const;

  double lambda() const noexcept { return lambda_; }
  double xbar() const noexcept { return xbar_; }
  double half_width() const noexcept { return half_width_; }
  /// Scale-factor table (x, a) for the scale_factor kind; empty otherwise.
  const std::vector<std::pair<double, double>>& scale_table() const;
  /// Samples (x, f(x)) for the tabulated kind; empty otherwise.
  const std::vector<std::pair<double, double>>& table() const;

 private:
  SqueezeProfile() = default;

  struct ScaleSegments;

  SqueezeKind kind_ = SqueezeKind::identity;
  double shift_ = 0.0;
  double left_offset_ = 0.0;
  double right_offset_ = 0.0;
  Interval region_{};
  std::vector<double> knots_;
  double lambda_ = 0.0;
  double xbar_ = 0.0;
  double half_width_ = 0.0;
  std::shared_ptr<const HermiteSpline> spline_;
  std::vector<std::pair<double, double>> table_;
  std::shared_ptr<const ScaleSegments> scale_;
};

/// v_w(x) = exp(-i w f(x)) / sqrt(4 pi w). Throws ParameterViolation for w <= 0.
std::complex<double> mode_function(const SqueezeProfile& f, double omega, double x);

/// f(x) - f(x'), evaluated so that points on the same asymptotic side give
/// exactly x - x' and opposite sides give exactly x - x' -+ l.
double image_difference(const SqueezeProfile& f, double x, double xp);

/// <f| Pi(x) Pi(x') |f> for separated points. Throws CoincidentPoints when
/// f(x) = f(x').
double squeezed_correlator(const SqueezeProfile& f, double x, double xp);

/// Vacuum kernel -1 / (4 pi (x - x')^2).
double vacuum_correlator(double x, double xp);

/// Pointwise energy density -S{f}(x) / (24 pi), S the Schwarzian derivative.
/// Throws KnotEvaluation at a knot; use the one-sided overload there.
double energy_density(const SqueezeProfile& f, double x);
double energy_density(const SqueezeProfile& f, double x, Side side);

/// Point masses of the density at knots where f'' jumps:
/// -(f''(k+) - f''(k-)) / (24 pi f'(k)). With these the density integrates to
/// the squeezing cost.
std::vector<std::pair<double, double>> knot_impulses(const SqueezeProfile& f);

/// Integral of the pointwise density plus knot impulses over `window`.
double integrated_density(const SqueezeProfile& f, const Interval& window,
                          const QuadratureConfig& cfg = {});

/// E_C = (1/48 pi) int (d/dx ln f'(x))^2 dx over the squeezed region.
/// Throws DivergentCost if f' falls below 1e-12 or f is not C1.
QuadratureResult squeeze_cost(const SqueezeProfile& f, const QuadratureConfig& cfg = {});

/// The same integral restricted to `window`.
QuadratureResult squeeze_cost(const SqueezeProfile& f, const Interval& window,
                              const QuadratureConfig& cfg);

/// Closed-form cost of the piecewise-quadratic family.
double piecewise_quadratic_cost(double lambda, double xbar, double d);

/// Real part of the cutoff mode sum
///   int_0^cutoff dw  dv_w(x) conj(dv_w(x')) exp(-eps w),
/// which tends to the correlator with f(x) - f(x') -> f(x) - f(x') - i eps.
QuadratureResult modesum_correlator(const SqueezeProfile& f, double x, double xp,
                                    double cutoff, double eps, const QuadratureConfig& cfg = {});

/// Bound on the change of the mode sum when the cutoff is raised past `cutoff`.
double modesum_tail_bound(double cutoff, double eps);

/// Regularized closed form -f'f' Re[1/(D - i eps)^2] / (4 pi), D = f(x) - f(x').
double regularized_correlator(const SqueezeProfile& f, double x, double xp, double eps);

}  // namespace qet
