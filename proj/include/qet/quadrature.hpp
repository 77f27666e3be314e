#pragma once

// Adaptive quadrature services: global-adaptive Gauss-Kronrod in one
// dimension, tensor-product Gauss-Kronrod cubature over rectangles, and
// truncation of semi-infinite frequency integrals.

#include <functional>
#include <span>

namespace qet {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  bool contains(const Interval& other) const noexcept {
    return other.lo >= lo && other.hi <= hi;
  }
};

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 4000;
  /// Upper cap for truncated frequency integrals (inverse length).
  double freq_cutoff = 1e4;
  /// Point-split regulator, used only by mode-sum reconstructions.
  double epsilon_regulator = 1e-2;
  /// Grid size for discretized functionals.
  int grid_points = 1024;

  /// Throws ParameterViolation when an invariant is broken.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
};

/// Integrable endpoint singularities the caller declares for integrate_1d.
/// Declared endpoints are removed with the substitution x = a + (b - a) t^2.
enum class EndpointSingularity { none, left, right, both };

using Integrand = std::function<double(double)>;

/// Global adaptive G10/K21 integration of f over [a, b].
/// Throws NonConvergence when max_subdivisions is exhausted.
QuadratureResult integrate_1d(const Integrand& f, double a, double b,
                              const QuadratureConfig& cfg,
                              EndpointSingularity singular = EndpointSingularity::none);

/// Same as integrate_1d with the initial partition fixed by `breaks`
/// (sorted, first/last are the integration limits). Use for integrands that
/// are only piecewise smooth, or strongly oscillatory over a long range.
QuadratureResult integrate_1d(const Integrand& f, std::span<const double> breaks,
                              const QuadratureConfig& cfg);

/// Smallest omega >= start (stepping geometrically) past which |f| stays below
/// cfg.abs_tol over a full window, capped at cfg.freq_cutoff.
double truncation_point(const Integrand& f, double start, const QuadratureConfig& cfg);

struct Kernel2D {
  std::function<double(double, double)> value;
  /// Optional lower bound of the kernel's denominator over a cell. A
  /// non-positive bound on the domain is a SingularKernel error; small
  /// positive bounds drive refinement toward the nearly singular corner.
  std::function<double(const Interval&, const Interval&)> denominator_min;
};

/// Adaptive tensor-product G7/K15 cubature of k over domain_a x domain_b.
QuadratureResult integrate_2d(const Kernel2D& k, const Interval& domain_a,
                              const Interval& domain_b, const QuadratureConfig& cfg);

}  // namespace qet
