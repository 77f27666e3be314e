#pragma once

// Smearing profiles g(x) that define the local field observables, and the
// protocol geometry they are placed in.

#include <memory>
#include <string_view>
#include <utility>
#include <vector>

#include "qet/interpolation.hpp"
#include "qet/quadrature.hpp"

namespace qet {

enum class ProfileFamily { gaussian, compact_bump, tabulated };

std::string_view to_string(ProfileFamily family) noexcept;
ProfileFamily profile_family_from_string(std::string_view name);

/// Real, square-integrable C1 coupling function.
///
/// - gaussian:     amplitude * exp(-(x - center)^2 / (2 width^2)); effective
///                 support [center - 8 width, center + 8 width].
/// - compact_bump: amplitude * (1 - u^2)^3 with u = (x - center) / width on
///                 |u| < 1 (C2, vanishes identically outside).
/// - tabulated:    monotone cubic Hermite through user samples, endpoint
///                 values forced to zero.
class SmearingProfile {
 public:
  static SmearingProfile gaussian(double center, double width, double amplitude = 1.0);
  static SmearingProfile compact_bump(double center, double width, double amplitude = 1.0);
  static SmearingProfile tabulated(std::vector<std::pair<double, double>> table);

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  ProfileFamily family() const noexcept { return family_; }
  double center() const noexcept { return center_; }
  double width() const noexcept { return width_; }
  double amplitude() const noexcept { return amplitude_; }
  /// Region outside which the profile is (effectively) zero.
  Interval support() const noexcept { return support_; }
  /// Knots of the tabulated representation; empty for analytic families.
  const std::vector<double>& knots() const;
  /// True when the profile takes both signs.
  bool is_signed() const noexcept { return signed_; }

  SmearingProfile translated(double shift) const;
  SmearingProfile scaled(double factor) const;
  SmearingProfile mirrored() const;

  /// Samples suitable for rebuilding the profile as a table.
  std::vector<std::pair<double, double>> sample(int points) const;

 private:
  SmearingProfile() = default;

  ProfileFamily family_ = ProfileFamily::gaussian;
  double center_ = 0.0;
  double width_ = 1.0;
  double amplitude_ = 1.0;
  Interval support_{};
  bool signed_ = false;
  std::shared_ptr<const HermiteSpline> table_;
};

/// Alice region [x1A, x2A], Bob region [x1B, x2B], classical communication
/// time T. L = x1B - x2A, d = (L + T) / 2.
struct ProtocolGeometry {
  double x1A = 0.0;
  double x2A = 0.0;
  double x1B = 0.0;
  double x2B = 0.0;
  double T = 0.0;

  double L() const noexcept { return x1B - x2A; }
  double d() const noexcept { return 0.5 * (L() + T); }
  Interval alice() const noexcept { return {x1A, x2A}; }
  Interval bob() const noexcept { return {x1B, x2B}; }

  /// Throws GeometryViolation for ordering failures or T < 0.
  void validate() const;
  ProtocolGeometry translated(double shift) const;
  /// Translation that puts x2A at -d (and therefore x1B + T at +d).
  double centering_shift() const noexcept { return -d() - x2A; }
};

/// Profiles and geometry after validation, translated to the centered frame.
struct CheckedConfiguration {
  SmearingProfile gA;
  SmearingProfile gB;
  ProtocolGeometry geometry;
  double applied_shift = 0.0;
  bool gA_signed = false;
  bool gB_signed = false;
};

/// Checks gA inside Alice's region and gB inside Bob's region (effective
/// support for gaussians) and applies the centering translation.
/// Throws SupportViolation naming the offending profile, or GeometryViolation.
CheckedConfiguration validate_assignment(const SmearingProfile& gA, const SmearingProfile& gB,
                                         const ProtocolGeometry& geo);

/// |g~(omega)|^2 with g~(omega) = int g(x) exp(-i omega x) dx.
double fourier_power(const SmearingProfile& g, double omega,
                     const QuadratureConfig& cfg = {});

/// Frequency beyond which |g~|^2 omega^power stays below cfg.abs_tol.
double frequency_cutoff(const SmearingProfile& g, int power, const QuadratureConfig& cfg = {});

/// G = int (dg/dx)^2 dx. Throws DegenerateProfile when it vanishes.
double gradient_norm_GB(const SmearingProfile& g, const QuadratureConfig& cfg = {});

/// Integrates f over the support of g, breaking at table knots.
QuadratureResult integrate_on_support(const SmearingProfile& g, const Integrand& f,
                                      const QuadratureConfig& cfg);

/// int g(x) dx.
double profile_area(const SmearingProfile& g, const QuadratureConfig& cfg = {});

}  // namespace qet
