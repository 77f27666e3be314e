#pragma once

// Independent validation: the two Gaussian moments rebuilt from the mode
// expansion of the field in the state |f>,
//   <Pi(x) Pi(x')> = int_0^inf dw (w / 4 pi) f'(x) f'(x') exp(-i w (f(x) - f(x'))),
// damped by exp(-eps w), cut off at Omega and discretized with fixed-node
// rules. Nothing here goes through the adaptive quadrature engine.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qet/profiles.hpp"
#include "qet/squeeze_profile.hpp"

namespace qet {

enum class NodeRule { uniform, log };

struct ModeGrid {
  double cutoff = 0.0;   // Omega
  int n_modes = 0;
  double eps = 0.0;      // damping length
  NodeRule rule = NodeRule::uniform;

  /// Throws ParameterViolation unless Omega eps >= 5, eps > 0, n_modes >= 16.
  void validate() const;

  /// Omega = 100 / sigma_min, eps = 0.05 sigma_min, and enough modes to resolve
  /// the largest phase separation with 48 nodes per period.
  static ModeGrid for_configuration(const SmearingProfile& gA, const SmearingProfile& gB,
                                    const ProtocolGeometry& geo, const SqueezeProfile& profile,
                                    NodeRule rule = NodeRule::uniform);
};

struct OracleMoments {
  /// Extrapolated eps -> 0 values.
  double A_variance = 0.0;
  double AB_moment = 0.0;
  /// Raw values at eps, 2 eps and 4 eps.
  double A_variance_eps = 0.0;
  double A_variance_2eps = 0.0;
  double A_variance_4eps = 0.0;
  double AB_moment_eps = 0.0;
  double AB_moment_2eps = 0.0;
  double AB_moment_4eps = 0.0;
  /// |I(Omega) - I(Omega/2)| at the finest eps.
  double A_variance_truncation = 0.0;
  double AB_moment_truncation = 0.0;
  /// <A> vanishes for the Gaussian state, so p_mu = (1 +- e^{-2<A^2>} sin 2<A>)/2.
  double A_mean = 0.0;
  std::array<double, 2> p{};
  /// G_B by the oracle's own trapezoid rule.
  double G_B = 0.0;
  int x_nodes = 0;
  int modes = 0;
};

OracleMoments oracle_moments(const SmearingProfile& gA, const SmearingProfile& gB,
                             const ProtocolGeometry& geo, const SqueezeProfile& profile,
                             const ModeGrid& grid);

/// Test hook: corrupt the exp(-4 <A^2>) damping of the energy formula.
enum class OracleFault { none, damping };

OracleFault oracle_fault_from_string(std::string_view name);

/// E_B = 4 <AB'>^2 exp(-4 <A^2>) / G_B.
double oracle_energy(const OracleMoments& m, double G_B, OracleFault fault = OracleFault::none);

struct ComparisonEntry {
  std::string quantity;
  double oracle = 0.0;
  double main = 0.0;
  double rel_diff = 0.0;
  bool pass = false;
};

struct OracleComparison {
  std::vector<ComparisonEntry> entries;
  OracleMoments moments;
  ModeGrid grid;
  bool all_pass = false;
};

inline constexpr double kOracleTolerance = 0.01;

/// Runs the main protocol evaluation and the oracle on the same input and
/// compares <A^2>, <AB'> and E_B at 1% relative.
OracleComparison compare_with_oracle(const SmearingProfile& gA, const SmearingProfile& gB,
                                     const ProtocolGeometry& geo, const SqueezeProfile& profile,
                                     const QuadratureConfig& cfg = {},
                                     OracleFault fault = OracleFault::none,
                                     NodeRule rule = NodeRule::uniform);

}  // namespace qet
