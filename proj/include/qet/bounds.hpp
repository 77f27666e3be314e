#pragma once

// Flanagan's quantum energy inequality for a chiral massless field: for any
// sampling function xi >= 0 that vanishes on Alice's side and equals one on
// Bob's region, the energy Bob extracts obeys
//   E_B <= (1/12 pi) int (d sqrt(xi)/dx)^2 dx.
// Minimizing over xi gives 1/(12 pi L) in the limit of an infinitely slow tail.

#include <optional>
#include <vector>

#include "qet/profiles.hpp"
#include "qet/vacuum_qet.hpp"

namespace qet {

/// xi sampled on a sorted grid; xi is linear in sqrt between samples and zero
/// outside the grid. A repeated coordinate encodes a jump.
struct SamplingFunction {
  std::vector<double> grid;
  std::vector<double> values;

  /// Throws ParameterViolation for unsorted grids, size mismatch, or xi < 0.
  void validate() const;
  /// True when xi = 0 up to x2A, xi = 1 on [x1B, x2B] (checked at the grid
  /// points inside those ranges).
  bool satisfies_boundary(const ProtocolGeometry& geo, double tol = 1e-12) const;
};

/// (1/12 pi) sum (Delta sqrt(xi))^2 / Delta x. Throws NonFiniteFunctional if
/// sqrt(xi) jumps (zero-width step or nonzero end value).
double flanagan_functional(const SamplingFunction& xi);

struct FlanaganMinimum {
  SamplingFunction xi;
  double value = 0.0;
  /// Contribution of the gap [x2A, x1B] and of the tail [x2B, x2B + tail].
  double gap_part = 0.0;
  double tail_part = 0.0;
  int gap_points = 0;
  int tail_points = 0;
};

/// Minimizes over h = sqrt(xi) with h(x2A) = 0, h = 1 on [x1B, x2B] and
/// h(x2B + tail) = 0 by solving the discrete Euler-Lagrange equations
/// (tridiagonal). Requires grid_points >= 64 and tail_length > 0.
FlanaganMinimum minimize_flanagan(const ProtocolGeometry& geo, double tail_length, int grid_points);

/// Same minimum by conjugate gradients on the quadratic form; for cross-checks
/// on small grids. Throws SolverFailure without convergence.
FlanaganMinimum minimize_flanagan_iterative(const ProtocolGeometry& geo, double tail_length,
                                            int grid_points);

/// (1/12 pi)(1/L + 1/tail): the exact minimum of the continuous problem.
double flanagan_minimum_exact(double L, double tail_length);

struct BoundCertification {
  double bound_value = 0.0;
  double bound_ratio = 0.0;
  /// False for squeezed-state runs, where the inequality does not constrain
  /// the protocol.
  bool applicable = true;
  /// Pass iff ratio <= 1 + 1e-9; empty when not applicable.
  std::optional<bool> pass;
};

BoundCertification certify_bound(const TeleportReport& report, const ProtocolGeometry& geo);

}  // namespace qet
