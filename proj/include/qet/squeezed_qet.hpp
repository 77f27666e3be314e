#pragma once

// Teleported energy in a squeezed state whose profile leaves both parties in
// local-vacuum regions. Only the asymptotic shift l of the profile enters the
// protocol: the kernel denominator becomes (xb - xa + T - l).

#include "qet/profiles.hpp"
#include "qet/squeeze_profile.hpp"
#include "qet/vacuum_qet.hpp"

namespace qet {

/// Profile coordinates are those of the centered frame (x2A = -d,
/// x1B + T = d). Requires gA left of the squeezed region and gB (advanced by
/// T) right of it, and l <= L + T. Fills E_C (whole squeezed region),
/// E_C_window (over [x2A, x1B + T]) and the l = 0 companion E_B_vacuum.
TeleportReport teleported_energy_squeezed(const SmearingProfile& gA, const SmearingProfile& gB,
                                          const ProtocolGeometry& geo,
                                          const SqueezeProfile& profile,
                                          const QuadratureConfig& cfg = {});

}  // namespace qet
