#include "qet/squeezed_qet.hpp"

#include <cmath>
#include <sstream>

#include "qet/errors.hpp"

namespace qet {

TeleportReport teleported_energy_squeezed(const SmearingProfile& gA, const SmearingProfile& gB,
                                          const ProtocolGeometry& geo,
                                          const SqueezeProfile& profile,
                                          const QuadratureConfig& cfg) {
  const CheckedConfiguration checked = validate_assignment(gA, gB, geo);
  const ProtocolGeometry& g = checked.geometry;
  const double l = profile.shift();
  if (l > g.L() + g.T) {
    std::ostringstream msg;
    msg << "shift l = " << l << " exceeds L + T = " << g.L() + g.T;
    throw Error(ErrorCode::ParameterViolation, msg.str());
  }
  if (profile.kind() != SqueezeKind::identity) {
    const Interval region = profile.squeezed_region();
    // Centering moves supports by a float shift; allow for rounding there.
    const double slack = 1e-12 * (1.0 + std::abs(region.lo) + std::abs(region.hi));
    if (checked.gA.support().hi > region.lo + slack) {
      std::ostringstream msg;
      msg << "gA support reaches " << checked.gA.support().hi
          << " inside the squeezed region starting at " << region.lo << " (centered frame)";
      throw Error(ErrorCode::SupportViolation, msg.str());
    }
    if (checked.gB.support().lo + g.T < region.hi - slack) {
      std::ostringstream msg;
      msg << "gB support advanced by T starts at " << checked.gB.support().lo + g.T
          << " inside the squeezed region ending at " << region.hi << " (centered frame)";
      throw Error(ErrorCode::SupportViolation, msg.str());
    }
  }

  TeleportReport rep = evaluate_protocol(checked, l, cfg);
  rep.squeezed = true;
  rep.E_C = squeeze_cost(profile, cfg).value;
  rep.E_C_window = squeeze_cost(profile, Interval{g.x2A, g.x1B + g.T}, cfg).value;
  rep.E_B_vacuum = l == 0.0 ? rep.E_B : evaluate_protocol(checked, 0.0, cfg).E_B;
  return rep;
}

}  // namespace qet
