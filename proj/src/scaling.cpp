#include "qet/scaling.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "qet/errors.hpp"
#include "qet/squeezed_qet.hpp"
#include "qet/vacuum_qet.hpp"

namespace qet {

std::string_view to_string(ScanMode mode) noexcept {
  switch (mode) {
    case ScanMode::vacuum: return "vacuum";
    case ScanMode::squeezed_fixed_l: return "fixed_l";
    case ScanMode::squeezed_tracking: return "tracking";
  }
  return "unknown";
}

ScanMode scan_mode_from_string(std::string_view name) {
  if (name == "vacuum") return ScanMode::vacuum;
  if (name == "fixed_l" || name == "squeezed_fixed_l") return ScanMode::squeezed_fixed_l;
  if (name == "tracking" || name == "squeezed_tracking") return ScanMode::squeezed_tracking;
  throw Error(ErrorCode::ConfigError, "unknown scan mode '" + std::string(name) + "'");
}

std::vector<double> log_grid(double from, double to, int points) {
  if (!(from > 0.0) || !(to > from) || points < 2) {
    throw Error(ErrorCode::ParameterViolation, "log grid needs 0 < from < to and >= 2 points");
  }
  std::vector<double> g(static_cast<std::size_t>(points));
  const double lf = std::log(from), lt = std::log(to);
  for (int i = 0; i < points; ++i) g[i] = std::exp(lf + (lt - lf) * i / (points - 1));
  g.front() = from;
  g.back() = to;
  return g;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y,
                          double window_lo) {
  std::vector<double> lx, ly;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < window_lo) continue;
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) {
      throw Error(ErrorCode::NonConvergence, "power-law fit needs positive values in its window");
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
  }
  const std::size_t n = lx.size();
  if (n < 3) throw Error(ErrorCode::ParameterViolation, "power-law fit needs >= 3 points in its window");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - fit.intercept - fit.slope * lx[i];
    rss += r * r;
  }
  const double se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  const boost::math::students_t dist(static_cast<double>(n - 2));
  fit.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  // The sampled extent of the window, not the threshold.
  fit.window_lo = lo;
  fit.window_hi = hi;
  fit.points = static_cast<int>(n);
  return fit;
}

ProtocolSetup setup_at_distance(const ProtocolSetup& setup, double L) {
  if (!(L > 0.0)) throw Error(ErrorCode::GeometryViolation, "scan distance must be > 0");
  const double move = L - setup.geometry.L();
  ProtocolGeometry g = setup.geometry;
  g.x1B += move;
  g.x2B += move;
  // Pin L exactly rather than through the sum of shifts.
  g.x1B = g.x2A + L;
  return {setup.gA, setup.gB.translated(move), g};
}

double default_margin(const ProtocolSetup& setup) {
  return 20.0 * std::max(setup.gA.width(), setup.gB.width()) + setup.geometry.T;
}

int worker_count() {
  if (const char* env = std::getenv("QET_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw Error(ErrorCode::ConfigError, std::string("QET_THREADS must be a positive integer, got '") +
                                              env + "'");
    }
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.size() < 20) {
    throw Error(ErrorCode::ParameterViolation, "distance scans need at least 20 grid points");
  }
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12)) {
    throw Error(ErrorCode::ParameterViolation, "distance scans need a grid spanning >= 2 decades");
  }
}

ScanResult finish(ScanResult res) {
  std::vector<double> L, E;
  double top = 0.0;
  for (const auto& p : res.points) {
    L.push_back(p.L);
    E.push_back(p.E_B);
    top = std::max(top, p.L);
  }
  // Largest decade, with a little slack so a log grid's end point at exactly
  // top/10 is kept.
  const double window_lo = top / 10.0 * (1.0 - 1e-12);
  res.fit = fit_power_law(L, E, window_lo);
  for (auto& p : res.points) {
    p.in_fit_window = p.L >= window_lo;
    if (!p.accounting_ok) ++res.accounting_violations;
  }
  return res;
}

}  // namespace

ScanResult scan_distance(const ProtocolSetup& setup, std::span<const double> L_grid,
                         const QuadratureConfig& cfg) {
  return scan_distance_squeezed(setup, L_grid, ScanPolicy{}, cfg);
}

ScanResult scan_distance_squeezed(const ProtocolSetup& setup, std::span<const double> L_grid,
                                  const ScanPolicy& policy, const QuadratureConfig& cfg) {
  check_grid(L_grid);
  ScanResult res;
  res.policy = policy;
  res.margin = policy.margin.value_or(default_margin(setup));
  if (policy.mode == ScanMode::squeezed_tracking && !(res.margin > 0.0)) {
    throw Error(ErrorCode::ParameterViolation, "tracking margin c0 must be > 0");
  }
  if (policy.mode == ScanMode::squeezed_fixed_l && !(policy.fixed_l >= 0.0)) {
    throw Error(ErrorCode::ParameterViolation, "fixed shift l must be >= 0");
  }

  auto point = [&](std::size_t i) {
    const double L = L_grid[i];
    const ProtocolSetup s = setup_at_distance(setup, L);
    ScanPoint pt;
    pt.L = L;
    TeleportReport rep;
    if (policy.mode == ScanMode::vacuum) {
      rep = teleported_energy(s.gA, s.gB, s.geometry, cfg);
    } else {
      const double span = L + s.geometry.T;
      double l = policy.fixed_l;
      if (policy.mode == ScanMode::squeezed_tracking) {
        l = span - res.margin;
        if (l < 0.0) {
          std::ostringstream msg;
          msg << "tracking margin c0 = " << res.margin << " exceeds L + T = " << span;
          throw Error(ErrorCode::ParameterViolation, msg.str());
        }
      }
      const auto profile = SqueezeProfile::piecewise_quadratic_for_shift(l, 0.5 * span);
      rep = teleported_energy_squeezed(s.gA, s.gB, s.geometry, profile, cfg);
    }
    pt.l = rep.shift_l;
    pt.E_A = rep.E_A;
    pt.E_C = rep.E_C;
    pt.E_B = rep.E_B;
    pt.bound_ratio = rep.bound_ratio;
    pt.accounting_ok = pt.E_B <= pt.E_A + pt.E_C;
    return pt;
  };
  res.points = parallel_map(L_grid.size(), point, worker_count());
  return finish(std::move(res));
}

}  // namespace qet
