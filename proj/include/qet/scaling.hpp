#pragma once

// Distance scans of the teleported energy and log-log exponent fits.

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "qet/profiles.hpp"
#include "qet/quadrature.hpp"

namespace qet {

enum class ScanMode { vacuum, squeezed_fixed_l, squeezed_tracking };

std::string_view to_string(ScanMode mode) noexcept;
ScanMode scan_mode_from_string(std::string_view name);

struct ScanPolicy {
  ScanMode mode = ScanMode::vacuum;
  /// Shift used by squeezed_fixed_l.
  double fixed_l = 0.0;
  /// Tracking margin c0 (l = L + T - c0); defaults to 20 max(sigma) + T.
  std::optional<double> margin;
};

/// Profiles in a reference geometry. Scans keep Alice's region and gA fixed
/// and translate Bob's region and gB to reach each distance.
struct ProtocolSetup {
  SmearingProfile gA;
  SmearingProfile gB;
  ProtocolGeometry geometry;
};

struct ScanPoint {
  double L = 0.0;
  double l = 0.0;
  double E_A = 0.0;
  double E_C = 0.0;
  double E_B = 0.0;
  double bound_ratio = 0.0;
  /// True when the point lies in the fitted window.
  bool in_fit_window = false;
  /// E_B <= E_A + E_C (plausibility probe, never fatal).
  bool accounting_ok = true;
};

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Half-width of the 95% confidence interval of the slope.
  double half_width = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int points = 0;
};

struct ScanResult {
  ScanPolicy policy;
  double margin = 0.0;
  std::vector<ScanPoint> points;
  PowerLawFit fit;
  int accounting_violations = 0;
};

/// `points` log-spaced values from `from` to `to` inclusive.
std::vector<double> log_grid(double from, double to, int points);

/// Least-squares fit of ln y against ln x over x >= window_lo.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y, double window_lo);

/// Reference geometry with Bob (region and gB) translated to distance L.
ProtocolSetup setup_at_distance(const ProtocolSetup& setup, double L);

double default_margin(const ProtocolSetup& setup);

/// Concurrency width: QET_THREADS if set (>= 1), otherwise all cores.
int worker_count();

/// Requires >= 20 points spanning >= 2 decades. The fit uses the largest
/// decade of the grid.
ScanResult scan_distance(const ProtocolSetup& setup, std::span<const double> L_grid,
                         const QuadratureConfig& cfg = {});

ScanResult scan_distance_squeezed(const ProtocolSetup& setup, std::span<const double> L_grid,
                                  const ScanPolicy& policy, const QuadratureConfig& cfg = {});

/// Evaluates fn(0..n-1) on up to `workers` threads; results are returned in
/// index order and the lowest-index exception is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn, int workers) {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    const std::size_t extra =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1))) - (n > 0);
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < extra; ++k) pool.emplace_back(work);
    work();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace qet
