#include "qet/squeeze_profile.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qet/errors.hpp"

namespace qet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSlopeFloor = 1e-9;
constexpr double kDivergenceSlope = 1e-12;

[[noreturn]] void violation(const std::string& what) {
  throw Error(ErrorCode::ParameterViolation, what);
}

Side flip(Side s) { return s == Side::left ? Side::right : Side::left; }

}  // namespace

struct SqueezeProfile::ScaleSegments {
  std::vector<double> x;   // pre-image coordinates of the samples
  std::vector<double> a;   // scale factor at the samples
  std::vector<double> X;   // X(x) = int_0^x a
  std::vector<double> distinct_X;

  // Index of the segment holding y (by side at knots); -1 left asymptote,
  // size()-1 right asymptote.
  long locate(double y, Side side) const {
    const auto it = side == Side::left ? std::lower_bound(X.begin(), X.end(), y)
                                       : std::upper_bound(X.begin(), X.end(), y);
    return static_cast<long>(it - X.begin()) - 1;
  }

  // Pre-image offset t from x[i] with X(x[i] + t) = y.
  double solve(long i, double y) const {
    const double s = slope(i);
    const double r = y - X[i];
    return 2.0 * r / (a[i] + std::sqrt(a[i] * a[i] + 2.0 * s * r));
  }

  double slope(long i) const { return (a[i + 1] - a[i]) / (x[i + 1] - x[i]); }
};

std::string_view to_string(SqueezeKind kind) noexcept {
  switch (kind) {
    case SqueezeKind::identity: return "identity";
    case SqueezeKind::piecewise_quadratic: return "piecewise_quadratic";
    case SqueezeKind::tabulated: return "tabulated";
    case SqueezeKind::scale_factor: return "scale_factor";
  }
  return "unknown";
}

SqueezeKind squeeze_kind_from_string(std::string_view name) {
  if (name == "identity") return SqueezeKind::identity;
  if (name == "piecewise_quadratic") return SqueezeKind::piecewise_quadratic;
  if (name == "tabulated") return SqueezeKind::tabulated;
  if (name == "scale_factor") return SqueezeKind::scale_factor;
  throw Error(ErrorCode::ConfigError, "unknown squeeze profile kind '" + std::string(name) + "'");
}

SqueezeProfile SqueezeProfile::identity() { return SqueezeProfile{}; }

SqueezeProfile SqueezeProfile::piecewise_quadratic(double lambda, double xbar, double d) {
  if (!std::isfinite(lambda) || !std::isfinite(xbar) || !std::isfinite(d)) {
    violation("piecewise_quadratic parameters must be finite");
  }
  if (!(d > 0.0)) violation("piecewise_quadratic requires d > 0");
  if (!(xbar > 0.0 && xbar < d)) violation("piecewise_quadratic requires 0 < xbar < d");
  if (!(lambda > 0.0)) violation("piecewise_quadratic requires lambda > 0");
  if (!(2.0 * lambda * (d - xbar) < 1.0)) {
    violation("piecewise_quadratic requires lambda < 1/(2(d - xbar))");
  }
  SqueezeProfile p;
  p.kind_ = SqueezeKind::piecewise_quadratic;
  p.lambda_ = lambda;
  p.xbar_ = xbar;
  p.half_width_ = d;
  p.shift_ = 2.0 * lambda * (d * d - xbar * xbar);
  p.left_offset_ = 0.5 * p.shift_;
  p.right_offset_ = 0.5 * p.shift_;
  p.region_ = {-d, d};
  p.knots_ = {-d, -xbar, xbar, d};
  return p;
}

SqueezeProfile SqueezeProfile::piecewise_quadratic_for_shift(double l, double d) {
  if (!(d > 0.0)) violation("profile half-width d must be > 0");
  if (!(l >= 0.0) || !(l < 2.0 * d)) violation("shift must satisfy 0 <= l < 2d");
  if (l == 0.0) return identity();
  // Any xbar in (max(0, l - d), d) is admissible; the midpoint rule below keeps
  // the inner slope u0 = 1 - l/(d + xbar) away from zero as l -> 2d.
  const double xbar = std::max(0.5 * d, 0.5 * l);
  const double lambda = l / (2.0 * (d * d - xbar * xbar));
  return piecewise_quadratic(lambda, xbar, d);
}

SqueezeProfile SqueezeProfile::tabulated(std::vector<std::pair<double, double>> table) {
  if (table.size() < 4) violation("tabulated squeeze profile needs at least 4 samples");
  std::sort(table.begin(), table.end());
  std::vector<double> x, y;
  for (const auto& [xi, yi] : table) {
    if (!std::isfinite(xi) || !std::isfinite(yi)) violation("tabulated samples must be finite");
    if (!x.empty() && xi == x.back()) violation("tabulated squeeze profile has duplicate coordinates");
    if (!y.empty() && yi < y.back()) violation("tabulated squeeze profile must be non-decreasing");
    x.push_back(xi);
    y.push_back(yi);
  }
  auto slopes = HermiteSpline::monotone_slopes(x, y);
  slopes.front() = 1.0;
  slopes.back() = 1.0;
  for (auto& m : slopes) m = std::max(m, kSlopeFloor);

  SqueezeProfile p;
  p.kind_ = SqueezeKind::tabulated;
  p.left_offset_ = y.front() - x.front();
  p.right_offset_ = x.back() - y.back();
  p.shift_ = p.left_offset_ + p.right_offset_;
  if (!(p.shift_ >= 0.0)) violation("tabulated squeeze profile has negative shift l");
  p.region_ = {x.front(), x.back()};
  p.half_width_ = 0.5 * p.region_.width();
  p.knots_ = x;
  p.table_ = std::move(table);
  p.spline_ = std::make_shared<const HermiteSpline>(std::move(x), std::move(y), std::move(slopes));
  if (p.spline_->min_derivative() < 0.0) {
    violation("tabulated squeeze profile is not monotone with unit end slopes");
  }
  return p;
}

SqueezeProfile SqueezeProfile::from_scale_factor(std::vector<std::pair<double, double>> a_table) {
  if (a_table.size() < 2) violation("scale factor table needs at least 2 samples");
  std::stable_sort(a_table.begin(), a_table.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  auto seg = std::make_shared<ScaleSegments>();
  for (const auto& [xi, ai] : a_table) {
    if (!std::isfinite(xi) || !std::isfinite(ai)) violation("scale factor samples must be finite");
    if (!(ai > 0.0)) violation("scale factor must be positive everywhere (a > 0)");
    if (seg->x.size() >= 2 && xi == seg->x.back() && xi == seg->x[seg->x.size() - 2]) {
      violation("scale factor table repeats a coordinate more than twice");
    }
    seg->x.push_back(xi);
    seg->a.push_back(ai);
  }
  const std::size_t n = seg->x.size();

  // Cumulative int_{x0}^{x} (a - 1), exact for piecewise-linear a.
  std::vector<double> excess(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double h = seg->x[i] - seg->x[i - 1];
    excess[i] = excess[i - 1] + h * (0.5 * (seg->a[i] + seg->a[i - 1]) - 1.0);
  }
  // Excess at the origin, where X is anchored.
  double at_origin = 0.0;
  if (seg->x.back() <= 0.0) {
    at_origin = excess.back();
  } else if (seg->x.front() < 0.0) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (seg->x[i + 1] >= 0.0 && seg->x[i] <= 0.0 && seg->x[i + 1] > seg->x[i]) {
        const double h = -seg->x[i];
        const double s = (seg->a[i + 1] - seg->a[i]) / (seg->x[i + 1] - seg->x[i]);
        at_origin = excess[i] + h * (seg->a[i] + 0.5 * s * h - 1.0);
        break;
      }
    }
  }
  seg->X.resize(n);
  for (std::size_t i = 0; i < n; ++i) seg->X[i] = seg->x[i] + excess[i] - at_origin;
  for (double v : seg->X) {
    if (seg->distinct_X.empty() || v != seg->distinct_X.back()) seg->distinct_X.push_back(v);
  }

  SqueezeProfile p;
  p.kind_ = SqueezeKind::scale_factor;
  p.left_offset_ = at_origin;
  p.right_offset_ = excess.back() - at_origin;
  p.shift_ = excess.back();
  if (!(p.shift_ >= 0.0)) violation("scale factor gives negative shift l (int (a - 1) < 0)");
  p.region_ = {seg->X.front(), seg->X.back()};
  p.half_width_ = 0.5 * p.region_.width();
  p.knots_ = seg->distinct_X;
  p.table_ = std::move(a_table);
  p.scale_ = std::move(seg);
  return p;
}

SqueezeProfile SqueezeProfile::from_scale_factor(const std::function<double(double)>& a,
                                                 const Interval& domain, int samples) {
  if (samples < 2) violation("scale factor sampling needs at least 2 points");
  if (!(domain.hi > domain.lo)) violation("scale factor domain must have positive width");
  std::vector<std::pair<double, double>> table;
  table.reserve(static_cast<std::size_t>(samples) + 2);
  const bool jump_left = a(domain.lo) != 1.0;
  const bool jump_right = a(domain.hi) != 1.0;
  if (jump_left) table.emplace_back(domain.lo, 1.0);
  for (int i = 0; i < samples; ++i) {
    const double x = domain.lo + domain.width() * i / (samples - 1);
    table.emplace_back(x, a(x));
  }
  if (jump_right) table.emplace_back(domain.hi, 1.0);
  return from_scale_factor(std::move(table));
}

double SqueezeProfile::operator()(double x) const {
  if (x <= region_.lo) return x + left_offset_;
  if (x >= region_.hi) return x - right_offset_;
  switch (kind_) {
    case SqueezeKind::identity: return x;
    case SqueezeKind::piecewise_quadratic: {
      const double ax = std::abs(x);
      const double d = half_width_;
      double v;
      if (ax <= xbar_) {
        v = (1.0 - 2.0 * lambda_ * (d - xbar_)) * ax;
      } else {
        v = ax - 0.5 * shift_ + lambda_ * (ax - d) * (ax - d);
      }
      return x < 0.0 ? -v : v;
    }
    case SqueezeKind::tabulated: return spline_->value(x);
    case SqueezeKind::scale_factor: {
      const long i = scale_->locate(x, Side::right);
      return scale_->x[i] + scale_->solve(i, x);
    }
  }
  return x;
}

SqueezeProfile::Jet SqueezeProfile::jet(double x, Side side) const {
  const Jet affine{1.0, 0.0, 0.0};
  const bool left_of = x < region_.lo || (x == region_.lo && side == Side::left);
  const bool right_of = x > region_.hi || (x == region_.hi && side == Side::right);
  if (kind_ == SqueezeKind::identity || left_of || right_of) return affine;

  switch (kind_) {
    case SqueezeKind::identity: return affine;
    case SqueezeKind::piecewise_quadratic: {
      if (x < 0.0) {
        const Jet j = jet(-x, flip(side));
        return {j.d1, -j.d2, j.d3};
      }
      const bool inner = x < xbar_ || (x == xbar_ && side == Side::left);
      if (inner) return {1.0 - 2.0 * lambda_ * (half_width_ - xbar_), 0.0, 0.0};
      return {1.0 + 2.0 * lambda_ * (x - half_width_), 2.0 * lambda_, 0.0};
    }
    case SqueezeKind::tabulated: {
      std::size_t seg = spline_->segment(x);
      const auto& k = spline_->knots();
      if (side == Side::left && seg > 0 && x == k[seg]) --seg;
      const auto j = spline_->jet_on_segment(seg, x);
      return {std::max(j.d1, kSlopeFloor), j.d2, j.d3};
    }
    case SqueezeKind::scale_factor: {
      const long i = scale_->locate(x, side);
      const double s = scale_->slope(i);
      const double a = scale_->a[i] + s * scale_->solve(i, x);
      return {1.0 / a, -s / (a * a * a), 3.0 * s * s / (a * a * a * a * a)};
    }
  }
  return affine;
}

double SqueezeProfile::derivative(double x) const { return jet(x, Side::right).d1; }

double SqueezeProfile::inverse(double y) const {
  if (kind_ == SqueezeKind::identity) return y;
  const double left_y = region_.lo + left_offset_;
  const double right_y = region_.hi - right_offset_;
  if (y <= left_y) return y - left_offset_;
  if (y >= right_y) return y + right_offset_;
  if (kind_ == SqueezeKind::scale_factor) {
    // f^{-1} = X is explicit: piecewise quadratic in the sample coordinates.
    const auto& sc = *scale_;
    const auto it = std::upper_bound(sc.x.begin(), sc.x.end(), y);
    const std::size_t i = static_cast<std::size_t>(it - sc.x.begin()) - 1;
    const double t = y - sc.x[i];
    return sc.X[i] + t * (sc.a[i] + 0.5 * sc.slope(static_cast<long>(i)) * t);
  }
  auto residual = [&](double x) { return (*this)(x) - y; };
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iterations = 200;
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(residual, region_.lo, region_.hi, tol, iterations);
  return 0.5 * (lo + hi);
}

bool SqueezeProfile::is_knot(double x) const {
  return std::binary_search(knots_.begin(), knots_.end(), x);
}

double SqueezeProfile::continuity_defect() const {
  double defect = 0.0;
  for (double k : knots_) {
    defect = std::max(defect, std::abs(jet(k, Side::left).d1 - jet(k, Side::right).d1));
  }
  if (kind_ == SqueezeKind::piecewise_quadratic) {
    const double d = half_width_;
    const double inner = (1.0 - 2.0 * lambda_ * (d - xbar_)) * xbar_;
    const double middle = xbar_ - 0.5 * shift_ + lambda_ * (xbar_ - d) * (xbar_ - d);
    // A value mismatch, measured relative to the profile's size.
    defect = std::max(defect, std::abs(inner - middle) / std::max(1.0, d));
  }
  return defect;
}

double SqueezeProfile::min_slope() const {
  switch (kind_) {
    case SqueezeKind::identity: return 1.0;
    case SqueezeKind::piecewise_quadratic:
      return std::min(1.0, 1.0 - 2.0 * lambda_ * (half_width_ - xbar_));
    case SqueezeKind::tabulated: return std::min(1.0, spline_->min_derivative());
    case SqueezeKind::scale_factor:
      return 1.0 / std::max(1.0, *std::max_element(scale_->a.begin(), scale_->a.end()));
  }
  return 1.0;
}

const std::vector<std::pair<double, double>>& SqueezeProfile::scale_table() const {
  static const std::vector<std::pair<double, double>> none;
  return kind_ == SqueezeKind::scale_factor ? table_ : none;
}

const std::vector<std::pair<double, double>>& SqueezeProfile::table() const {
  static const std::vector<std::pair<double, double>> none;
  return kind_ == SqueezeKind::tabulated ? table_ : none;
}

std::complex<double> mode_function(const SqueezeProfile& f, double omega, double x) {
  if (!(omega > 0.0)) violation("mode function requires omega > 0");
  return std::polar(1.0 / std::sqrt(4.0 * kPi * omega), -omega * f(x));
}

double image_difference(const SqueezeProfile& f, double x, double xp) {
  const Interval r = f.squeezed_region();
  auto side_of = [&](double v) { return v <= r.lo ? -1 : (v >= r.hi ? 1 : 0); };
  const int sx = side_of(x), sp = side_of(xp);
  if (f.kind() == SqueezeKind::identity || (sx != 0 && sx == sp)) return x - xp;
  if (sx == 1 && sp == -1) return (x - xp) - f.shift();
  if (sx == -1 && sp == 1) return (x - xp) + f.shift();
  return f(x) - f(xp);
}

double squeezed_correlator(const SqueezeProfile& f, double x, double xp) {
  const double diff = image_difference(f, x, xp);
  if (diff == 0.0) {
    std::ostringstream msg;
    msg << "f(x) = f(x') at x = " << x << ", x' = " << xp;
    throw Error(ErrorCode::CoincidentPoints, msg.str());
  }
  return -f.derivative(x) * f.derivative(xp) / (4.0 * kPi * diff * diff);
}

double vacuum_correlator(double x, double xp) {
  const double diff = x - xp;
  if (diff == 0.0) throw Error(ErrorCode::CoincidentPoints, "x = x' in the vacuum kernel");
  return -1.0 / (4.0 * kPi * diff * diff);
}

double energy_density(const SqueezeProfile& f, double x, Side side) {
  const auto j = f.jet(x, side);
  const double r = j.d2 / j.d1;
  const double schwarzian = j.d3 / j.d1 - 1.5 * r * r;
  return -schwarzian / (24.0 * kPi);
}

double energy_density(const SqueezeProfile& f, double x) {
  if (f.is_knot(x)) {
    std::ostringstream msg;
    msg << "energy density requested at knot x = " << x << "; take a one-sided limit";
    throw Error(ErrorCode::KnotEvaluation, msg.str());
  }
  return energy_density(f, x, Side::right);
}

std::vector<std::pair<double, double>> knot_impulses(const SqueezeProfile& f) {
  std::vector<std::pair<double, double>> out;
  for (double k : f.knots()) {
    const auto l = f.jet(k, Side::left);
    const auto r = f.jet(k, Side::right);
    const double jump = r.d2 - l.d2;
    if (jump != 0.0) out.emplace_back(k, -jump / (24.0 * kPi * 0.5 * (l.d1 + r.d1)));
  }
  return out;
}

namespace {

std::vector<double> window_breaks(const SqueezeProfile& f, const Interval& w) {
  std::vector<double> b{w.lo};
  for (double k : f.knots()) {
    if (k > w.lo && k < w.hi) b.push_back(k);
  }
  b.push_back(w.hi);
  return b;
}

Interval clip(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

}  // namespace

double integrated_density(const SqueezeProfile& f, const Interval& window,
                          const QuadratureConfig& cfg) {
  if (f.kind() == SqueezeKind::identity) return 0.0;
  const Interval w = clip(window, f.squeezed_region());
  double total = 0.0;
  if (w.hi > w.lo) {
    total = integrate_1d([&](double x) { return energy_density(f, x, Side::right); },
                         window_breaks(f, w), cfg)
                .value;
  }
  for (const auto& [k, weight] : knot_impulses(f)) {
    if (k >= window.lo && k <= window.hi) total += weight;
  }
  return total;
}

QuadratureResult squeeze_cost(const SqueezeProfile& f, const Interval& window,
                              const QuadratureConfig& cfg) {
  if (f.kind() == SqueezeKind::identity) return {};
  const double slope = f.min_slope();
  if (slope < kDivergenceSlope) {
    std::ostringstream msg;
    msg << "min f' = " << slope << " is below " << kDivergenceSlope;
    throw Error(ErrorCode::DivergentCost, msg.str());
  }
  if (!f.is_c1()) {
    std::ostringstream msg;
    msg << "f' jumps by " << f.continuity_defect()
        << " at a knot; the cost integral has a delta-squared divergence";
    throw Error(ErrorCode::DivergentCost, msg.str());
  }
  const Interval w = clip(window, f.squeezed_region());
  if (!(w.hi > w.lo)) return {};
  auto r = integrate_1d(
      [&](double x) {
        const auto j = f.jet(x, Side::right);
        const double q = j.d2 / j.d1;
        return q * q;
      },
      window_breaks(f, w), cfg);
  r.value /= 48.0 * kPi;
  r.error /= 48.0 * kPi;
  return r;
}

QuadratureResult squeeze_cost(const SqueezeProfile& f, const QuadratureConfig& cfg) {
  return squeeze_cost(f, f.squeezed_region(), cfg);
}

double piecewise_quadratic_cost(double lambda, double xbar, double d) {
  const double u0 = 1.0 - 2.0 * lambda * (d - xbar);
  return lambda * (1.0 / u0 - 1.0) / (12.0 * kPi);
}

QuadratureResult modesum_correlator(const SqueezeProfile& f, double x, double xp, double cutoff,
                                    double eps, const QuadratureConfig& cfg) {
  if (!(eps > 0.0)) violation("mode sum requires eps > 0");
  if (!(cutoff > 0.0)) violation("mode sum requires a positive cutoff");
  const double diff = image_difference(f, x, xp);
  const double pref = f.derivative(x) * f.derivative(xp) / (4.0 * kPi);
  // One panel per half period of cos(w D).
  std::vector<double> breaks{0.0};
  if (diff != 0.0) {
    const double step = std::max(kPi / std::abs(diff), cutoff / 100000.0);
    for (double w = step; w < cutoff; w += step) breaks.push_back(w);
  }
  breaks.push_back(cutoff);
  auto r = integrate_1d(
      [&](double w) { return w * std::cos(w * diff) * std::exp(-eps * w); }, breaks, cfg);
  r.value *= pref;
  r.error *= std::abs(pref);
  return r;
}

double modesum_tail_bound(double cutoff, double eps) {
  return std::exp(-eps * cutoff) * cutoff / (2.0 * kPi * eps);
}

double regularized_correlator(const SqueezeProfile& f, double x, double xp, double eps) {
  const double diff = image_difference(f, x, xp);
  const double d2 = diff * diff, e2 = eps * eps;
  return -f.derivative(x) * f.derivative(xp) * (d2 - e2) / (4.0 * kPi * (d2 + e2) * (d2 + e2));
}

}  // namespace qet
