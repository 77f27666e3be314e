#include "qet/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qet/errors.hpp"

namespace qet {

namespace {

constexpr double kGaussianReach = 8.0;

void require_parameter(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ParameterViolation, what);
}

std::string interval_text(const Interval& i) {
  std::ostringstream s;
  s << "[" << i.lo << ", " << i.hi << "]";
  return s.str();
}

}  // namespace

std::string_view to_string(ProfileFamily family) noexcept {
  switch (family) {
    case ProfileFamily::gaussian: return "gaussian";
    case ProfileFamily::compact_bump: return "compact_bump";
    case ProfileFamily::tabulated: return "tabulated";
  }
  return "unknown";
}

ProfileFamily profile_family_from_string(std::string_view name) {
  if (name == "gaussian") return ProfileFamily::gaussian;
  if (name == "compact_bump") return ProfileFamily::compact_bump;
  if (name == "tabulated") return ProfileFamily::tabulated;
  throw Error(ErrorCode::ConfigError, "unknown profile family '" + std::string(name) + "'");
}

SmearingProfile SmearingProfile::gaussian(double center, double width, double amplitude) {
  require_parameter(std::isfinite(center), "gaussian center must be finite");
  require_parameter(width > 0.0 && std::isfinite(width), "gaussian width must be > 0");
  require_parameter(amplitude != 0.0 && std::isfinite(amplitude), "profile amplitude must be nonzero");
  SmearingProfile p;
  p.family_ = ProfileFamily::gaussian;
  p.center_ = center;
  p.width_ = width;
  p.amplitude_ = amplitude;
  p.support_ = {center - kGaussianReach * width, center + kGaussianReach * width};
  return p;
}

SmearingProfile SmearingProfile::compact_bump(double center, double width, double amplitude) {
  require_parameter(std::isfinite(center), "bump center must be finite");
  require_parameter(width > 0.0 && std::isfinite(width), "bump width must be > 0");
  require_parameter(amplitude != 0.0 && std::isfinite(amplitude), "profile amplitude must be nonzero");
  SmearingProfile p;
  p.family_ = ProfileFamily::compact_bump;
  p.center_ = center;
  p.width_ = width;
  p.amplitude_ = amplitude;
  p.support_ = {center - width, center + width};
  return p;
}

SmearingProfile SmearingProfile::tabulated(std::vector<std::pair<double, double>> table) {
  require_parameter(table.size() >= 4, "tabulated profile needs at least 4 samples");
  std::sort(table.begin(), table.end());
  std::vector<double> x, y;
  x.reserve(table.size());
  y.reserve(table.size());
  for (const auto& [xi, yi] : table) {
    require_parameter(std::isfinite(xi) && std::isfinite(yi), "tabulated samples must be finite");
    if (!x.empty() && xi == x.back()) {
      throw Error(ErrorCode::ParameterViolation, "tabulated profile has duplicate coordinates");
    }
    x.push_back(xi);
    y.push_back(yi);
  }
  y.front() = 0.0;
  y.back() = 0.0;

  double weight = 0.0, first = 0.0, peak = 0.0;
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    weight += std::abs(y[i]);
    first += x[i] * std::abs(y[i]);
    if (std::abs(y[i]) > std::abs(peak)) peak = y[i];
    pos = pos || y[i] > 0.0;
    neg = neg || y[i] < 0.0;
  }
  require_parameter(weight > 0.0, "profile amplitude must be nonzero");
  const double center = first / weight;
  double second = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) second += (x[i] - center) * (x[i] - center) * std::abs(y[i]);

  SmearingProfile p;
  p.family_ = ProfileFamily::tabulated;
  p.center_ = center;
  p.width_ = std::sqrt(second / weight);
  p.amplitude_ = peak;
  p.support_ = {x.front(), x.back()};
  p.signed_ = pos && neg;
  auto slopes = HermiteSpline::monotone_slopes(x, y);
  p.table_ = std::make_shared<const HermiteSpline>(std::move(x), std::move(y), std::move(slopes));
  return p;
}

double SmearingProfile::operator()(double x) const {
  switch (family_) {
    case ProfileFamily::gaussian: {
      const double u = (x - center_) / width_;
      return amplitude_ * std::exp(-0.5 * u * u);
    }
    case ProfileFamily::compact_bump: {
      const double u = (x - center_) / width_;
      if (std::abs(u) >= 1.0) return 0.0;
      const double s = 1.0 - u * u;
      return amplitude_ * s * s * s;
    }
    case ProfileFamily::tabulated:
      if (x <= support_.lo || x >= support_.hi) return 0.0;
      return table_->value(x);
  }
  return 0.0;
}

double SmearingProfile::derivative(double x) const {
  switch (family_) {
    case ProfileFamily::gaussian: {
      const double u = (x - center_) / width_;
      return -amplitude_ * u / width_ * std::exp(-0.5 * u * u);
    }
    case ProfileFamily::compact_bump: {
      const double u = (x - center_) / width_;
      if (std::abs(u) >= 1.0) return 0.0;
      const double s = 1.0 - u * u;
      return -6.0 * amplitude_ * u * s * s / width_;
    }
    case ProfileFamily::tabulated:
      if (x < support_.lo || x > support_.hi) return 0.0;
      return table_->derivative(x);
  }
  return 0.0;
}

double SmearingProfile::second_derivative(double x) const {
  switch (family_) {
    case ProfileFamily::gaussian: {
      const double u = (x - center_) / width_;
      return amplitude_ * (u * u - 1.0) / (width_ * width_) * std::exp(-0.5 * u * u);
    }
    case ProfileFamily::compact_bump: {
      const double u = (x - center_) / width_;
      if (std::abs(u) >= 1.0) return 0.0;
      const double s = 1.0 - u * u;
      return amplitude_ * (-6.0 * s * s + 24.0 * u * u * s) / (width_ * width_);
    }
    case ProfileFamily::tabulated:
      if (x < support_.lo || x > support_.hi) return 0.0;
      return table_->second_derivative(x);
  }
  return 0.0;
}

const std::vector<double>& SmearingProfile::knots() const {
  static const std::vector<double> none;
  return table_ ? table_->knots() : none;
}

SmearingProfile SmearingProfile::translated(double shift) const {
  SmearingProfile p = *this;
  p.center_ += shift;
  p.support_ = {support_.lo + shift, support_.hi + shift};
  if (table_) {
    auto x = table_->knots();
    for (auto& v : x) v += shift;
    p.table_ = std::make_shared<const HermiteSpline>(std::move(x), table_->values(), table_->slopes());
  }
  return p;
}

SmearingProfile SmearingProfile::scaled(double factor) const {
  require_parameter(factor != 0.0 && std::isfinite(factor), "profile scale factor must be nonzero");
  SmearingProfile p = *this;
  p.amplitude_ *= factor;
  if (table_) {
    auto y = table_->values();
    auto m = table_->slopes();
    for (auto& v : y) v *= factor;
    for (auto& v : m) v *= factor;
    p.table_ = std::make_shared<const HermiteSpline>(table_->knots(), std::move(y), std::move(m));
  }
  return p;
}

SmearingProfile SmearingProfile::mirrored() const {
  if (!table_) return *this;
  SmearingProfile p = *this;
  const auto& x = table_->knots();
  const auto& y = table_->values();
  const auto& m = table_->slopes();
  const std::size_t n = x.size();
  std::vector<double> rx(n), ry(n), rm(n);
  const double pivot = support_.lo + support_.hi;
  for (std::size_t i = 0; i < n; ++i) {
    rx[i] = pivot - x[n - 1 - i];
    ry[i] = y[n - 1 - i];
    rm[i] = -m[n - 1 - i];
  }
  p.center_ = pivot - center_;
  p.table_ = std::make_shared<const HermiteSpline>(std::move(rx), std::move(ry), std::move(rm));
  return p;
}

std::vector<std::pair<double, double>> SmearingProfile::sample(int points) const {
  require_parameter(points >= 4, "sampling needs at least 4 points");
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double x = support_.lo + support_.width() * i / (points - 1);
    out.emplace_back(x, (*this)(x));
  }
  return out;
}

void ProtocolGeometry::validate() const {
  auto fail = [&](const std::string& what) { throw Error(ErrorCode::GeometryViolation, what); };
  for (double v : {x1A, x2A, x1B, x2B, T}) {
    if (!std::isfinite(v)) fail("geometry coordinates must be finite");
  }
  if (!(x1A < x2A)) fail("require x1A < x2A");
  if (!(x2A < x1B)) fail("require x2A < x1B (L > 0)");
  if (!(x1B < x2B)) fail("require x1B < x2B");
  if (!(T >= 0.0)) fail("require T >= 0");
}

ProtocolGeometry ProtocolGeometry::translated(double shift) const {
  return {x1A + shift, x2A + shift, x1B + shift, x2B + shift, T};
}

namespace {

// Supports built as center +- k sigma can overhang a region edge by an ulp or
// two; that is not a violation.
bool holds(const Interval& region, const Interval& support) {
  const double slack = 8 * std::numeric_limits<double>::epsilon() *
                       std::max({1.0, std::abs(region.lo), std::abs(region.hi)});
  return support.lo >= region.lo - slack && support.hi <= region.hi + slack;
}

}  // namespace

CheckedConfiguration validate_assignment(const SmearingProfile& gA, const SmearingProfile& gB,
                                         const ProtocolGeometry& geo) {
  geo.validate();
  if (!holds(geo.alice(), gA.support())) {
    throw Error(ErrorCode::SupportViolation, "gA support " + interval_text(gA.support()) +
                                                 " is not inside Alice's region " +
                                                 interval_text(geo.alice()));
  }
  if (!holds(geo.bob(), gB.support())) {
    throw Error(ErrorCode::SupportViolation, "gB support " + interval_text(gB.support()) +
                                                 " is not inside Bob's region " +
                                                 interval_text(geo.bob()));
  }
  const double shift = geo.centering_shift();
  CheckedConfiguration out{gA.translated(shift), gB.translated(shift), geo.translated(shift),
                           shift, gA.is_signed(), gB.is_signed()};
  // Pin the centering exactly; translation by a float shift can leave ulps.
  const double d = geo.d();
  out.geometry.x2A = -d;
  out.geometry.x1B = d - geo.T;
  return out;
}

QuadratureResult integrate_on_support(const SmearingProfile& g, const Integrand& f,
                                      const QuadratureConfig& cfg) {
  const Interval s = g.support();
  if (g.family() == ProfileFamily::tabulated) return integrate_1d(f, g.knots(), cfg);
  return integrate_1d(f, s.lo, s.hi, cfg);
}

double fourier_power(const SmearingProfile& g, double omega, const QuadratureConfig& cfg) {
  if (omega < 0.0) omega = -omega;
  if (g.family() == ProfileFamily::gaussian) {
    const double s = g.width();
    const double a = g.amplitude();
    return 2.0 * std::numbers::pi * a * a * s * s * std::exp(-s * s * omega * omega);
  }
  // |g~|^2 is translation invariant; integrate about the center to keep
  // the phases small.
  const double c = g.center();
  const double re =
      integrate_on_support(g, [&](double x) { return g(x) * std::cos(omega * (x - c)); }, cfg).value;
  const double im =
      integrate_on_support(g, [&](double x) { return g(x) * std::sin(omega * (x - c)); }, cfg).value;
  return re * re + im * im;
}

double frequency_cutoff(const SmearingProfile& g, int power, const QuadratureConfig& cfg) {
  const double scale = 1.0 / g.width();
  auto integrand = [&](double w) { return fourier_power(g, w, cfg) * std::pow(w, power); };
  if (g.family() == ProfileFamily::gaussian) {
    // Monotone past its single maximum; walk out until below abs_tol.
    double omega = scale;
    while (omega < cfg.freq_cutoff && integrand(omega) >= cfg.abs_tol) omega *= 1.1;
    return std::min(omega, cfg.freq_cutoff);
  }
  // Transforms of compact or tabulated profiles decay only algebraically, so
  // an absolute floor alone would push the cutoff to the cap. Past a level of
  // rel_tol/100 of the peak the tail no longer moves the result.
  double peak = 0.0;
  for (int i = 1; i <= 64; ++i) peak = std::max(peak, std::abs(integrand(4.0 * scale * i / 64)));
  QuadratureConfig local = cfg;
  local.abs_tol = std::max(cfg.abs_tol, 1e-2 * cfg.rel_tol * peak);
  return truncation_point(integrand, scale, local);
}

double gradient_norm_GB(const SmearingProfile& g, const QuadratureConfig& cfg) {
  double value = 0.0;
  if (g.family() == ProfileFamily::gaussian) {
    const double a = g.amplitude();
    value = a * a * std::sqrt(std::numbers::pi) / (2.0 * g.width());
  } else {
    value = integrate_on_support(
                g, [&](double x) { const double d = g.derivative(x); return d * d; }, cfg)
                .value;
  }
  if (!(value > 0.0)) {
    throw Error(ErrorCode::DegenerateProfile, "gradient norm G_B vanishes (constant profile)");
  }
  return value;
}

double profile_area(const SmearingProfile& g, const QuadratureConfig& cfg) {
  switch (g.family()) {
    case ProfileFamily::gaussian:
      return g.amplitude() * std::sqrt(2.0 * std::numbers::pi) * g.width();
    case ProfileFamily::compact_bump:
      return g.amplitude() * g.width() * 32.0 / 35.0;
    case ProfileFamily::tabulated:
      return integrate_on_support(g, [&](double x) { return g(x); }, cfg).value;
  }
  return 0.0;
}

}  // namespace qet
