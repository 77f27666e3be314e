#include "qet/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qet/errors.hpp"

namespace qet {

HermiteSpline::HermiteSpline(std::vector<double> knots, std::vector<double> values,
                             std::vector<double> slopes)
    : knots_(std::move(knots)), values_(std::move(values)), slopes_(std::move(slopes)) {
  if (knots_.size() < 2 || values_.size() != knots_.size() || slopes_.size() != knots_.size()) {
    throw Error(ErrorCode::ParameterViolation,
                "Hermite spline needs >= 2 knots with matching values and slopes");
  }
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    if (!(knots_[i + 1] > knots_[i])) {
      throw Error(ErrorCode::ParameterViolation, "Hermite spline knots must be strictly increasing");
    }
  }
}

std::vector<double> HermiteSpline::monotone_slopes(const std::vector<double>& x,
                                                   const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      // Weighted harmonic mean (Fritsch-Butland), always within the
      // Fritsch-Carlson monotonicity region.
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) {
      s = 0.0;
    } else if (d0 * d1 <= 0.0 && std::abs(s) > 3.0 * std::abs(d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

std::size_t HermiteSpline::segment(double x) const {
  if (x <= knots_.front()) return 0;
  if (x >= knots_.back()) return knots_.size() - 2;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

HermiteSpline::Local HermiteSpline::local(double x) const {
  const std::size_t i = segment(x);
  const double h = knots_[i + 1] - knots_[i];
  return {h, (x - knots_[i]) / h, values_[i], values_[i + 1], slopes_[i], slopes_[i + 1]};
}

double HermiteSpline::value(double x) const {
  const Local s = local(x);
  const double t = s.t;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * s.y0 + h10 * s.h * s.m0 + h01 * s.y1 + h11 * s.h * s.m1;
}

double HermiteSpline::derivative(double x) const {
  const Local s = local(x);
  const double t = s.t;
  const double t2 = t * t;
  const double d00 = 6 * t2 - 6 * t;
  const double d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t;
  const double d11 = 3 * t2 - 2 * t;
  return (d00 * s.y0 + d01 * s.y1) / s.h + d10 * s.m0 + d11 * s.m1;
}

double HermiteSpline::second_derivative(double x) const {
  const Local s = local(x);
  const double t = s.t;
  const double e00 = 12 * t - 6;
  const double e10 = 6 * t - 4;
  const double e01 = -12 * t + 6;
  const double e11 = 6 * t - 2;
  return (e00 * s.y0 + e01 * s.y1) / (s.h * s.h) + (e10 * s.m0 + e11 * s.m1) / s.h;
}

double HermiteSpline::third_derivative(double x) const {
  const Local s = local(x);
  return (12 * s.y0 - 12 * s.y1) / (s.h * s.h * s.h) + (6 * s.m0 + 6 * s.m1) / (s.h * s.h);
}

double HermiteSpline::second_derivative_at_knot(std::size_t i, bool from_right) const {
  const std::size_t n = knots_.size();
  if (from_right && i + 1 < n) {
    const double h = knots_[i + 1] - knots_[i];
    return (-6 * values_[i] + 6 * values_[i + 1]) / (h * h) + (-4 * slopes_[i] - 2 * slopes_[i + 1]) / h;
  }
  if (!from_right && i > 0) {
    const double h = knots_[i] - knots_[i - 1];
    return (6 * values_[i - 1] - 6 * values_[i]) / (h * h) + (2 * slopes_[i - 1] + 4 * slopes_[i]) / h;
  }
  return 0.0;
}

HermiteSpline::Jet HermiteSpline::jet_on_segment(std::size_t i, double x) const {
  const double h = knots_[i + 1] - knots_[i];
  const double t = (x - knots_[i]) / h;
  const double y0 = values_[i], y1 = values_[i + 1];
  const double m0 = slopes_[i] * h, m1 = slopes_[i + 1] * h;
  // Power-basis coefficients of the cubic in t.
  const double c0 = y0;
  const double c1 = m0;
  const double c2 = 3 * (y1 - y0) - 2 * m0 - m1;
  const double c3 = 2 * (y0 - y1) + m0 + m1;
  return {c0 + t * (c1 + t * (c2 + t * c3)), (c1 + t * (2 * c2 + 3 * t * c3)) / h,
          (2 * c2 + 6 * t * c3) / (h * h), 6 * c3 / (h * h * h)};
}

double HermiteSpline::min_derivative() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double h = knots_[i + 1] - knots_[i];
    // derivative on the segment as a quadratic a t^2 + b t + c in t
    const double dy = (values_[i + 1] - values_[i]) / h;
    const double m0 = slopes_[i], m1 = slopes_[i + 1];
    const double a = 3 * (m0 + m1) - 6 * dy;
    const double b = 6 * dy - 4 * m0 - 2 * m1;
    const double c = m0;
    best = std::min({best, m0, m1});
    if (a != 0.0) {
      const double t = -b / (2 * a);
      if (t > 0.0 && t < 1.0) best = std::min(best, a * t * t + b * t + c);
    }
  }
  return best;
}

}  // namespace qet
