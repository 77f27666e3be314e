#pragma once

#include <cstddef>
#include <vector>

namespace qet {

/// Piecewise cubic Hermite interpolant on sorted knots. Within each segment
/// the cubic is determined by end values and end slopes, so the interpolant
/// is C1 whenever each interior knot carries a single slope.
class HermiteSpline {
 public:
  HermiteSpline() = default;
  HermiteSpline(std::vector<double> knots, std::vector<double> values,
                std::vector<double> slopes);

  /// Fritsch-Carlson monotone slopes (PCHIP). End slopes use the one-sided
  /// three-point formula unless overridden.
  static std::vector<double> monotone_slopes(const std::vector<double>& knots,
                                             const std::vector<double>& values);

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  double third_derivative(double x) const;

  /// One-sided second derivative at knot i (`from_right` selects the segment
  /// starting at the knot).
  double second_derivative_at_knot(std::size_t i, bool from_right) const;

  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& slopes() const noexcept { return slopes_; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }
  bool empty() const noexcept { return knots_.empty(); }

  struct Jet {
    double value, d1, d2, d3;
  };
  /// Value and derivatives of the cubic on segment `seg` (0-based), evaluated
  /// at x even when x is outside that segment's interval.
  Jet jet_on_segment(std::size_t seg, double x) const;
  /// Segment containing x; knots belong to the segment they start.
  std::size_t segment(double x) const;

  /// Minimum of the first derivative over all segments (exact: each segment's
  /// derivative is a quadratic).
  double min_derivative() const;

 private:
  struct Local {
    double h, t, y0, y1, m0, m1;
  };
  Local local(double x) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

}  // namespace qet
