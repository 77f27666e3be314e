#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qet/errors.hpp"
#include "qet/squeeze_profile.hpp"
#include "support/corpus.hpp"

using namespace qet;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

// Exact value of the cutoff mode sum for the regulated kernel:
// f'f'/(4 pi) Re[(1 - e^{-a W}(1 + a W)) / a^2], a = eps + i D.
double truncated_modesum(const SqueezeProfile& f, double x, double xp, double cutoff, double eps) {
  const std::complex<double> a{eps, image_difference(f, x, xp)};
  const auto v = (1.0 - std::exp(-a * cutoff) * (1.0 + a * cutoff)) / (a * a);
  return f.derivative(x) * f.derivative(xp) * v.real() / (4 * pi);
}

}  // namespace

TEST_SUITE("squeeze_profile") {
  TEST_CASE("piecewise quadratic (0.02, 5, 10)") {
    const auto f = SqueezeProfile::piecewise_quadratic(0.02, 5, 10);
    CHECK(f.shift() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(f(5.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(f.jet(5.0, Side::left).d1 == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(f.jet(5.0, Side::right).d1 == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(f.is_c1());
    for (double x : {-30.0, -10.0, -7.5, -1.0, 0.0, 2.0, 6.0, 10.0, 12.0}) {
      CHECK(f(-x) == doctest::Approx(-f(x)).epsilon(1e-15));
    }
    CHECK(f(12.0) == doctest::Approx(12.0 - 1.5));
    CHECK(f(-12.0) == doctest::Approx(-12.0 + 1.5));
  }

  TEST_CASE("parameter violations name the constraint") {
    CHECK(code_of([] { (void)SqueezeProfile::piecewise_quadratic(0.2, 5, 10); }) ==
          ErrorCode::ParameterViolation);
    CHECK(code_of([] { (void)SqueezeProfile::piecewise_quadratic(0.02, 10, 10); }) ==
          ErrorCode::ParameterViolation);
    CHECK(code_of([] { (void)SqueezeProfile::piecewise_quadratic(-0.01, 5, 10); }) ==
          ErrorCode::ParameterViolation);
    try {
      (void)SqueezeProfile::piecewise_quadratic(0.2, 5, 10);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("lambda") != std::string::npos);
    }
  }

  TEST_CASE("shift approaches 2d at the edge of the parameter range") {
    const double d = 10;
    double prev = 0;
    for (double xbar : {9.0, 9.9, 9.99, 9.999}) {
      const double lam = 0.999999 / (2 * (d - xbar));
      const double l = SqueezeProfile::piecewise_quadratic(lam, xbar, d).shift();
      CHECK(l > prev);
      prev = l;
    }
    CHECK(prev == doctest::Approx(2 * d).epsilon(1e-3));
    CHECK(piecewise_quadratic_cost(0.999999 / (2 * 0.001), 9.999, 10) > 1e2);
  }

  TEST_CASE("shift helper hits the requested l") {
    for (double l : {0.5, 3.0, 10.0, 19.9}) {
      CHECK(SqueezeProfile::piecewise_quadratic_for_shift(l, 10).shift() == doctest::Approx(l).epsilon(1e-13));
    }
    CHECK(SqueezeProfile::piecewise_quadratic_for_shift(0.0, 10).kind() == SqueezeKind::identity);
  }

  TEST_CASE("scale factor a = 2 on [-1, 1]") {
    const auto f = SqueezeProfile::from_scale_factor({{-1, 1}, {-1, 2}, {1, 2}, {1, 1}});
    CHECK(f.shift() == doctest::Approx(2.0));
    CHECK(f(1.0) == doctest::Approx(0.5));
    CHECK(f(-2.0) == doctest::Approx(-1.0));
    CHECK(f(3.0) == doctest::Approx(2.0));
    CHECK_FALSE(f.is_c1());
    CHECK(code_of([&] { (void)squeeze_cost(f); }) == ErrorCode::DivergentCost);
    const auto id = SqueezeProfile::from_scale_factor([](double) { return 1.0; }, {-3, 3}, 65);
    CHECK(id.shift() == doctest::Approx(0.0).scale(1));
    CHECK(id(1.7) == doctest::Approx(1.7));
    CHECK(code_of([] { (void)SqueezeProfile::from_scale_factor({{-1, 1}, {0, -0.5}, {1, 1}}); }) ==
          ErrorCode::ParameterViolation);
  }

  TEST_CASE("scale factor round trip: d f^{-1}/dx = a") {
    auto a = [](double x) { return 1.0 + 0.8 * std::exp(-x * x) * (1 + 0.3 * x); };
    const auto f = SqueezeProfile::from_scale_factor(a, {-6, 6}, 4097);
    for (double x = -5.5; x <= 5.5; x += 0.37) {
      const double X = f.inverse(x);
      CHECK(std::abs(f(X) - x) < 1e-10);
    }
    for (const auto& [x, ax] : f.scale_table()) {
      CHECK(std::abs(1.0 / f.derivative(f.inverse(x)) - ax) < 1e-10);
    }
  }

  TEST_CASE("tabulated profiles are monotone C1 with unit end slopes") {
    std::vector<std::pair<double, double>> t;
    const auto ref = SqueezeProfile::piecewise_quadratic(0.02, 5, 10);
    for (double x = -12; x <= 12.0001; x += 0.5) t.emplace_back(x, ref(x));
    const auto f = SqueezeProfile::tabulated(t);
    CHECK(f.is_c1());
    CHECK(f.min_slope() > 0.0);
    CHECK(f.shift() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(code_of([] { (void)SqueezeProfile::tabulated({{0, 0}, {1, 2}, {2, 1}, {3, 3}}); }) ==
          ErrorCode::ParameterViolation);
  }

  TEST_CASE("mode functions") {
    const auto id = SqueezeProfile::identity();
    const auto f = SqueezeProfile::piecewise_quadratic(0.02, 5, 10);
    for (double x : {-20.0, 0.3, 7.0}) {
      CHECK(std::abs(mode_function(f, 2.5, x)) == doctest::Approx(1 / std::sqrt(4 * pi * 2.5)));
      const auto u = std::exp(std::complex<double>(0, -2.5 * x)) / std::sqrt(4 * pi * 2.5);
      CHECK(std::abs(mode_function(id, 2.5, x) - u) < 1e-15);
    }
    const auto v = mode_function(f, 1.0, 12.0);
    const auto expect = std::exp(std::complex<double>(0, -(12.0 - 1.5))) / std::sqrt(4 * pi);
    CHECK(std::abs(v - expect) < 1e-15);
    CHECK_THROWS_AS((void)mode_function(f, 0.0, 1.0), Error);
  }

  TEST_CASE("local-vacuum equality on each side, images across") {
    const auto f = SqueezeProfile::piecewise_quadratic(0.02, 5, 10);
    testing::Draw draw(11);
    for (int i = 0; i < 200; ++i) {
      const double x = draw.uniform(-1e3, -10), xp = draw.uniform(-1e3, -10);
      if (x == xp) continue;
      CHECK(squeezed_correlator(f, x, xp) == vacuum_correlator(x, xp));
      const double y = draw.uniform(10, 1e3), yp = draw.uniform(10, 1e3);
      CHECK(squeezed_correlator(f, y, yp) == vacuum_correlator(y, yp));
      const double image = (y - x) - f.shift();
      CHECK(squeezed_correlator(f, y, x) == doctest::Approx(-1.0 / (4 * pi * image * image)).epsilon(1e-15));
    }
    CHECK(code_of([&] { (void)squeezed_correlator(f, 2.0, 2.0); }) == ErrorCode::CoincidentPoints);
  }

  TEST_CASE("squeeze cost: closed form, density and invariances") {
    const auto f = SqueezeProfile::piecewise_quadratic(0.02, 5, 10);
    const double closed = 0.02 * (1 / (1 - 2 * 0.02 * 5) - 1) / (12 * pi);
    CHECK(piecewise_quadratic_cost(0.02, 5, 10) == doctest::Approx(closed).epsilon(1e-15));
    CHECK(testing::rel_diff(squeeze_cost(f).value, closed) < 1e-8);
    CHECK(testing::rel_diff(integrated_density(f, f.squeezed_region()), closed) < 1e-6);
    CHECK(squeeze_cost(SqueezeProfile::identity()).value == 0.0);
    for (double x : {-30.0, -4.0, 0.0, 2.5, 4.99, 11.0}) CHECK(energy_density(f, x) == 0.0);
    CHECK(code_of([&] { (void)energy_density(f, 5.0); }) == ErrorCode::KnotEvaluation);
    CHECK(std::isfinite(energy_density(f, 5.0, Side::right)));

    // f(x) + c and -f(-x) have the same cost: check on a non-odd tabulated profile.
    std::vector<std::pair<double, double>> t, shifted, parity;
    auto g = [](double x) { return x - 1.0 * std::tanh(x - 0.5) + 0.3 * std::tanh(2 * x); };
    for (double x = -8; x <= 8.0001; x += 0.25) t.emplace_back(x, g(x));
    for (auto [x, y] : t) shifted.emplace_back(x, y + 4.0);
    for (auto it = t.rbegin(); it != t.rend(); ++it) parity.emplace_back(-it->first, -it->second);
    const double c0 = squeeze_cost(SqueezeProfile::tabulated(t)).value;
    CHECK(testing::rel_diff(c0, squeeze_cost(SqueezeProfile::tabulated(shifted)).value) < 1e-12);
    CHECK(testing::rel_diff(c0, squeeze_cost(SqueezeProfile::tabulated(parity)).value) < 1e-10);
  }

  TEST_CASE("cost closed form across a parameter grid") {
    for (double d : {2.0, 10.0, 250.0}) {
      for (double xr : {0.1, 0.5, 0.9}) {
        for (double lr : {0.05, 0.5, 0.95}) {
          const double xbar = xr * d, lam = lr / (2 * (d - xbar));
          const auto f = SqueezeProfile::piecewise_quadratic(lam, xbar, d);
          CHECK(testing::rel_diff(squeeze_cost(f).value, piecewise_quadratic_cost(lam, xbar, d)) < 1e-8);
        }
      }
    }
  }

  TEST_CASE("mode sum reconstruction") {
    const auto id = SqueezeProfile::identity();
    // The cutoff W = 200 with eps = 0.01 leaves e^{-2} of the tail, so compare
    // with the exactly truncated sum there and with the regulated kernel at a
    // cutoff where the tail is negligible.
    const double low = modesum_correlator(id, 5, 0, 200, 0.01).value;
    CHECK(testing::rel_diff(low, truncated_modesum(id, 5, 0, 200, 0.01)) < 1e-6);
    const double high = modesum_correlator(id, 5, 0, 4000, 0.01).value;
    CHECK(testing::rel_diff(high, regularized_correlator(id, 5, 0, 0.01)) < 1e-3);

    const auto f = SqueezeProfile::piecewise_quadratic(0.02, 5, 10);
    const double cross = modesum_correlator(f, 14, -13, 4000, 0.01).value;
    CHECK(testing::rel_diff(cross, regularized_correlator(f, 14, -13, 0.01)) < 0.01);
    CHECK(testing::rel_diff(regularized_correlator(f, 14, -13, 1e-9), squeezed_correlator(f, 14, -13)) < 1e-12);

    const double w = 600, e = 0.01;
    const double d = std::abs(modesum_correlator(f, 14, -13, 2 * w, e).value -
                              modesum_correlator(f, 14, -13, w, e).value);
    CHECK(d <= modesum_tail_bound(w, e));
  }
}
