#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qet/errors.hpp"
#include "qet/quadrature.hpp"
#include "support/corpus.hpp"

using namespace qet;
using std::numbers::pi;

TEST_SUITE("quadrature") {
  TEST_CASE("polynomial is integrated exactly") {
    const auto r = integrate_1d([](double x) { return x * x; }, 0.0, 1.0, {});
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.error <= 1e-12);
  }

  TEST_CASE("gaussian second moment through a truncation point") {
    QuadratureConfig cfg;
    auto f = [](double w) { return std::exp(-w * w) * w * w; };
    const double cut = truncation_point(f, 1.0, cfg);
    CHECK(cut <= 10.0);
    const auto r = integrate_1d(f, 0.0, std::max(cut, 10.0), cfg);
    CHECK(r.value == doctest::Approx(std::sqrt(pi) / 4.0).epsilon(1e-10));
  }

  TEST_CASE("declared endpoint singularities") {
    const auto r = integrate_1d([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {},
                                EndpointSingularity::left);
    CHECK(std::abs(r.value - 2.0) < 1e-9);
    const auto lg = integrate_1d([](double x) { return std::log(1.0 - x); }, 0.0, 1.0, {},
                                 EndpointSingularity::right);
    CHECK(std::abs(lg.value + 1.0) < 1e-9);
  }

  TEST_CASE("breaks partition a piecewise integrand") {
    const std::vector<double> breaks{-1.0, 0.0, 1.0};
    const auto r = integrate_1d([](double x) { return std::abs(x); }, breaks, {});
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("exhausted subdivisions raise NonConvergence") {
    QuadratureConfig cfg;
    cfg.max_subdivisions = 2;
    cfg.rel_tol = 1e-14;
    cfg.abs_tol = 1e-300;
    auto wild = [](double x) { return std::sin(1.0 / (x + 1e-3)); };
    try {
      (void)integrate_1d(wild, 0.0, 1.0, cfg);
      FAIL("expected NonConvergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonConvergence);
    }
  }

  TEST_CASE("config invariants") {
    QuadratureConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.grid_points = 8;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.epsilon_regulator = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }

  TEST_CASE("2D: unit square and closed-form kernel") {
    Kernel2D one{[](double, double) { return 1.0; }, {}};
    CHECK(integrate_2d(one, {0, 1}, {0, 1}, {}).value == doctest::Approx(1.0).epsilon(1e-14));

    Kernel2D k{[](double x, double y) { return 1.0 / std::pow(x + y + 1.0, 3); },
               [](const Interval& a, const Interval& b) { return a.lo + b.lo + 1.0; }};
    // int_0^1 int_0^1 (x+y+1)^-3 = 1/2 (1 - 2/2 ... ) evaluated by antiderivative:
    // inner: [-(x+y+1)^-2 / 2]_0^1 = (1/(x+1)^2 - 1/(x+2)^2)/2,
    // outer: (1/2)[(1 - 1/2) - (1/2 - 1/3)] = 1/6.
    CHECK(integrate_2d(k, {0, 1}, {0, 1}, {}).value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }

  TEST_CASE("2D: far-separated gaussians approach area product over s^3") {
    const double s = 50.0;
    auto g = [](double x) { return std::exp(-0.5 * x * x); };
    Kernel2D k{[&](double xa, double xb) { return g(xa) * g(xb - s) / std::pow(xb - xa, 3); },
               [&](const Interval& a, const Interval& b) { return b.lo - a.hi; }};
    const double v = integrate_2d(k, {-8, 8}, {s - 8, s + 8}, {}).value;
    CHECK(testing::rel_diff(v, 2.0 * pi / (s * s * s)) < 0.01);
  }

  TEST_CASE("2D: vanishing denominator is SingularKernel") {
    Kernel2D k{[](double xa, double xb) { return 1.0 / std::pow(xb - xa, 3); },
               [](const Interval& a, const Interval& b) { return b.lo - a.hi; }};
    try {
      (void)integrate_2d(k, {0, 2}, {1, 3}, {});
      FAIL("expected SingularKernel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularKernel);
    }
  }

  TEST_CASE("2D matches nested 1D on smooth kernels") {
    auto f = [](double x, double y) { return std::cos(x * y) * std::exp(-x - 0.5 * y); };
    Kernel2D k{f, {}};
    const double two = integrate_2d(k, {0, 2}, {-1, 1}, {}).value;
    const double nested =
        integrate_1d([&](double x) { return integrate_1d([&](double y) { return f(x, y); }, -1, 1, {}).value; },
                     0, 2, {})
            .value;
    CHECK(testing::rel_diff(two, nested) < 1e-10);
  }

  TEST_CASE("linearity on random smooth integrands") {
    testing::Draw draw(7);
    for (int trial = 0; trial < 20; ++trial) {
      const double a = draw.uniform(-3, 3), b = draw.uniform(-3, 3);
      const double p = draw.uniform(0.5, 4), q = draw.uniform(0.5, 4);
      auto f = [&](double x) { return std::sin(p * x) + x * x; };
      auto g = [&](double x) { return std::exp(-q * x * x); };
      QuadratureConfig cfg;
      const double lhs = integrate_1d([&](double x) { return a * f(x) + b * g(x); }, -1, 2, cfg).value;
      const double rhs = a * integrate_1d(f, -1, 2, cfg).value + b * integrate_1d(g, -1, 2, cfg).value;
      CHECK(std::abs(lhs - rhs) <= 10.0 * cfg.rel_tol * std::max(1.0, std::abs(lhs)));
    }
  }

  TEST_CASE("tightening rel_tol does not increase the error estimate") {
    auto f = [](double x) { return 1.0 / (1.0 + 25.0 * x * x); };
    QuadratureConfig loose, tight;
    loose.rel_tol = 1e-6;
    tight.rel_tol = 0.5e-6;
    CHECK(integrate_1d(f, -1, 1, tight).error <= integrate_1d(f, -1, 1, loose).error);
  }
}
