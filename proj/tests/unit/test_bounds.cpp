#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qet/bounds.hpp"
#include "qet/errors.hpp"
#include "support/corpus.hpp"

using namespace qet;
using std::numbers::pi;

namespace {

ProtocolGeometry unit_regions(double L) { return {-1, 0, L, L + 1, 0}; }

// sqrt(xi) = t^power rising across the gap, one on Bob's region, then falling
// back to zero over `tail`.
SamplingFunction ramp(const ProtocolGeometry& g, double tail, int n, double power = 1.0) {
  SamplingFunction xi;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    xi.grid.push_back(g.x2A + t * g.L());
    xi.values.push_back(std::pow(t, 2 * power));
  }
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    xi.grid.push_back(g.x2B + t * tail);
    xi.values.push_back(std::pow(1 - t, 2 * power));
  }
  return xi;
}

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("linear ramp of sqrt(xi) gives 1/(12 pi w) per ramp") {
    const auto g = unit_regions(3.0);
    const auto xi = ramp(g, 5.0, 100);
    CHECK(xi.satisfies_boundary(g));
    CHECK(flanagan_functional(xi) == doctest::Approx((1 / 3.0 + 1 / 5.0) / (12 * pi)).epsilon(1e-13));
  }

  TEST_CASE("jumps in sqrt(xi) are NonFiniteFunctional") {
    SamplingFunction box{{0, 1, 1, 2, 2, 3}, {0, 0, 1, 1, 0, 0}};
    try {
      (void)flanagan_functional(box);
      FAIL("expected NonFiniteFunctional");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFiniteFunctional);
    }
    SamplingFunction open_end{{0, 1, 2}, {0, 1, 1}};
    CHECK_THROWS_AS((void)flanagan_functional(open_end), Error);
  }

  TEST_CASE("minimizer: L = 1 and L = 2") {
    const auto m1 = minimize_flanagan(unit_regions(1), 1000, 10000);
    CHECK(std::abs(m1.value - 1 / (12 * pi)) / (1 / (12 * pi)) < 0.005);
    CHECK(m1.value == doctest::Approx(flanagan_minimum_exact(1, 1000)).epsilon(1e-10));
    const auto m2 = minimize_flanagan(unit_regions(2), 2000, 10000);
    CHECK(m2.value == doctest::Approx(m1.value / 2).epsilon(1e-10));
    CHECK(m1.tail_part == doctest::Approx(1 / (12 * pi * 1000)).epsilon(1e-10));
  }

  TEST_CASE("minimizer profile is ((x - x2A)/L)^2 on the gap") {
    const auto g = unit_regions(2.5);
    const auto m = minimize_flanagan(g, 100, 2000);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.xi.grid.size(); ++i) {
      const double x = m.xi.grid[i];
      if (x > g.x1B) break;
      worst = std::max(worst, std::abs(m.xi.values[i] - std::pow((x - g.x2A) / g.L(), 2)));
    }
    // Exact up to rounding accumulated through the tridiagonal sweep.
    CHECK(worst < 1e-10);
    CHECK(m.xi.satisfies_boundary(g));
    CHECK(std::abs(flanagan_functional(m.xi) - m.value) < 1e-10 * m.value);
  }

  TEST_CASE("grid rejection and CG cross-check") {
    CHECK_THROWS_AS((void)minimize_flanagan(unit_regions(1), 10, 63), Error);
    CHECK_THROWS_AS((void)minimize_flanagan(unit_regions(1), 0, 100), Error);
    const auto a = minimize_flanagan(unit_regions(1.5), 40, 400);
    const auto b = minimize_flanagan_iterative(unit_regions(1.5), 40, 400);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10));
  }

  TEST_CASE("monotone in tail length and grid; dilation covariance") {
    const auto g = unit_regions(1);
    double prev = 1e300;
    for (double tail : {1.0, 10.0, 100.0, 1000.0}) {
      const double v = minimize_flanagan(g, tail, 2000).value;
      CHECK(v <= prev);
      prev = v;
    }
    CHECK(minimize_flanagan(g, 50, 4000).value <= minimize_flanagan(g, 50, 64).value * (1 + 1e-12));
    const ProtocolGeometry big{-3, 0, 3, 6, 0};
    CHECK(minimize_flanagan(big, 150, 1000).value ==
          doctest::Approx(minimize_flanagan(g, 50, 1000).value / 3).epsilon(1e-10));
  }

  TEST_CASE("certification") {
    TeleportReport r;
    r.E_B = 0.0;
    const auto g = unit_regions(5);
    auto c = certify_bound(r, g);
    CHECK(c.bound_ratio == 0.0);
    CHECK(c.pass == true);
    r.E_B = 2.0 / (12 * pi * 5);
    c = certify_bound(r, g);
    CHECK(c.pass == false);
    r.squeezed = true;
    c = certify_bound(r, g);
    CHECK_FALSE(c.applicable);
    CHECK_FALSE(c.pass.has_value());
  }

  TEST_CASE("E_B stays below the functional of arbitrary admissible xi") {
    for (const auto& p : testing::corpus(6, 99)) {
      const auto s = testing::gaussian_setup(p);
      const double eb = teleported_energy(s.gA, s.gB, s.geometry, {}).E_B;
      for (double power : {1.0, 1.5, 3.0}) {
        for (double tail : {1.0, 100.0}) {
          CHECK(eb <= flanagan_functional(ramp(s.geometry, tail, 200, power)));
        }
      }
    }
  }
}
