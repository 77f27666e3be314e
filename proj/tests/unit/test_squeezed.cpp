#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qet/errors.hpp"
#include "qet/squeezed_qet.hpp"
#include "support/corpus.hpp"

using namespace qet;

namespace {

// Centered-frame profile of shift l spanning [-d, d], d = (L + T) / 2.
SqueezeProfile for_setup(const ProtocolSetup& s, double l) {
  return SqueezeProfile::piecewise_quadratic_for_shift(l, s.geometry.d());
}

}  // namespace

TEST_SUITE("squeezed") {
  TEST_CASE("identity profile reproduces the vacuum report") {
    const auto s = testing::gaussian_setup(1, 1.5, 30, 2);
    const auto v = teleported_energy(s.gA, s.gB, s.geometry, {});
    const auto q = teleported_energy_squeezed(s.gA, s.gB, s.geometry, SqueezeProfile::identity(), {});
    CHECK(q.squeezed);
    CHECK(testing::rel_diff(q.E_B, v.E_B) < 1e-12);
    CHECK(q.E_C == 0.0);
    CHECK(q.E_B_vacuum == v.E_B);
  }

  TEST_CASE("report carries l, E_C and the companion vacuum value") {
    const auto s = testing::gaussian_setup(1, 1, 40, 0);
    const auto f = for_setup(s, 3.0);
    const auto r = teleported_energy_squeezed(s.gA, s.gB, s.geometry, f, {});
    CHECK(r.shift_l == doctest::Approx(3.0));
    CHECK(r.E_C > 0.0);
    CHECK(r.E_B > r.E_B_vacuum);
    CHECK(r.route_rel_diff < 1e-8);
    CHECK(r.p[0] == 0.5);
    CHECK(r.C[0] + r.C[1] == 0.0);
  }

  TEST_CASE("E_Bf depends on f only through l") {
    const auto s = testing::gaussian_setup(1, 1, 40, 0);
    const double l = 6.0;
    // Same shift from a smooth scale factor confined well inside [-d, d].
    auto a = [&](double x) { return 1.0 + 0.5 * std::pow(std::cos(x * std::numbers::pi / 16), 2); };
    auto raw = SqueezeProfile::from_scale_factor(
        [&](double x) { return std::abs(x) < 8 ? a(x) : 1.0; }, {-8, 8}, 2049);
    const double excess = raw.shift();
    auto scaled = SqueezeProfile::from_scale_factor(
        [&](double x) { return std::abs(x) < 8 ? 1.0 + (a(x) - 1.0) * l / excess : 1.0; }, {-8, 8}, 2049);
    REQUIRE(scaled.shift() == doctest::Approx(l).epsilon(1e-6));
    // Compare at the scale-factor profile's own l.
    const auto quad = for_setup(s, scaled.shift());
    const double e1 = teleported_energy_squeezed(s.gA, s.gB, s.geometry, quad, {}).E_B;
    const double e2 = teleported_energy_squeezed(s.gA, s.gB, s.geometry, scaled, {}).E_B;
    CHECK(testing::rel_diff(e1, e2) < 1e-12);
  }

  TEST_CASE("E_Bf is non-decreasing in l") {
    const auto s = testing::gaussian_setup(1, 1, 100, 3);
    double prev = 0.0;
    const double lmax = s.geometry.L() + s.geometry.T - 20.0;
    for (int i = 0; i <= 12; ++i) {
      const double l = lmax * i / 12.0;
      const double e = teleported_energy_squeezed(s.gA, s.gB, s.geometry, for_setup(s, l), {}).E_B;
      CHECK(e >= prev);
      prev = e;
    }
  }

  TEST_CASE("holding L + T - l fixed keeps E_Bf fixed") {
    const double c0 = 20.0;
    double ref = 0.0;
    for (double L : {100.0, 1000.0, 10000.0}) {
      const auto s = testing::gaussian_setup(1, 1, L, 0);
      const double e = teleported_energy_squeezed(s.gA, s.gB, s.geometry, for_setup(s, L - c0), {}).E_B;
      if (ref == 0.0) ref = e;
      CHECK(testing::rel_diff(e, ref) < 1e-9);
    }
  }

  TEST_CASE("change of variables: tracking equals vacuum at the effective distance") {
    const double c0 = 25.0, T = 4.0, L = 800.0;
    const auto s = testing::gaussian_setup(1, 2, L, T);
    const double e = teleported_energy_squeezed(s.gA, s.gB, s.geometry, for_setup(s, L + T - c0), {}).E_B;
    const auto eff = testing::gaussian_setup(1, 2, c0 - T, T);
    CHECK(testing::rel_diff(e, teleported_energy(eff.gA, eff.gB, eff.geometry, {}).E_B) < 1e-10);
  }

  TEST_CASE("fixed l at large L: only the centre separation changes") {
    // Centres sit L + 16 apart; the shift brings them to L + 6.
    const auto s = testing::gaussian_setup(1, 1, 5000, 0);
    const auto r = teleported_energy_squeezed(s.gA, s.gB, s.geometry, for_setup(s, 10.0), {});
    CHECK(std::abs(r.E_B / r.E_B_vacuum / std::pow(5016.0 / 5006.0, 6) - 1.0) < 1e-4);
  }

  TEST_CASE("precondition failures") {
    const auto s = testing::gaussian_setup(1, 1, 40, 0);
    // Squeezed region reaching into Alice's smearing.
    const auto wide = SqueezeProfile::piecewise_quadratic(0.001, 5, 25);
    try {
      (void)teleported_energy_squeezed(s.gA, s.gB, s.geometry, wide, {});
      FAIL("expected SupportViolation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SupportViolation);
    }
    // A shift beyond L + T is rejected before any integration.
    try {
      (void)teleported_energy_squeezed(s.gA, s.gB, s.geometry, SqueezeProfile::piecewise_quadratic_for_shift(45, 25),
                                       {});
      FAIL("expected ParameterViolation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParameterViolation);
    }
    // l = L + T closes the kernel denominator at the support edges.
    try {
      (void)ab_moment(s.gA, s.gB, s.geometry, 40.0);
      FAIL("expected SingularKernel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularKernel);
    }
  }
}
