#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fracp/algebra.hpp"
#include "fracp/rng.hpp"
#include "oracles.hpp"

using namespace fracp;

TEST_CASE("odd power is the signed power map") {
  CHECK(odd_power(1.0, 3.0) == 1.0);
  CHECK(odd_power(-2.0, 3.0) == -4.0);
  CHECK(odd_power(0.0, 1.5) == 0.0);
  CHECK(odd_power(-0.5, 2.0) == -0.5);
  // odd and monotone on a sweep
  auto rng = seeded_stream(7, 1);
  std::uniform_real_distribution<double> U(-5.0, 5.0), P(1.1, 4.0);
  for (int k = 0; k < 2000; ++k) {
    const double t = U(rng), p = P(rng);
    CHECK(odd_power(-t, p) == doctest::Approx(-odd_power(t, p)).epsilon(1e-14));
    const double t2 = U(rng);
    if (t != t2)
      CHECK((odd_power(t, p) - odd_power(t2, p)) * (t - t2) >= 0.0);
  }
}

TEST_CASE("weighted power integral: closed form at hand-checked points") {
  // integral_0^1 t dt
  CHECK(weighted_power_integral(0.0, 1.0, 3.0) == doctest::Approx(0.5).epsilon(1e-14));
  // p = 2 integrand is identically one
  CHECK(weighted_power_integral(7.0, -3.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  // crossing at t = 1/2, two symmetric triangles
  CHECK(weighted_power_integral(1.0, -2.0, 3.0) == doctest::Approx(0.5).epsilon(1e-14));
  // degenerate segment
  CHECK(std::isinf(weighted_power_integral(0.0, 0.0, 1.5)));
  CHECK(weighted_power_integral(0.0, 0.0, 2.0) == 1.0);
  CHECK(weighted_power_integral(0.0, 0.0, 3.0) == 0.0);
}

TEST_CASE("weighted power integral agrees with adaptive quadrature") {
  auto rng = seeded_stream(7, 2);
  std::uniform_real_distribution<double> A(-3.0, 3.0), P(1.1, 4.0);
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double a = A(rng), b = A(rng), p = P(rng);
    if (std::abs(b) < 1e-8 && std::abs(a) < 1e-8) continue;
    const double lib = weighted_power_integral(a, b, p);
    const double ref = orc::weighted_power_reference(a, b, p);
    const double rel = std::abs(lib - ref) / std::max(1.0, std::abs(ref));
    worst = std::max(worst, rel);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("two-sided bounds trap the integral on random segments") {
  // frozen fixture: a = 0, b = 0.1, p = 1.5 has value 2/sqrt(0.1)
  const TwoSidedReport r = check_two_sided_bounds(0.0, 0.1, 1.5);
  CHECK(r.value == doctest::Approx(6.3245553203).epsilon(1e-9));
  CHECK(r.lower == doctest::Approx(3.1622776601).epsilon(1e-9));
  CHECK(r.upper == doctest::Approx(12.6491106407).epsilon(1e-9));
  CHECK(r.ok);

  auto rng = seeded_stream(7, 3);
  std::uniform_real_distribution<double> A(-4.0, 4.0), P(1.05, 4.5);
  int checked = 0;
  for (int k = 0; k < 20000; ++k) {
    const double a = A(rng), b = A(rng), p = P(rng);
    if (std::abs(a) + std::abs(b) < 1e-10) continue;
    const TwoSidedReport rep = check_two_sided_bounds(a, b, p);
    CHECK(rep.ok);
    ++checked;
  }
  CHECK(checked > 19000);
}

TEST_CASE("difference of signed powers obeys the calibrated bound") {
  const DifferenceBoundReport r1 = power_difference_bound(1.0, 0.0, 3.0);
  CHECK(r1.lhs == doctest::Approx(1.0));
  CHECK(r1.rhs == doctest::Approx(2.0));
  CHECK(r1.ok);
  const DifferenceBoundReport r2 = power_difference_bound(-1.0, 1.0, 1.5);
  CHECK(r2.lhs == doctest::Approx(2.0));
  CHECK(r2.ok);

  auto rng = seeded_stream(7, 4);
  std::uniform_real_distribution<double> A(-4.0, 4.0), P(1.05, 4.5);
  for (int k = 0; k < 20000; ++k) {
    const DifferenceBoundReport rep = power_difference_bound(A(rng), A(rng), P(rng));
    CHECK(rep.ok);
  }
}

TEST_CASE("spherical integral: exact values and quadrature agreement") {
  // p = 2 collapses to the sphere measure in any dimension
  CHECK(spherical_integral(1, 0.7, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(spherical_integral(2, 0.0, 2.0) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  // equatorial degeneracy, frozen against the Gamma-function closed form
  CHECK(spherical_integral(2, 0.0, 1.5) == doctest::Approx(10.4882302172).epsilon(5e-9));

  auto rng = seeded_stream(7, 5);
  std::uniform_real_distribution<double> A(0.0, 5.0), P(1.1, 4.0);
  double worst = 0.0;
  for (int k = 0; k < 300; ++k) {
    const double a = A(rng), p = P(rng);
    for (int dim : {1, 2}) {
      const double lib = spherical_integral(dim, a, p);
      const double ref = orc::spherical_reference(dim, a, p);
      worst = std::max(worst, std::abs(lib - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("spherical average bound holds with the calibrated constant") {
  // the calibrated constant is recomputed per (dim, p), which dominates the
  // cost; the acceptance sweep covers the high-volume version
  auto rng = seeded_stream(7, 6);
  std::uniform_real_distribution<double> A(0.0, 8.0), P(1.1, 4.0);
  for (int k = 0; k < 400; ++k) {
    const double a = A(rng), p = P(rng);
    for (int dim : {1, 2}) {
      const SphericalReport rep = spherical_average_bound(dim, a, p);
      CHECK(rep.ok);
      CHECK(rep.integral <= rep.bound);
    }
  }
}

TEST_CASE("bound constants collapse to one at p = 2") {
  const BoundConstants c = bound_constants(2.0);
  CHECK(c.upper == 1.0);
  CHECK(c.lower == 1.0);
  CHECK(bound_constants(3.0).upper == 1.0);
  CHECK(bound_constants(1.5).lower == 1.0);
  CHECK_THROWS_AS(bound_constants(1.0), std::invalid_argument);
}
