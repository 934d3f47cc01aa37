#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "fracp/kernels.hpp"
#include "fracp/rng.hpp"
#include "oracles.hpp"

using namespace fracp;

TEST_CASE("constructor rejects out-of-range parameters") {
  CHECK_THROWS_AS(make_kernel(3, 0.5, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_kernel(1, 0.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_kernel(1, 1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_kernel(1, 0.5, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_kernel(1, 0.5, 2.0, 0.5), std::invalid_argument);
  // power profile carries no series
  CHECK_THROWS_AS(make_kernel(2, 0.5, 2.0, 2.0, Profile::Power, {0.0, 0.1}),
                  std::invalid_argument);
  // first harmonic is odd under z -> -z
  CHECK_THROWS_AS(make_kernel(2, 0.5, 2.0, 2.0, Profile::Perturbed, {0.1}),
                  std::invalid_argument);
  CHECK_NOTHROW(make_kernel(2, 0.5, 2.0, 2.0, Profile::Perturbed, {0.0, 0.3}));
}

TEST_CASE("power kernel values and homogeneity") {
  const KernelSpec k1 = make_kernel(1, 0.5, 2.0, 1.0);
  // |z|^{-(1 + 0.5*2)} = |z|^{-2}
  CHECK(eval_kernel(k1, {2.0, 0.0}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(eval_kernel(k1, {-2.0, 0.0}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(eval_kernel(k1, {0.0, 0.0}), std::domain_error);

  const KernelSpec k2 = make_kernel(2, 0.7, 3.0, 1.0);
  auto rng = seeded_stream(11, 1);
  std::uniform_real_distribution<double> U(-2.0, 2.0), T(0.25, 4.0);
  for (int i = 0; i < 500; ++i) {
    Point z{U(rng), U(rng)};
    if (norm(z, 2) < 1e-6) continue;
    const double t = T(rng);
    const double lhs = eval_kernel(k2, t * z);
    const double rhs = std::pow(t, -k2.singular_order()) * eval_kernel(k2, z);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("critical exponent and regime flag") {
  const KernelSpec lo = make_kernel(1, 0.5, 1.3, 1.0);
  const KernelSpec hi = make_kernel(1, 0.5, 1.4, 1.0);
  CHECK(lo.critical_p() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(lo.singular_regime());
  CHECK(!hi.singular_regime());
}

TEST_CASE("angular mass equals the sphere measure") {
  const KernelSpec flat = make_kernel(2, 0.5, 2.0, 1.0);
  CHECK(kernel_angular_mass(flat) == doctest::Approx(2.0 * kPi).epsilon(1e-15));

  // harmonics average out over the circle; confirm against plain quadrature
  const KernelSpec wavy =
      make_kernel(2, 0.5, 2.0, 2.0, Profile::Perturbed, {0.0, 0.3, 0.0, -0.2});
  const double quad = orc::integrate(
      [&](double th) { return angular_factor(wavy, th); }, 0.0, 2.0 * kPi);
  CHECK(kernel_angular_mass(wavy) == doctest::Approx(quad).epsilon(1e-12));

  // 1D mass is the sum over the two directions
  const KernelSpec line =
      make_kernel(1, 0.5, 2.0, 2.0, Profile::Perturbed, {0.0, 0.3});
  CHECK(kernel_angular_mass(line) == doctest::Approx(2.6).epsilon(1e-14));
}

TEST_CASE("admissibility holds for even perturbations within the envelope") {
  const AdmissibilityReport flat = check_admissibility(make_kernel(2, 0.6, 2.5, 1.0));
  CHECK(flat.pass);
  for (const auto& ax : flat.axioms) CHECK(ax.pass);

  // a(theta) = 1 + 0.3 cos(2 theta) stays inside [0.7, 1.3] c [1/1.5, 1.5]
  const AdmissibilityReport wavy = check_admissibility(
      make_kernel(2, 0.6, 2.5, 1.5, Profile::Perturbed, {0.0, 0.3}));
  CHECK(wavy.pass);
}

TEST_CASE("admissibility detects an envelope violation") {
  // same perturbation but lambda too tight: 1.3 > 1.01
  const AdmissibilityReport rep = check_admissibility(
      make_kernel(2, 0.6, 2.5, 1.01, Profile::Perturbed, {0.0, 0.3}));
  CHECK(!rep.pass);
  CHECK(!rep.axioms[2].pass);
  CHECK(rep.axioms[2].worst > 1.0);
}

TEST_CASE("admissibility detects broken evenness") {
  // bypass the constructor: an odd harmonic flips sign under z -> -z
  KernelSpec bad = make_kernel(2, 0.5, 2.0, 2.0, Profile::Perturbed, {0.0, 0.2});
  bad.angular_coeffs[0] = 0.4;
  const AdmissibilityReport rep = check_admissibility(bad);
  CHECK(!rep.pass);
  CHECK(!rep.axioms[0].pass);
  CHECK(rep.axioms[0].worst > 0.1);
}
