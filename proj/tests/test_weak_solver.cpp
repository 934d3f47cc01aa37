#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fracp/rng.hpp"
#include "fracp/weak_solver.hpp"
#include "lu_oracle.hpp"
#include "oracles.hpp"

using namespace fracp;

namespace {

GridFunction collar_problem(double h, double c, double ampl) {
  const DomainSpec dom = DomainSpec::interval(-1.0, 1.0);
  return GridFunction::build(dom, h, 2.0, FarField::constant(c), [=](Point x) {
    return ampl * std::cos(2.0 * x[0]) + 0.2 * x[0];
  });
}

}  // namespace

TEST_CASE("constants are solutions") {
  const DomainSpec dom = DomainSpec::interval(-1.0, 1.0);
  GridFunction u = GridFunction::build(dom, 0.125, 2.0, FarField::constant(3.0),
                                       [](Point) { return 3.0; });
  const KernelSpec spec = make_kernel(1, 0.5, 2.6, 1.0);
  CHECK(discrete_energy(u, spec) == 0.0);
  for (double r : weak_residual(u, spec)) CHECK(r == 0.0);
  const WeakClassification cls = classify_weak(u, spec);
  CHECK(cls.solution);
  CHECK(cls.supersolution);
  CHECK(cls.subsolution);
}

TEST_CASE("pairing is the directional derivative of the energy") {
  GridFunction u = collar_problem(0.125, 0.4, 1.0);
  const KernelSpec spec = make_kernel(1, 0.45, 2.7, 1.0);
  auto rng = seeded_stream(17, 1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);

  GridFunction phi = u;
  phi.far_field() = FarField::zero();
  for (auto& v : phi.values()) v = 0.0;
  for (std::size_t i : phi.interior_indices()) phi.value(i) = U(rng);

  const double pairing = weak_pairing(u, phi, spec);
  const double t = 1e-6;
  GridFunction up = u, um = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    up.value(i) += t * phi.value(i);
    um.value(i) -= t * phi.value(i);
  }
  const double fd =
      (discrete_energy(up, spec) - discrete_energy(um, spec)) / (2.0 * t);
  CHECK(pairing == doctest::Approx(fd).epsilon(1e-5));

  // residual vector represents the same derivative, cell volume scaled
  const std::vector<double> res = weak_residual(u, spec);
  double from_residual = 0.0;
  const double hn = u.h();
  for (std::size_t i = 0; i < u.size(); ++i)
    from_residual += res[i] * phi.value(i) * hn;
  CHECK(pairing == doctest::Approx(from_residual).epsilon(1e-10));
}

TEST_CASE("exterior weights match closed forms") {
  const GridFunction u = collar_problem(0.25, 0.0, 1.0);
  const KernelSpec spec = make_kernel(1, 0.55, 2.0, 1.0);
  const std::vector<double> kap = exterior_kernel_weights(u, spec);
  const Box box = u.lattice_box();
  const double sp = 1.1;
  for (std::size_t i = 0; i < u.size(); i += 5) {
    const double x = u.node(i)[0];
    const double exact =
        (std::pow(x - box.lo[0], -sp) + std::pow(box.hi[0] - x, -sp)) / sp;
    CHECK(kap[i] == doctest::Approx(exact).epsilon(1e-10));
  }

  // 2D: angular form kappa = (1/sp) integral rho(theta)^{-sp} dtheta
  const DomainSpec dom2 = DomainSpec::rect({-0.5, -0.5}, {0.5, 0.5});
  const GridFunction v = GridFunction::build(dom2, 0.25, 1.5, FarField::zero(),
                                             [](Point) { return 0.0; });
  const KernelSpec spec2 = make_kernel(2, 0.5, 2.0, 1.0);
  const std::vector<double> kap2 = exterior_kernel_weights(v, spec2);
  const Box b2 = v.lattice_box();
  for (std::size_t i : {v.index(3, 4), v.index(7, 7), v.index(12, 5)}) {
    const Point x = v.node(i);
    const auto ray = [&](double th) {
      const double cx = std::cos(th), sy = std::sin(th);
      double rho = std::numeric_limits<double>::infinity();
      if (cx > 0.0) rho = std::min(rho, (b2.hi[0] - x[0]) / cx);
      if (cx < 0.0) rho = std::min(rho, (b2.lo[0] - x[0]) / cx);
      if (sy > 0.0) rho = std::min(rho, (b2.hi[1] - x[1]) / sy);
      if (sy < 0.0) rho = std::min(rho, (b2.lo[1] - x[1]) / sy);
      return std::pow(rho, -1.0);  // sp = 1
    };
    const double exact = orc::integrate(ray, 0.0, 2.0 * kPi, 1e-9);
    CHECK(kap2[i] == doctest::Approx(exact).epsilon(1e-7));
  }
}

TEST_CASE("quadratic solve matches the dense direct oracle") {
  GridFunction u = collar_problem(1.0 / 256.0, 0.3, 1.0);
  const KernelSpec spec = make_kernel(1, 0.45, 2.0, 1.0);
  const SolveReport rep = solve_dirichlet(u, spec);
  CHECK(rep.converged);
  CHECK(rep.residual_max <= rep.threshold);

  GridFunction fresh = collar_problem(1.0 / 256.0, 0.3, 1.0);
  const std::vector<double> lu = orc::dirichlet_lu_1d(fresh, 0.45);
  const std::vector<std::size_t>& interior = u.interior_indices();
  double worst = 0.0;
  for (std::size_t k = 0; k < interior.size(); ++k)
    worst = std::max(worst, std::abs(u.value(interior[k]) - lu[k]));
  CHECK(worst <= 1e-8);

  // solving cannot raise the energy above the initial configuration
  CHECK(rep.energy <= discrete_energy(fresh, spec) + 1e-12);
  const WeakClassification cls = classify_weak(u, spec);
  CHECK(cls.solution);
}

TEST_CASE("general-exponent solve: stationarity and local minimality") {
  GridFunction u = collar_problem(1.0 / 32.0, 0.2, 0.8);
  const KernelSpec spec = make_kernel(1, 0.5, 2.6, 1.0);
  const SolveReport rep = solve_dirichlet(u, spec);
  CHECK(rep.converged);
  CHECK(rep.residual_max <= rep.threshold);
  CHECK(classify_weak(u, spec).solution);

  // random interior perturbations cannot lower the energy
  auto rng = seeded_stream(17, 2);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double e0 = discrete_energy(u, spec);
  for (int trial = 0; trial < 5; ++trial) {
    GridFunction w = u;
    for (std::size_t i : w.interior_indices()) w.value(i) += 1e-3 * U(rng);
    CHECK(discrete_energy(w, spec) >= e0 - 1e-12);
  }
}

TEST_CASE("solve commutes with constant shifts and sign flips") {
  const KernelSpec spec = make_kernel(1, 0.5, 2.6, 1.0);
  GridFunction a = collar_problem(1.0 / 32.0, 0.2, 0.8);
  solve_dirichlet(a, spec);

  GridFunction b = collar_problem(1.0 / 32.0, 0.2, 0.8);
  for (auto& v : b.values()) v += 5.0;
  b.far_field().value += 5.0;
  solve_dirichlet(b, spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(b.value(i) - a.value(i) - 5.0));
  CHECK(worst <= 1e-6);

  GridFunction neg = collar_problem(1.0 / 32.0, 0.2, 0.8);
  for (auto& v : neg.values()) v = -v;
  neg.far_field().value = -0.2;
  solve_dirichlet(neg, spec);
  worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(neg.value(i) + a.value(i)));
  CHECK(worst <= 1e-6);
}

TEST_CASE("larger boundary data produces a larger solution") {
  const KernelSpec spec = make_kernel(1, 0.5, 2.0, 1.0);
  GridFunction lo = collar_problem(1.0 / 64.0, 0.1, 0.8);
  GridFunction hi = collar_problem(1.0 / 64.0, 0.5, 0.8);
  for (auto& v : hi.values()) v += 0.4;
  solve_dirichlet(lo, spec);
  solve_dirichlet(hi, spec);
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lo.size(); ++i)
    min_gap = std::min(min_gap, hi.value(i) - lo.value(i));
  CHECK(min_gap >= -1e-8);
}

TEST_CASE("unbounded exterior models are rejected") {
  const DomainSpec dom = DomainSpec::interval(-1.0, 1.0);
  GridFunction u = GridFunction::build(dom, 0.25, 2.0, FarField::power(1.0, 0.5),
                                       [](Point) { return 0.0; });
  CHECK_THROWS_AS(solve_dirichlet(u, make_kernel(1, 0.5, 2.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("pointwise operator sign propagates to the weak flag") {
  // |x|^{1.2} away from the vertex, p = 3: samples converge and the signs of
  // the two routes stay consistent
  const AnalyticFunction cone = analytic_power_cone(1, 1.2, 1.0, 2.0);
  const DomainSpec region = DomainSpec::interval(0.2, 0.8);
  const KernelSpec spec = make_kernel(1, 0.5, 3.0, 1.0);
  const PointwiseWeakReport rep =
      pointwise_to_weak_check(cone, region, spec, 1.0 / 64.0);
  CHECK(rep.all_converged);
  CHECK(rep.consistent);
  CHECK(!rep.note.empty());
}
