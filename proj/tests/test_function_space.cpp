#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "fracp/function_space.hpp"
#include "fracp/rng.hpp"
#include "oracles.hpp"

using namespace fracp;

TEST_CASE("domain factories measure and contain") {
  const DomainSpec iv = DomainSpec::interval(-1.0, 3.0);
  CHECK(iv.diameter() == doctest::Approx(4.0));
  CHECK(iv.contains({0.0, 0.0}));
  CHECK(!iv.contains({3.5, 0.0}));

  const DomainSpec rc = DomainSpec::rect({0.0, 0.0}, {2.0, 1.0});
  CHECK(rc.diameter() == doctest::Approx(std::sqrt(5.0)));
  CHECK(rc.contains({1.0, 0.5}));
  CHECK(!rc.contains({1.0, 1.5}));

  const DomainSpec bl = DomainSpec::ball({1.0, 0.0}, 0.5);
  CHECK(bl.diameter() == doctest::Approx(1.0));
  CHECK(bl.contains({1.3, 0.0}));
  CHECK(!bl.contains({1.3, 0.45}));
}

TEST_CASE("far-field models evaluate radially") {
  CHECK(FarField::zero().eval({5.0, 0.0}, 1) == 0.0);
  CHECK(FarField::constant(3.5).eval({-7.0, 0.0}, 1) == 3.5);
  const FarField pw = FarField::power(2.0, 0.5);
  CHECK(pw.eval({4.0, 0.0}, 1) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(pw.eval({3.0, 4.0}, 2) == doctest::Approx(2.0 * std::sqrt(5.0)).epsilon(1e-14));
  CHECK(pw.growth() == 0.5);
  CHECK(FarField::constant(3.5).growth() == 0.0);
}

TEST_CASE("lattice covers the domain plus a collar") {
  const DomainSpec dom = DomainSpec::interval(-1.0, 1.0);
  const GridFunction f = GridFunction::build(dom, 0.125, 2.0, FarField::zero(),
                                             [](Point) { return 0.0; });
  const Box box = f.lattice_box();
  CHECK(box.lo[0] <= -3.0 + 1e-12);
  CHECK(box.hi[0] >= 3.0 - 1e-12);
  // cell-centered nodes: first center half a cell in from the box edge
  CHECK(f.node(0)[0] == doctest::Approx(box.lo[0] + 0.0625).epsilon(1e-12));

  int interior = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.is_interior(i) == dom.contains(f.node(i)));
    interior += f.is_interior(i) ? 1 : 0;
  }
  CHECK(interior == int(f.interior_indices().size()));
  CHECK(interior > 0);

  const GridFunction g = GridFunction::build(dom, 0.125, 2.0, FarField::constant(1.0),
                                             [](Point x) { return x[0]; });
  CHECK(f.same_lattice(g));
  const GridFunction h2 = GridFunction::build(dom, 0.25, 2.0, FarField::zero(),
                                              [](Point) { return 0.0; });
  CHECK(!f.same_lattice(h2));
}

TEST_CASE("interpolation reproduces affine data and defers to the far model") {
  const DomainSpec dom = DomainSpec::rect({-1.0, -1.0}, {1.0, 1.0});
  const GridFunction f =
      GridFunction::build(dom, 0.1, 3.0, FarField::constant(9.0),
                          [](Point x) { return 2.0 + 3.0 * x[0] - x[1]; });
  auto rng = seeded_stream(13, 1);
  const Box box = f.lattice_box();
  std::uniform_real_distribution<double> U(box.lo[0] + 0.1, box.hi[0] - 0.1);
  for (int k = 0; k < 200; ++k) {
    const Point x{U(rng), U(rng)};
    CHECK(f.interpolate(x) ==
          doctest::Approx(2.0 + 3.0 * x[0] - x[1]).epsilon(1e-12));
  }
  // node values round-trip
  CHECK(f.interpolate(f.node(f.index(3, 4))) ==
        doctest::Approx(f.value(f.index(3, 4))).epsilon(1e-13));
  // beyond the box the analytic model takes over
  const Point far{box.hi[0] + 5.0, 0.0};
  CHECK(f.eval_extended(far) == 9.0);
}

TEST_CASE("analytic families expose exact derivatives") {
  const AnalyticFunction par = analytic_parabola_cap(1);
  CHECK(par.value({0.5, 0.0}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(par.value({2.0, 0.0}) == 1.0);
  CHECK(par.gradient({0.3, 0.0})[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(par.hessian({0.3, 0.0}).xx == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(par.critical_set_known);

  // cone derivatives against central differences
  const AnalyticFunction cone = analytic_power_cone(1, 2.7, 0.8, 2.0);
  const double x = 0.4, d1 = 1e-6, d2 = 1e-4;
  const double fd_g =
      (cone.value({x + d1, 0.0}) - cone.value({x - d1, 0.0})) / (2.0 * d1);
  CHECK(cone.gradient({x, 0.0})[0] == doctest::Approx(fd_g).epsilon(1e-8));
  const double fd_h = (cone.value({x + d2, 0.0}) - 2.0 * cone.value({x, 0.0}) +
                       cone.value({x - d2, 0.0})) /
                      (d2 * d2);
  CHECK(cone.hessian({x, 0.0}).xx == doctest::Approx(fd_h).epsilon(1e-5));

  const AnalyticFunction cone2 = analytic_power_cone(2, 3.2, 1.3, 2.0);
  const Point y{0.3, -0.2};
  for (int axis = 0; axis < 2; ++axis) {
    Point ya = y, yb = y;
    ya[axis] += d1;
    yb[axis] -= d1;
    const double fd = (cone2.value(ya) - cone2.value(yb)) / (2.0 * d1);
    CHECK(cone2.gradient(y)[axis] == doctest::Approx(fd).epsilon(1e-7));
  }

  // bump support and sum structure
  const AnalyticFunction bump = analytic_bump(1, {0.5, 0.0}, 0.25, 2.0);
  CHECK(bump.value({0.5, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(bump.value({0.8, 0.0}) == 0.0);
  const AnalyticFunction aff = analytic_affine(1, 1.0, {2.0, 0.0});
  const AnalyticFunction sum = analytic_sum(aff, bump);
  CHECK(sum.value({0.5, 0.0}) ==
        doctest::Approx(aff.value({0.5, 0.0}) + 2.0).epsilon(1e-14));
  CHECK(sum.gradient({0.5, 0.0})[0] ==
        doctest::Approx(aff.gradient({0.5, 0.0})[0] + bump.gradient({0.5, 0.0})[0])
            .epsilon(1e-12));
}

TEST_CASE("sampling preserves node values and the far model") {
  const AnalyticFunction par = analytic_parabola_cap(1);
  const DomainSpec dom = DomainSpec::interval(-1.0, 1.0);
  const GridFunction g = sample_onto_grid(par, dom, 0.0625, 2.0);
  for (std::size_t i = 0; i < g.size(); i += 7)
    CHECK(g.value(i) == doctest::Approx(par.value(g.node(i))).epsilon(1e-14));
  CHECK(g.far_field().kind == FarField::Kind::Constant);
  CHECK(g.far_field().value == 1.0);
}

TEST_CASE("energy vanishes on constants and matches the pair sum") {
  const DomainSpec dom = DomainSpec::interval(-1.0, 1.0);
  const GridFunction c = GridFunction::build(dom, 0.125, 2.0, FarField::constant(4.0),
                                             [](Point) { return 4.0; });
  CHECK(gagliardo_seminorm(c, dom, 0.5, 2.0) == 0.0);

  const GridFunction f =
      GridFunction::build(dom, 0.125, 2.0, FarField::zero(), [](Point x) {
        return std::cos(2.0 * x[0]) + 0.3 * x[0];
      });
  const double lib = gagliardo_seminorm(f, dom, 0.6, 1.8);
  const double ref = orc::gagliardo_reference(f, dom, 0.6, 1.8);
  CHECK(lib == doctest::Approx(ref).epsilon(1e-10));

  const DomainSpec dom2 = DomainSpec::rect({-0.5, -0.5}, {0.5, 0.5});
  const GridFunction f2 =
      GridFunction::build(dom2, 0.125, 1.5, FarField::zero(), [](Point x) {
        return x[0] * x[0] - 0.5 * x[1];
      });
  CHECK(gagliardo_seminorm(f2, dom2, 0.4, 2.2) ==
        doctest::Approx(orc::gagliardo_reference(f2, dom2, 0.4, 2.2)).epsilon(1e-10));
}

TEST_CASE("tail of the unit function from the unit ball") {
  // r^{sp} integral_{|y|>=1} |y|^{-2} dy = 2, then the 1/(p-1) root keeps 2
  const DomainSpec dom = DomainSpec::interval(-1.0, 1.0);
  const GridFunction one = GridFunction::build(dom, 1.0 / 128.0, 2.0,
                                               FarField::constant(1.0),
                                               [](Point) { return 1.0; });
  CHECK(tail(one, {0.0, 0.0}, 1.0, 0.5, 2.0) == doctest::Approx(2.0).epsilon(5e-3));

  // asymmetric data, centered base point: cell-sum reference
  const GridFunction f = GridFunction::build(dom, 1.0 / 64.0, 2.0,
                                             FarField::constant(0.7), [](Point x) {
                                               return 1.0 / (2.0 + x[0]);
                                             });
  const double lib = tail(f, {0.0, 0.0}, 0.5, 0.45, 2.3);
  const double ref = orc::tail_reference_1d(f, {0.0, 0.0}, 0.5, 0.45, 2.3);
  CHECK(lib == doctest::Approx(ref).epsilon(1e-10));

  CHECK_THROWS_AS(tail(one, {0.0, 0.0}, -1.0, 0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(tail(one, {50.0, 0.0}, 1.0, 0.5, 2.0), std::invalid_argument);
}

TEST_CASE("exterior moment closed forms and quadrature") {
  // constant models, both dimensions
  CHECK(far_field_tail_moment(FarField::constant(2.0), {0.0, 0.0}, 0.5, 0.5, 2.0, 1) ==
        doctest::Approx(8.0).epsilon(1e-12));
  CHECK(far_field_tail_moment(FarField::constant(1.0), {0.0, 0.0}, 1.0, 0.5, 2.0, 2) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-12));

  // centered power model: 2 A^{p-1} R^{-(sp-e)} / (sp-e)
  {
    const double A = 1.5, g = 0.4, s = 0.6, p = 2.0, R = 2.0;
    const double e = g * (p - 1.0), decay = s * p - e;
    const double exact = 2.0 * std::pow(A, p - 1.0) * std::pow(R, -decay) / decay;
    CHECK(far_field_tail_moment(FarField::power(A, g), {0.0, 0.0}, R, s, p, 1) ==
          doctest::Approx(exact).epsilon(1e-9));
  }

  // off-center 1D power model against a transformed quadrature
  {
    const double A = 0.9, g = 0.3, s = 0.55, p = 2.4, R = 1.0, z = 0.3;
    const double e = g * (p - 1.0), sp = s * p;
    const orc::EndFn f = [&](double tau, double) {
      const double t = R / tau;
      return (std::pow(std::abs(z + t), e) + std::pow(std::abs(z - t), e)) *
             std::pow(R, -sp) * std::pow(tau, sp - 1.0);
    };
    const double ref = std::pow(A, p - 1.0) * orc::tanh_sinh(f, 0.0, 1.0);
    CHECK(far_field_tail_moment(FarField::power(A, g), {z, 0.0}, R, s, p, 1) ==
          doctest::Approx(ref).epsilon(1e-8));
  }

  // off-center 2D power model against an angle-by-angle quadrature
  {
    const double A = 1.2, g = 0.25, s = 0.5, p = 2.2, R = 1.0;
    const Point z{0.2, -0.1};
    const double e = g * (p - 1.0), sp = s * p;
    const auto ray = [&](double th) {
      const double cx = std::cos(th), cy = std::sin(th);
      const orc::EndFn f = [&](double tau, double) {
        const double rho = R / tau;
        const double yx = z[0] + rho * cx, yy = z[1] + rho * cy;
        return std::pow(std::hypot(yx, yy), e) * std::pow(R, -sp) *
               std::pow(tau, sp - 1.0);
      };
      return orc::tanh_sinh(f, 0.0, 1.0);
    };
    const double ref =
        std::pow(A, p - 1.0) * orc::integrate(ray, 0.0, 2.0 * kPi, 1e-11);
    CHECK(far_field_tail_moment(FarField::power(A, g), z, R, s, p, 2) ==
          doctest::Approx(ref).epsilon(1e-7));
  }

  // growth at or past the integrability edge is rejected
  CHECK_THROWS_AS(
      far_field_tail_moment(FarField::power(1.0, 1.0), {0.0, 0.0}, 1.0, 0.5, 2.0, 1),
      std::domain_error);
}

TEST_CASE("tail-class membership hinges on the growth margin") {
  // sp = 1; growth 0.9 leaves margin 0.1, growth 1.1 leaves -0.1
  const TailspaceReport in = check_tailspace_membership(FarField::power(1.0, 0.9), 0.5, 2.0);
  CHECK(in.ok);
  CHECK(in.margin == doctest::Approx(0.1).epsilon(1e-12));
  const TailspaceReport out = check_tailspace_membership(FarField::power(1.0, 1.1), 0.5, 2.0);
  CHECK(!out.ok);
  CHECK(out.margin == doctest::Approx(-0.1).epsilon(1e-12));
  // bounded models always belong
  CHECK(check_tailspace_membership(FarField::constant(100.0), 0.1, 1.5).ok);

  const DomainSpec dom = DomainSpec::interval(-1.0, 1.0);
  const GridFunction f = GridFunction::build(dom, 0.25, 2.0, FarField::power(1.0, 0.9),
                                             [](Point) { return 0.0; });
  CHECK(check_tailspace_membership(f, 0.5, 2.0).ok);
  CHECK(!check_tailspace_membership(f, 0.4, 2.0).ok);
}

TEST_CASE("weighted second-order seminorm on model functions") {
  // affine: no critical set, constant gradient g: norm = 1/|g|
  const AnalyticFunction aff = analytic_affine(1, 0.0, {2.0, 0.0});
  CHECK(c2beta_norm(aff, DomainSpec::interval(-1.0, 1.0), 2.0) ==
        doctest::Approx(0.5).epsilon(1e-10));

  // cone |x|^beta measured at its own exponent: 1/beta + beta(beta-1)
  const double beta = 3.0;
  const AnalyticFunction cone = analytic_power_cone(1, beta, 1.0, 2.0);
  const double expect = 1.0 / beta + beta * (beta - 1.0);
  CHECK(c2beta_norm(cone, DomainSpec::interval(-0.8, 0.8), beta) ==
        doctest::Approx(expect).epsilon(1e-6));

  // measured at a smaller exponent the weight diverges at the vertex
  CHECK(std::isinf(c2beta_norm(cone, DomainSpec::interval(-0.8, 0.8), 2.5)));

  CHECK_THROWS_AS(c2beta_norm(cone, DomainSpec::interval(-0.8, 0.8), 1.0),
                  std::invalid_argument);
}
