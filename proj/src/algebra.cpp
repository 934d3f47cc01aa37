#include "fracp/algebra.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracp/geometry.hpp"
#include "fracp/quadrature.hpp"

namespace fracp {

namespace {

void require_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
}

// (|m|+1)^{p-1} - |m|^{p-1} without cancellation for large |m|.
double shifted_power_gap(double m, double q) {
  m = std::abs(m);
  if (m < 8.0) return std::pow(m + 1.0, q) - std::pow(m, q);
  return std::pow(m, q) * std::expm1(q * std::log1p(1.0 / m));
}

// |m|^{p-1} - (|m|-1)^{p-1}, for |m| >= 1.
double shifted_power_gap_down(double m, double q) {
  m = std::abs(m);
  if (m < 8.0) return std::pow(m, q) - std::pow(m - 1.0, q);
  return -std::pow(m, q) * std::expm1(q * std::log1p(-1.0 / m));
}

}  // namespace

double odd_power(double t, double p) {
  if (t == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

BoundConstants bound_constants(double p) {
  require_p(p);
  BoundConstants c;
  const double hump = std::pow(4.0, 2.0 - p) / (p - 1.0);
  if (p >= 2.0) {
    c.upper = 1.0;
    c.lower = hump;
  } else {
    c.upper = hump;
    c.lower = 1.0;
  }
  return c;
}

double weighted_power_integral(double a, double b, double p) {
  require_p(p);
  if (b == 0.0) {
    if (a != 0.0) return std::pow(std::abs(a), p - 2.0);
    if (p < 2.0) return std::numeric_limits<double>::infinity();
    return p == 2.0 ? 1.0 : 0.0;
  }
  const double q = p - 1.0;
  const double m = a / b;  // integrand is |b|^{p-2} |m + t|^{p-2}
  double core;
  if (m >= 0.0) {
    core = shifted_power_gap(m, q);
  } else if (m > -1.0) {
    // zero of a + bt falls inside (0,1); both lobes integrate separately
    core = std::pow(m + 1.0, q) + std::pow(-m, q);
  } else {
    core = shifted_power_gap_down(m, q);
  }
  return std::pow(std::abs(b), p - 2.0) * core / q;
}

TwoSidedReport check_two_sided_bounds(double a, double b, double p) {
  const BoundConstants c = bound_constants(p);
  TwoSidedReport rep;
  rep.value = weighted_power_integral(a, b, p);
  const double env = std::pow(std::abs(a) + std::abs(b), p - 2.0);
  rep.lower = c.lower * env;
  rep.upper = c.upper * env;
  const double slack = 1e-12 * (std::abs(rep.value) + rep.upper);
  rep.ok = rep.lower <= rep.value + slack && rep.value <= rep.upper + slack;
  if (a == 0.0 && b == 0.0) rep.ok = true;  // degenerate corner, bounds are vacuous
  return rep;
}

DifferenceBoundReport power_difference_bound(double a, double b, double p) {
  const BoundConstants c = bound_constants(p);
  DifferenceBoundReport rep;
  rep.constant = c.upper * (p - 1.0);
  rep.lhs = std::abs(odd_power(a, p) - odd_power(b, p));
  const double d = std::abs(a - b);
  if (d == 0.0) {
    rep.rhs = 0.0;
    rep.ok = true;
    return rep;
  }
  rep.rhs = rep.constant * std::pow(std::abs(b) + d, p - 2.0) * d;
  rep.ok = rep.lhs <= rep.rhs * (1.0 + 1e-12) + 1e-300;
  return rep;
}

double spherical_integral(int dim, double a, double p) {
  require_p(p);
  if (!(a >= 0.0)) throw std::invalid_argument("spherical offset must be nonnegative");
  if (dim == 1) return 2.0 * std::pow(1.0 + a, p - 2.0);
  if (dim != 2) throw std::invalid_argument("spherical integral supports dim 1 and 2");

  // Fold the circle onto [0, pi/2] by symmetry and aim the graded panels at
  // the equator, where (sin phi + a)^{p-2} loses smoothness for small a.
  const auto f = [&](double phi) { return std::pow(std::sin(phi) + a, p - 2.0); };
  if (a > 1e-2 || p >= 2.0) return 4.0 * composite_gauss16(f, 0.0, 0.5 * kPi, 32);
  const int levels = graded_levels(p - 1.0, 1e-13);
  double val = graded_gauss16(f, 0.0, 0.5 * kPi, levels);
  // stub below the smallest panel: integrand ~ (phi + a)^{p-2}
  const double stub = 0.5 * kPi * std::pow(0.5, levels);
  val += (std::pow(stub + a, p - 1.0) - std::pow(a, p - 1.0)) / (p - 1.0);
  return 4.0 * val;
}

double spherical_bound_constant(int dim, double p) {
  require_p(p);
  double worst = 0.0;
  // log grid of offsets plus the endpoint a = 0
  for (int k = -1; k <= 60; ++k) {
    const double a = k < 0 ? 0.0 : std::pow(10.0, -3.0 + 6.0 * k / 60.0);
    const double ratio = spherical_integral(dim, a, p) / std::pow(1.0 + a, p - 2.0);
    if (ratio > worst) worst = ratio;
  }
  return 2.0 * worst;
}

SphericalReport spherical_average_bound(int dim, double a, double p) {
  SphericalReport rep;
  rep.integral = spherical_integral(dim, a, p);
  rep.constant = spherical_bound_constant(dim, p);
  rep.bound = rep.constant * std::pow(1.0 + a, p - 2.0);
  rep.ok = rep.integral <= rep.bound * (1.0 + 1e-12);
  return rep;
}

}  // namespace fracp
