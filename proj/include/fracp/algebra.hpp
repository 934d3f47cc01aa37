#pragma once

namespace fracp {

// g(t) = |t|^{p-2} t, the odd power driving the nonlinearity.
double odd_power(double t, double p);

// Sharp constants for the two-sided bounds on the weighted power integral
//   integral_0^1 |a + b t|^{p-2} dt  vs  (|a| + |b|)^{p-2}.
// upper: 1 for p >= 2, else 4^{2-p}/(p-1).  lower: 1 for p < 2, else the same
// expression.  Both collapse to 1 at p = 2.
struct BoundConstants {
  double upper = 1.0;
  double lower = 1.0;
};
BoundConstants bound_constants(double p);

// Closed form of integral_0^1 |a + b t|^{p-2} dt.  The degenerate point
// a = b = 0 yields +infinity for p < 2, one for p = 2 and zero for p > 2.
double weighted_power_integral(double a, double b, double p);

struct TwoSidedReport {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool ok = false;
};
TwoSidedReport check_two_sided_bounds(double a, double b, double p);

// |g(a) - g(b)| <= c (|b| + |a-b|)^{p-2} |a-b| with c = upper * (p-1).
struct DifferenceBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  bool ok = false;
};
DifferenceBoundReport power_difference_bound(double a, double b, double p);

// integral over S^{n-1} of (|e.w| + a)^{p-2} dsigma(w); rotation invariant in e.
// Exact in 1D; graded high-order quadrature in 2D (integrable singularity at
// the equator when a = 0 and p < 2).
double spherical_integral(int dim, double a, double p);

// Calibrated constant c(n, p) with sup_a spherical_integral / (1+a)^{p-2}
// maximised over a log grid of offsets and doubled as safety margin.
double spherical_bound_constant(int dim, double p);

struct SphericalReport {
  double integral = 0.0;
  double bound = 0.0;
  double constant = 0.0;
  bool ok = false;
};
SphericalReport spherical_average_bound(int dim, double a, double p);

}  // namespace fracp
