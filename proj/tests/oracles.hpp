#pragma once

// Slow independent references for the unit suites.  Nothing here shares code
// with the library: integration is adaptive Simpson instead of fixed-order
// Gauss, sums are written as plain double loops over all pairs.

#include <cmath>
#include <functional>
#include <vector>

#include "fracp/function_space.hpp"
#include "fracp/kernels.hpp"

namespace orc {

using Fn = std::function<double(double)>;

inline double simpson_rec(const Fn& f, double a, double b, double fa, double fm,
                          double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const Fn& f, double a, double b, double tol = 1e-13,
                        int depth = 48) {
  if (a == b) return 0.0;
  const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Integrand given the distances to the two interval ends; the rule computes
// those distances without cancellation, so endpoint singularities stay
// resolved past the point where the raw coordinate rounds onto the endpoint.
using EndFn = std::function<double(double d_lo, double d_hi)>;

// Double-exponential (tanh-sinh) rule on (a, b).  Node clustering toward the
// endpoints makes integrable endpoint singularities converge spectrally.
// Trapezoid steps halve until the estimate settles.
inline double tanh_sinh(const EndFn& f, double a, double b) {
  const double half_pi = 2.0 * std::atan(1.0);
  const double len = b - a;
  auto node_sum = [&](double h, bool odd_only) {
    double s = 0.0;
    // wide window: integrands ~ dist^{q-1} with q near 0 decay slowly in t
    const int kmax = static_cast<int>(6.0 / h);
    for (int k = odd_only ? 1 : 0; k <= kmax; k += odd_only ? 2 : 1) {
      const double t = k * h;
      const double sh = half_pi * std::sinh(t);
      const double ch = std::cosh(sh);
      const double w = half_pi * std::cosh(t) / (ch * ch);
      // 1 -+ tanh(sh) without cancellation
      const double e = std::exp(-2.0 * sh);
      const double near_d = len * e / (1.0 + e);
      const double far_d = len / (1.0 + e);
      double term = w * f(far_d, near_d);
      if (k > 0) term += w * f(near_d, far_d);
      if (std::isfinite(term)) s += term;
      if (k > 4 && std::abs(term) < 1e-300) break;
    }
    return s;
  };
  double h = 0.5;
  double sum = node_sum(h, false);
  double prev = 0.5 * len * h * sum;
  for (int level = 0; level < 9; ++level) {
    h *= 0.5;
    sum += node_sum(h, true);
    const double cur = 0.5 * len * h * sum;
    if (level > 1 && std::abs(cur - prev) <= 5e-14 * (std::abs(cur) + 1e-300))
      return cur;
    prev = cur;
  }
  return prev;
}

// integral_0^1 |a + b t|^{p-2} dt, split at the interior zero when the line
// a + b t crosses it.  |a + b t| is rewritten as |b| * (distance to the
// zero), which the split makes available as a stable endpoint distance.
inline double weighted_power_reference(double a, double b, double p) {
  const double q = p - 2.0;
  if (b == 0.0) return std::pow(std::abs(a), q);
  const double bq = std::pow(std::abs(b), q);
  const double t0 = -a / b;
  if (t0 > 0.0 && t0 < 1.0) {
    const EndFn from_hi = [&](double, double d) { return bq * std::pow(d, q); };
    const EndFn from_lo = [&](double d, double) { return bq * std::pow(d, q); };
    return tanh_sinh(from_hi, 0.0, t0) + tanh_sinh(from_lo, t0, 1.0);
  }
  // zero off the segment: distance = gap to the nearer end plus the distance
  // into the segment, a sum of nonnegative parts
  if (t0 <= 0.0) {
    const double gap = -t0;
    const EndFn f = [&](double d, double) { return bq * std::pow(gap + d, q); };
    return tanh_sinh(f, 0.0, 1.0);
  }
  const double gap = t0 - 1.0;
  const EndFn f = [&](double, double d) { return bq * std::pow(gap + d, q); };
  return tanh_sinh(f, 0.0, 1.0);
}

// integral over S^{n-1} of (|e.w| + a)^{p-2}; the 2D integrand degenerates at
// the equator when a = 0 and p < 2, which sits at an endpoint after folding.
// cos(theta) near pi/2 is evaluated as sin(distance to pi/2).
inline double spherical_reference(int dim, double a, double p) {
  if (dim == 1) return 2.0 * std::pow(1.0 + a, p - 2.0);
  const EndFn f = [&](double, double d) {
    return std::pow(std::sin(d) + a, p - 2.0);
  };
  const double half_pi = 2.0 * std::atan(1.0);
  return 4.0 * tanh_sinh(f, 0.0, half_pi);
}

// Direct pair loop for the Gagliardo double sum; mirrors the definition, not
// the library's offset-table traversal.
inline double gagliardo_reference(const fracp::GridFunction& f,
                                  const fracp::DomainSpec& region, double s,
                                  double p) {
  using fracp::Point;
  const int dim = f.dim();
  const double h = f.h();
  const double h2n = std::pow(h, 2 * dim);
  std::vector<std::size_t> in_region;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (region.contains(f.node(i))) in_region.push_back(i);
  double total = 0.0;
  for (std::size_t a = 0; a < in_region.size(); ++a)
    for (std::size_t b = 0; b < in_region.size(); ++b) {
      if (a == b) continue;
      const Point xa = f.node(in_region[a]), xb = f.node(in_region[b]);
      const double dx = xa[0] - xb[0];
      const double dy = dim == 2 ? xa[1] - xb[1] : 0.0;
      const double r = std::sqrt(dx * dx + dy * dy);
      if (r < h) continue;
      const double d = f.value(in_region[a]) - f.value(in_region[b]);
      total += std::pow(std::abs(d), p) * std::pow(r, -dim - s * p) * h2n;
    }
  return std::pow(total, 1.0 / p);
}

// Tail integrand summed cell by cell in 1D with a constant exterior model:
//   r^{sp} * ( sum_{|y-z| >= r} |f|^{p-1} |y-z|^{-1-sp} h  +  remainder ).
inline double tail_reference_1d(const fracp::GridFunction& f, fracp::Point z,
                                double r, double s, double p) {
  const double h = f.h();
  const double sp = s * p;
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = std::abs(f.node(i)[0] - z[0]);
    if (d < r) continue;
    total += std::pow(std::abs(f.value(i)), p - 1.0) * std::pow(d, -1.0 - sp) * h;
  }
  const double c = f.far_field().kind == fracp::FarField::Kind::Constant
                       ? f.far_field().value
                       : 0.0;
  const fracp::Box box = f.lattice_box();
  const double dl = z[0] - box.lo[0], dr = box.hi[0] - z[0];
  total += std::pow(std::abs(c), p - 1.0) *
           (std::pow(dl, -sp) + std::pow(dr, -sp)) / sp;
  return std::pow(std::pow(r, sp) * total, 1.0 / (p - 1.0));
}

}  // namespace orc
