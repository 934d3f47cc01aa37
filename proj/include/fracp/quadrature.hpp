#pragma once

#include <cmath>
#include <cstddef>

namespace fracp {

// 16-point Gauss-Legendre rule on [-1, 1], symmetric halves.
inline constexpr int kGaussN = 8;
inline constexpr double kGaussX[kGaussN] = {
    0.0950125098376374402, 0.2816035507792589132, 0.4580167776572273863,
    0.6178762444026437484, 0.7554044083550030339, 0.8656312023878317439,
    0.9445750230732325761, 0.9894009349916499326};
inline constexpr double kGaussW[kGaussN] = {
    0.1894506104550684963, 0.1826034150449235889, 0.1691565193950025382,
    0.1495959888165767320, 0.1246289712555338720, 0.0951585116824927848,
    0.0622535239386478929, 0.0271524594117540949};

template <class F>
double gauss16(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < kGaussN; ++i) {
    const double d = half * kGaussX[i];
    sum += kGaussW[i] * (f(mid - d) + f(mid + d));
  }
  return half * sum;
}

template <class F>
double composite_gauss16(F&& f, double a, double b, int panels) {
  double sum = 0.0;
  const double w = (b - a) / panels;
  for (int k = 0; k < panels; ++k) sum += gauss16(f, a + k * w, a + (k + 1) * w);
  return sum;
}

// Integrates f over (a, b] when f has an integrable power singularity at a:
// dyadic panels shrink geometrically toward a, each resolved by Gauss-Legendre.
// `levels` panels leave an untouched stub of relative width 2^-levels at a;
// with f ~ C|t-a|^{q-1} near a the dropped mass is O((b-a)^q 2^{-levels q}).
template <class F>
double graded_gauss16(F&& f, double a, double b, int levels) {
  double sum = 0.0;
  double right = b - a;
  for (int k = 0; k < levels; ++k) {
    const double left = right * 0.5;
    sum += gauss16([&](double t) { return f(a + t); }, left, right);
    right = left;
  }
  return sum;
}

// Panel count so the dropped stub of graded_gauss16 is below `rel_tol`
// relative to the total, when the integrand behaves like |t-a|^{q-1}.
inline int graded_levels(double q, double rel_tol) {
  const double lv = -std::log2(rel_tol) / q;
  const int n = static_cast<int>(lv) + 2;
  return n < 8 ? 8 : (n > 600 ? 600 : n);
}

}  // namespace fracp
