#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace fracp {

inline constexpr double kPi = 3.14159265358979323846;

// A point of R^n for n <= 2. The second coordinate is zero and ignored in 1D.
using Point = std::array<double, 2>;

inline Point operator+(Point a, Point b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(Point a, Point b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double c, Point a) { return {c * a[0], c * a[1]}; }

inline double dot(Point a, Point b, int dim) {
  double s = a[0] * b[0];
  if (dim == 2) s += a[1] * b[1];
  return s;
}

inline double norm(Point a, int dim) { return std::sqrt(dot(a, a, dim)); }

// Unit vector at angle theta; in 1D theta = 0 and pi pick the two directions.
inline Point direction(double theta, int dim) {
  if (dim == 1) return {std::cos(theta) >= 0.0 ? 1.0 : -1.0, 0.0};
  return {std::cos(theta), std::sin(theta)};
}

// Surface measure of the unit sphere S^{n-1}: two points in 1D, 2*pi in 2D.
inline double sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * kPi; }

// Symmetric n x n matrix, n <= 2; only the upper triangle is stored.
struct SymMat {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  // Largest absolute eigenvalue (spectral norm).
  double spectral_norm(int dim) const {
    if (dim == 1) return std::abs(xx);
    const double tr = 0.5 * (xx + yy);
    const double det = xx * yy - xy * xy;
    const double disc = std::sqrt(std::max(0.0, tr * tr - det));
    return std::max(std::abs(tr + disc), std::abs(tr - disc));
  }

  Point apply(Point v) const { return {xx * v[0] + xy * v[1], xy * v[0] + yy * v[1]}; }
};

inline SymMat operator+(SymMat a, SymMat b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
inline SymMat operator*(double c, SymMat a) { return {c * a.xx, c * a.xy, c * a.yy}; }

// Axis-aligned box; in 1D only the first coordinates are meaningful.
struct Box {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};

  bool contains(Point x, int dim) const {
    if (x[0] < lo[0] || x[0] > hi[0]) return false;
    if (dim == 2 && (x[1] < lo[1] || x[1] > hi[1])) return false;
    return true;
  }

  // Distance from an interior point to the nearest face; negative outside.
  double face_distance(Point x, int dim) const {
    double d = std::min(x[0] - lo[0], hi[0] - x[0]);
    if (dim == 2) d = std::min(d, std::min(x[1] - lo[1], hi[1] - x[1]));
    return d;
  }

  // Largest distance from x to a corner of the box.
  double corner_distance(Point x, int dim) const {
    const double dx = std::max(std::abs(x[0] - lo[0]), std::abs(x[0] - hi[0]));
    if (dim == 1) return dx;
    const double dy = std::max(std::abs(x[1] - lo[1]), std::abs(x[1] - hi[1]));
    return std::hypot(dx, dy);
  }
};

}  // namespace fracp
