#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fracp/geometry.hpp"

namespace fracp {

enum class DomainKind { Interval, Rect, Ball };

struct DomainSpec {
  int dim = 1;
  DomainKind kind = DomainKind::Interval;
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};
  Point center{0.0, 0.0};
  double radius = 0.0;

  static DomainSpec interval(double a, double b);
  static DomainSpec rect(Point lo, Point hi);
  static DomainSpec ball(Point center, double radius);

  bool contains(Point x) const;
  double diameter() const;
  Box bounding_box() const;
};

// Exterior model used beyond the gridded collar.  Radial about the origin.
struct FarField {
  enum class Kind { Zero, Constant, Power };
  Kind kind = Kind::Zero;
  double value = 0.0;      // Constant
  double amplitude = 0.0;  // Power: amplitude * |x|^exponent
  double exponent = 0.0;

  static FarField zero() { return {}; }
  static FarField constant(double c) { return {Kind::Constant, c, 0.0, 0.0}; }
  static FarField power(double amplitude, double exponent) {
    return {Kind::Power, 0.0, amplitude, exponent};
  }

  double eval(Point x, int dim) const;
  // Growth exponent entering the tail-class inequality; zero for bounded models.
  double growth() const { return kind == Kind::Power ? exponent : 0.0; }
};

// Cell-centered lattice covering the domain plus a collar at least one
// diameter wide, with an analytic far-field model beyond the lattice box.
// Values live at cell centers; quadratures against grid data are midpoint
// sums over cells.
class GridFunction {
 public:
  static GridFunction build(const DomainSpec& dom, double h, double collar,
                            FarField far, const std::function<double(Point)>& init);

  int dim() const { return dom_.dim; }
  double h() const { return h_; }
  double collar() const { return collar_; }
  const DomainSpec& domain() const { return dom_; }
  const FarField& far_field() const { return far_; }
  FarField& far_field() { return far_; }
  Box lattice_box() const;
  int cells(int axis) const { return n_[axis]; }
  std::size_t size() const { return v_.size(); }

  std::size_t index(int ix, int iy = 0) const { return std::size_t(iy) * n_[0] + ix; }
  Point node(std::size_t i) const;
  bool is_interior(std::size_t i) const { return interior_[i] != 0; }
  const std::vector<std::size_t>& interior_indices() const { return interior_list_; }

  double value(std::size_t i) const { return v_[i]; }
  double& value(std::size_t i) { return v_[i]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  // Multilinear interpolation between cell centers, clamped at the box edge.
  double interpolate(Point x) const;
  // Interpolation inside the lattice box, far-field model outside.
  double eval_extended(Point x) const;

  bool same_lattice(const GridFunction& other) const;

 private:
  DomainSpec dom_;
  double h_ = 0.0;
  double collar_ = 0.0;
  FarField far_;
  std::array<int, 2> n_{1, 1};
  Point origin_{0.0, 0.0};  // lower corner of the lattice box
  std::vector<double> v_;
  std::vector<std::uint8_t> interior_;
  std::vector<std::size_t> interior_list_;
};

// Closed-form function with exact derivatives, an isolated-critical-point
// descriptor and a far-field model that is exact beyond far_radius.
struct AnalyticFunction {
  int dim = 1;
  std::function<double(Point)> value;
  std::function<Point(Point)> gradient;
  std::function<SymMat(Point)> hessian;
  std::vector<Point> critical_points;
  bool critical_set_known = false;
  FarField far_field;
  double far_radius = std::numeric_limits<double>::infinity();
  // Radius of a ball around x on which value/gradient/hessian formulas hold.
  std::function<double(Point)> smooth_radius;
  // Growth exponent at the critical point for cone-type functions (NaN if n/a).
  double cone_exponent = std::numeric_limits<double>::quiet_NaN();
};

AnalyticFunction analytic_constant(int dim, double c);
AnalyticFunction analytic_affine(int dim, double c, Point grad);
// Quadratic c + g.(x) + x.H x / 2 inside |x| < cap, frozen to its boundary
// mean value outside; far field is that constant.
AnalyticFunction analytic_quadratic_cap(int dim, double c, Point grad, SymMat hess, double cap);
// The model obstacle: |x|^2 inside the unit ball, 1 outside.
AnalyticFunction analytic_parabola_cap(int dim);
// amplitude * |x|^beta inside |x| < cap, frozen outside; beta > 1.
AnalyticFunction analytic_power_cone(int dim, double beta, double amplitude, double cap);
// Smooth bump of the given height supported in |x - x0| < rho.
AnalyticFunction analytic_bump(int dim, Point x0, double rho, double height);
AnalyticFunction analytic_sum(const AnalyticFunction& a, const AnalyticFunction& b);

// Samples an analytic function onto a lattice; the far model carries over.
GridFunction sample_onto_grid(const AnalyticFunction& u, const DomainSpec& dom,
                              double h, double collar);

// Discrete Gagliardo energy over a region: p-th root of the symmetric double
// sum of |f(x)-f(y)|^p |x-y|^{-n-sp} h^{2n} over lattice-cell pairs whose
// centers lie in the region, excluding pairs closer than one cell.
double gagliardo_seminorm(const GridFunction& f, const DomainSpec& region,
                          double s, double p);

// Nonlocal tail: ( r^{sp} * integral over |x-z| >= r of
// |f(x)|^{p-1} |x-z|^{-n-sp} dx )^{1/(p-1)}.  Lattice cells carry the gridded
// part out to the largest ball around z inside the box; past that the
// far-field model is integrated (closed form for bounded models, flattened
// radial quadrature for power models).
double tail(const GridFunction& f, Point z, double r, double s, double p);

struct TailspaceReport {
  bool ok = false;
  double margin = 0.0;  // sp - growth*(p-1); positive means integrable tail
  std::string note;
};
TailspaceReport check_tailspace_membership(const GridFunction& f, double s, double p);
TailspaceReport check_tailspace_membership(const FarField& far, double s, double p);

// integral over |x-z| >= R of |far(x)|^{p-1} |x-z|^{-n-sp} dx.
double far_field_tail_moment(const FarField& far, Point z, double R,
                             double s, double p, int dim);

// Weighted C^2 seminorm sup( min{d,1}^{beta-1}/|grad| + |hess| / d^{beta-2} )
// over the region, d = distance to the critical set (infinite when empty).
// Estimated on refining samples; divergence under refinement reports +inf.
double c2beta_norm(const AnalyticFunction& u, const DomainSpec& region, double beta);

}  // namespace fracp
