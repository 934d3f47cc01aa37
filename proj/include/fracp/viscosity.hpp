#pragma once

#include <string>
#include <vector>

#include "fracp/function_space.hpp"
#include "fracp/kernels.hpp"
#include "fracp/pv_engine.hpp"

namespace fracp {

enum class TouchSide { Below, Above };

// A smooth comparison function anchored to lattice data at a node: equal to
// the data value at x0 and glued back into the lattice outside B_radius(x0).
struct TestFunction {
  AnalyticFunction phi;
  Point x0{0.0, 0.0};
  double radius = 0.0;
  TouchSide side = TouchSide::Below;
};

// val + grad.(x-x0) -/+ bend |x-x0|^2 / 2, the slope reconstructed from the
// lattice by least squares and the value anchored to the node exactly.
TestFunction make_quadratic_test(const GridFunction& u, Point x0, double radius,
                                 double bend, TouchSide side);
// val + grad.(x-x0) -/+ amplitude |x-x0|^beta; beta > 2 keeps it C^2.  At a
// degenerate anchor the apex is recorded as the isolated critical point with
// its growth exponent, which is what the certificate machinery feeds on.
TestFunction make_cone_test(const GridFunction& u, Point x0, double radius,
                            double amplitude, double beta, TouchSide side);

struct TouchReport {
  bool touches = false;
  double worst = 0.0;  // most violating signed gap phi - u over the ball
  Point witness{0.0, 0.0};
  std::size_t checked = 0;
};
// Ordering phi <= u (below) or phi >= u (above) checked on every lattice cell
// center inside the gluing ball; equality at the anchor holds by construction.
TouchReport verify_touching(const TestFunction& t, const GridFunction& u);

struct TestEvaluation {
  TouchReport touch;
  PVResult pv;
  bool sign_ok = false;  // the touching-side inequality at the anchor
  bool ok = false;
};
// Glues the test into the data and evaluates the operator at the anchor.  A
// certified divergence counts as +-infinity and satisfies the matching side.
TestEvaluation evaluate_test(const GridFunction& u, const KernelSpec& spec,
                             const TestFunction& t, double tol);

// Same evaluation, but a failed touching precondition throws with a witness
// instead of returning quietly.
TestEvaluation check_viscosity_at(const GridFunction& u, const KernelSpec& spec,
                                  const TestFunction& t, double tol);

struct ScanOptions {
  double tol = 1e-6;    // sign slack, relative to the evaluation scale
  double pv_tol = 1e-7;
  int stride = 1;
  std::vector<double> bend_scales{1.0, 10.0, 100.0};
  std::vector<double> cone_exponents{};  // extra apex tests, singular regime
  double radius_frac = 0.45;             // of the box-face distance
  int min_radius_cells = 4;
};

struct ScanReport {
  bool ok = false;          // no violations among the decided tests
  bool conclusive = false;  // at least one test produced a decided value
  std::size_t nodes = 0, tested = 0, skipped = 0, indeterminate = 0, violations = 0;
  struct Offender {
    Point x0{0.0, 0.0};
    double scaled_value = 0.0;    // ladder value over the evaluation scale
    double discrete_value = 0.0;  // lattice-sum value, NaN without that route
    std::string kind;
  };
  std::vector<Offender> offenders;  // worst first, capped
  double margin = 0.0;  // least favorable confirmed margin, enforced side
};
// Runs the touching-test family over the interior nodes.  side == Below
// probes the supersolution inequality (operator value >= -tol at every
// admissible touching test), side == Above the subsolution inequality.
// Verdicts are stated at mesh scale: the extrapolated ladder carries the
// quadrature error of the ambient lattice data, so a candidate only counts
// as a violation once the discrete operator sum on the same glued values
// confirms the failed sign.  Unbounded exterior models have no discrete
// route and rest on the ladder alone.
ScanReport scan_equivalence(const GridFunction& u, const KernelSpec& spec,
                            TouchSide side, const ScanOptions& opt = {});

// min(u, M) cellwise, with the exterior model truncated alongside.  Throws
// std::invalid_argument when the cut of a power model falls outside the
// lattice box and the exterior minimum is not expressible in the model class.
GridFunction min_with_constant(const GridFunction& u, double M);

// min(u, v) cellwise on a shared lattice; exterior models combine by the
// same pointwise-minimum rules.
GridFunction truncate_min(const GridFunction& u, const GridFunction& v);

}  // namespace fracp
