#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracp/function_space.hpp"
#include "fracp/kernels.hpp"

namespace fracp {

enum class PVVerdict { Converged, Diverged, Inconclusive };

const char* to_string(PVVerdict v);

// Outcome of a principal-value evaluation.  partials[k] is the integral
// truncated outside the ball of radius epsilons[k]; the affine compensation
// makes each entry exact for its cutoff, so the limit behaviour of the
// partials is the limit behaviour of the principal value itself.
struct PVResult {
  PVVerdict verdict = PVVerdict::Inconclusive;
  double value = 0.0;       // meaningful when converged
  bool extrapolated = false;  // tail of the partial series completed geometrically
  std::vector<double> epsilons;
  std::vector<double> partials;
  std::optional<double> fitted_rate;  // log-log slope of successive differences
  double fit_r2 = 0.0;
  std::optional<double> near_zone_bound;
  double scale = 1.0;  // (1+|u(x)|)^{p-1} r^{-sp}; tolerance reference
  std::string note;
};

struct PVOptions {
  double near_radius = 0.0;  // 0: choose from smoothness and lattice geometry
  int max_levels = 40;
  double divergence_factor = 1e6;
  double rate_r2_min = 0.9;
  double rate_slope_min = 2e-3;  // smaller measured slopes stay inconclusive
  bool want_certificate = false;
};

PVResult pv_evaluate(const AnalyticFunction& u, Point x, const KernelSpec& spec,
                     double tol, const PVOptions& opt = {});
PVResult pv_evaluate(const GridFunction& u, Point x, const KernelSpec& spec,
                     double tol, const PVOptions& opt = {});

// Test function glued into ambient lattice data outside B_radius(center).
struct GluedFunction {
  const AnalyticFunction* inner = nullptr;
  Point center{0.0, 0.0};
  double radius = 0.0;
  const GridFunction* ambient = nullptr;
};
PVResult pv_evaluate(const GluedFunction& u, const KernelSpec& spec, double tol,
                     const PVOptions& opt = {});

// Explicit bound on the compensated integral over B_eps(x).  Regular regime:
// gradient and curvature terms with fully explicit constants.  Singular
// regime (p <= 2/(2-s) at a degenerate point): cone-class bound of order
// eps^{beta(p-1)-sp}; demands beta > sp/(p-1), else throws
// std::invalid_argument("inadmissible test-function class").
double near_zone_certificate(const AnalyticFunction& u, Point x, double eps,
                             const KernelSpec& spec);

struct ThresholdRow {
  double s = 0.0;
  double p = 0.0;
  double critical_p = 0.0;  // 2/(2-s)
  PVVerdict verdict = PVVerdict::Inconclusive;
  std::optional<double> rate;
  bool near_critical = false;
};
struct ThresholdScan {
  std::vector<ThresholdRow> rows;
  double band = 0.0;
};
// Sweeps the capped-parabola model function at the origin in 1D across the
// (s, p) grid; rows inside the +-band strip around 2/(2-s) are flagged.
ThresholdScan threshold_scan(const std::vector<double>& s_grid,
                             const std::vector<double>& p_grid,
                             double band = 0.02, double tol = 1e-6);

struct ContinuityProbe {
  std::vector<std::pair<double, double>> modulus;   // (|x - x0|, |Lu(x) - Lu(x0)|)
  std::vector<std::pair<double, double>> bump_gap;  // (theta, sup_B |L u - L u_theta|)
  std::optional<double> gap_slope;                  // log-log slope of the bump gap
};
// Stability probe: operator modulus along a shrinking pencil of points plus
// the response to a C^2 bump perturbation of height theta.
ContinuityProbe continuity_probe(const AnalyticFunction& u, Point x0, double rho,
                                 const KernelSpec& spec, double tol);

// Quadratic least-squares reconstruction from the 5^n stencil around x.
struct LocalFit {
  double value = 0.0;
  Point grad{0.0, 0.0};
  SymMat hess;
};
LocalFit local_quadratic_fit(const GridFunction& u, Point x);

}  // namespace fracp
