#pragma once

#include <string>
#include <vector>

#include "fracp/function_space.hpp"
#include "fracp/kernels.hpp"

namespace fracp {

// Penalty exponent for the doubled-variable functional: quadratic above the
// critical curve p = 2/(2-s), otherwise strictly above sp/(p-1).
double doubling_exponent(double s, double p);

// Halving ladder 1, 1/2, ..., 2^-12.
std::vector<double> default_eps_sequence();

struct DoublingRow {
  double eps = 0.0;
  double m_eps = 0.0;      // sup of v(x) - u(y) - (1/eps)|x-y|^q over pairs
  Point x{0.0, 0.0};       // maximizer pair
  Point y{0.0, 0.0};
  double pair_gap = 0.0;   // penalty (1/eps)|x-y|^q at the maximizer
  double w_min = 0.0;      // worst doubled increment over joint lattice shifts
  std::size_t w_shifts = 0;
  double theta = 0.0;      // truncated kernel integral of the g-difference
};

struct DoublingDiagnostic {
  double q = 2.0;
  double sigma = 0.0;    // sup of v - u over interior nodes
  double h_bound = 0.0;  // sup v - inf u over the lattice
  std::vector<DoublingRow> rows;  // eps descending
  bool monotone = false;          // m_eps nonincreasing as eps shrinks
  bool within_bounds = false;     // sigma <= m_eps <= h_bound rowwise
  bool gap_controlled = false;    // penalty difference bounded by m-eps drop
  bool w_nonnegative = false;
  std::string note;
};

// Exact sup over lattice pairs when the pair count is small, deterministic
// coarse-to-fine refinement otherwise.  u plays the upper role, v the lower:
// the functional is v(x) - u(y) - (1/eps)|x-y|^q.
DoublingDiagnostic doubling_diagnostic(const GridFunction& u, const GridFunction& v,
                                       const KernelSpec& spec, double q,
                                       std::vector<double> eps_sequence = {});

struct ComparisonReport {
  bool pass = false;
  double min_gap = 0.0;       // min over interior nodes of u - v
  Point witness{0.0, 0.0};    // where the minimum gap sits
  double boundary_min = 0.0;  // min of u - v over collar nodes
  std::string note;
};

// Interior ordering check for an exterior-ordered pair: throws when the
// collar or the exterior models fail u >= v, otherwise reports the interior
// minimum of u - v and passes iff it clears -tol.
ComparisonReport compare(const GridFunction& u, const GridFunction& v,
                         const KernelSpec& spec, double tol);

}  // namespace fracp
