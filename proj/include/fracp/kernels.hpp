#pragma once

#include <array>
#include <string>
#include <vector>

#include "fracp/geometry.hpp"

namespace fracp {

enum class Profile { Power, Perturbed };

// Admissible comparison-kernel family: K(z) = a(z/|z|) |z|^{-n-sp} with the
// angular factor a trapped between 1/lambda and lambda. The pure power profile
// has a == 1. Perturbed profiles carry a truncated cosine series
//   a(theta) = 1 + sum_k c_k cos(k theta),
// where odd harmonics are rejected: they flip sign under z -> -z and would
// break the evenness of the kernel.
struct KernelSpec {
  int dim = 1;
  double s = 0.5;
  double p = 2.0;
  double lambda = 1.0;
  Profile profile = Profile::Power;
  std::vector<double> angular_coeffs;  // c_k multiplies cos(k*theta), k = 1..m

  double singular_order() const { return dim + s * p; }  // n + sp
  double critical_p() const { return 2.0 / (2.0 - s); }
  bool singular_regime() const { return p <= critical_p(); }
};

// Validates ranges and symmetry of the angular series; throws std::invalid_argument.
KernelSpec make_kernel(int dim, double s, double p, double lambda,
                       Profile profile = Profile::Power,
                       std::vector<double> angular_coeffs = {});

// Angular factor a(theta). For dim == 1 the only meaningful angles are 0 and pi.
double angular_factor(const KernelSpec& spec, double theta);

// K(z); throws std::domain_error at z = 0 where the kernel is undefined.
double eval_kernel(const KernelSpec& spec, Point z);

// Integral of the angular factor over S^{n-1}. The cosine harmonics average
// out, so this is |S^{n-1}| exactly; kept as a function for clarity at call
// sites that integrate the kernel over full annuli.
double kernel_angular_mass(const KernelSpec& spec);

struct AxiomCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;   // worst observed defect, axiom-specific scale
  Point witness{0.0, 0.0};
  std::string note;
};

struct AdmissibilityReport {
  bool pass = false;
  std::array<AxiomCheck, 4> axioms;  // symmetry, translation, growth, continuity
};

// Sampling plan for check_admissibility: log-spaced radii spanning at least
// four decades crossed with a full sweep of directions.
struct SamplePlan {
  double r_lo = 1e-3;
  double r_hi = 10.0;
  int radii = 80;
  int angles = 64;
  double continuity_step = 1e-4;      // relative tangential/radial step
  double continuity_factor = 1e3;     // pass while |dK|/K <= factor * step
};

AdmissibilityReport check_admissibility(const KernelSpec& spec, const SamplePlan& plan = {});

}  // namespace fracp
