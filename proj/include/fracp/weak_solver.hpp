#pragma once

#include <string>
#include <vector>

#include "fracp/function_space.hpp"
#include "fracp/kernels.hpp"

namespace fracp {

// Discrete Dirichlet energy of lattice data against the kernel:
//   (1/p) sum over ordered cell pairs of |u_i - u_j|^p K(x_i - x_j) h^{2n}
// + (2/p) sum over cells of |u_i - c|^p kappa_i h^n,
// where kappa_i integrates the kernel over the exterior of the lattice box
// and c is the (bounded) exterior value.  Minimizers with the collar values
// held fixed are the discrete weak solutions.
double discrete_energy(const GridFunction& u, const KernelSpec& spec);

// First variation against a test vector phi living on the same lattice with
// vanishing exterior: B(u, phi) = d/dt E(u + t phi) at t = 0.
double weak_pairing(const GridFunction& u, const GridFunction& phi, const KernelSpec& spec);

// Energy gradient per node scaled by cell volume:
//   R_i = (2/h^n) [ sum_j g(u_i-u_j) K_ij h^{2n} + g(u_i-c) kappa_i h^n ].
// The scaling keeps the stopping threshold meaningful across lattice widths.
std::vector<double> weak_residual(const GridFunction& u, const KernelSpec& spec);

// Single-cell lattice quadrature of the operator, the same sum that drives
// weak_residual, reusable against locally overridden data.  Requires a
// bounded exterior model.
class DiscreteOperator {
 public:
  DiscreteOperator(const GridFunction& u, const KernelSpec& spec);
  // sum_{j != i} g(u_i - u_j) K_ij h^n + g(u_i - c) kappa_i, half of R_i
  double value_at(std::size_t i) const;
  // same sum with values inside B_radius(center) taken from inner instead
  double glued_at(std::size_t i, const std::function<double(Point)>& inner,
                  Point center, double radius) const;

 private:
  const GridFunction* u_;
  KernelSpec spec_;
  std::vector<double> kappa_;
  double far_ = 0.0;
};

// integral of K(x_i - y) over y outside the lattice box, for every cell.
// Closed form in 1D; per-arc angular quadrature between the corner angles
// in 2D.
std::vector<double> exterior_kernel_weights(const GridFunction& u, const KernelSpec& spec);

struct SolverOptions {
  double tol = 1e-8;   // residual threshold, relative to 1 + energy
  int max_sweeps = 400;
  bool cascade = true; // coarse-to-fine initialization
  int min_cascade_cells = 48;
};

struct SolveReport {
  bool converged = false;
  int sweeps = 0;  // finest-level sweeps
  double energy = 0.0;
  double residual_max = 0.0;
  double threshold = 0.0;  // tol * (1 + energy) actually enforced
  std::string method;
};

// Minimizes the discrete energy over the interior cells, holding collar
// values and the exterior model fixed.  Quadratic case: preconditioned
// conjugate gradients with the convolution taken by FFT.  General case:
// cell-by-cell safeguarded Newton descent on the strictly monotone per-cell
// equation.  Throws std::invalid_argument for unbounded exterior models.
SolveReport solve_dirichlet(GridFunction& u, const KernelSpec& spec,
                            const SolverOptions& opt = {});

struct WeakClassification {
  std::vector<double> pairings;  // against the hat at each interior cell
  double min_pairing = 0.0;
  double max_pairing = 0.0;
  double threshold = 0.0;
  bool supersolution = false;  // every pairing >= -threshold
  bool subsolution = false;    // every pairing <= +threshold
  bool solution = false;
};
// Pairs u against the hat function of every interior cell and classifies by
// the sign pattern at tol * (1 + energy).
WeakClassification classify_weak(const GridFunction& u, const KernelSpec& spec,
                                 double tol = 1e-6);

struct PointwiseWeakReport {
  double min_pointwise = 0.0;    // smallest operator value over the samples
  bool all_converged = false;    // every sample produced a definite value
  double min_pairing = 0.0;      // weak side, hats on the sampled lattice
  bool classified_super = false;
  bool consistent = false;  // pointwise sign >= 0 forces the weak flag
  std::string note;
};
// Pointwise-to-weak consistency: evaluates the operator on a sample of the
// region, samples u onto a lattice over the same region, and checks that a
// nonnegative pointwise minimum is matched by the weak supersolution flag.
PointwiseWeakReport pointwise_to_weak_check(const AnalyticFunction& u,
                                            const DomainSpec& region,
                                            const KernelSpec& spec,
                                            double h, double tol = 1e-6);

}  // namespace fracp
