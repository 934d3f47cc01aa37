#include "fracp/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace fracp {

KernelSpec make_kernel(int dim, double s, double p, double lambda, Profile profile,
                       std::vector<double> angular_coeffs) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("kernel: dim must be 1 or 2");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("kernel: s must lie in (0,1)");
  if (!(p > 1.0)) throw std::invalid_argument("kernel: p must exceed 1");
  if (!(lambda >= 1.0)) throw std::invalid_argument("kernel: lambda must be >= 1");
  if (profile == Profile::Power && !angular_coeffs.empty())
    throw std::invalid_argument("kernel: power profile takes no angular coefficients");
  for (std::size_t k = 0; k < angular_coeffs.size(); ++k) {
    if (k % 2 == 0 && angular_coeffs[k] != 0.0)
      throw std::invalid_argument("kernel: odd angular harmonics break evenness");
  }
  KernelSpec spec;
  spec.dim = dim;
  spec.s = s;
  spec.p = p;
  spec.lambda = lambda;
  spec.profile = profile;
  spec.angular_coeffs = std::move(angular_coeffs);
  return spec;
}

double angular_factor(const KernelSpec& spec, double theta) {
  if (spec.profile == Profile::Power) return 1.0;
  double a = 1.0;
  for (std::size_t k = 0; k < spec.angular_coeffs.size(); ++k)
    a += spec.angular_coeffs[k] * std::cos(double(k + 1) * theta);
  return a;
}

double eval_kernel(const KernelSpec& spec, Point z) {
  const double r = norm(z, spec.dim);
  if (r == 0.0) throw std::domain_error("kernel undefined at the origin");
  double a = 1.0;
  if (spec.profile == Profile::Perturbed)
    a = angular_factor(spec, std::atan2(spec.dim == 2 ? z[1] : 0.0, z[0]));
  return a * std::pow(r, -spec.singular_order());
}

double kernel_angular_mass(const KernelSpec& spec) {
  if (spec.dim == 1) return angular_factor(spec, 0.0) + angular_factor(spec, kPi);
  return 2.0 * kPi;  // cosine harmonics integrate to zero over the circle
}

AdmissibilityReport check_admissibility(const KernelSpec& spec, const SamplePlan& plan) {
  AdmissibilityReport rep;
  AxiomCheck& sym = rep.axioms[0];
  AxiomCheck& tra = rep.axioms[1];
  AxiomCheck& gro = rep.axioms[2];
  AxiomCheck& con = rep.axioms[3];
  sym.name = "symmetry";
  tra.name = "translation_invariance";
  gro.name = "growth_envelope";
  con.name = "continuity";

  // Translation invariance is structural: the kernel only ever sees x - y.
  tra.pass = true;
  tra.note = "kernel depends on the displacement only";

  sym.pass = gro.pass = con.pass = true;
  const int nang = spec.dim == 1 ? 2 : plan.angles;
  const double order = spec.singular_order();

  for (int ir = 0; ir < plan.radii; ++ir) {
    const double t = plan.radii == 1 ? 0.0 : double(ir) / (plan.radii - 1);
    const double r = plan.r_lo * std::pow(plan.r_hi / plan.r_lo, t);
    for (int ia = 0; ia < nang; ++ia) {
      const double theta = spec.dim == 1 ? (ia == 0 ? 0.0 : kPi) : 2.0 * kPi * ia / nang;
      const Point z = r * direction(theta, spec.dim);
      const double K = eval_kernel(spec, z);

      const double defect = std::abs(K - eval_kernel(spec, {-z[0], -z[1]})) / K;
      if (defect > sym.worst) { sym.worst = defect; sym.witness = z; }

      // Envelope defect: how far K(z)|z|^{n+sp} strays outside [1/lambda, lambda].
      const double env = K * std::pow(r, order);
      const double excess = std::max(env / spec.lambda, 1.0 / (env * spec.lambda));
      if (excess > gro.worst) { gro.worst = excess; gro.witness = z; }

      // Relative finite-difference modulus along radius and (in 2D) angle.
      double mod = std::abs(eval_kernel(spec, (1.0 + plan.continuity_step) * z) - K) / K;
      if (spec.dim == 2) {
        const Point zt = r * direction(theta + plan.continuity_step, 2);
        mod = std::max(mod, std::abs(eval_kernel(spec, zt) - K) / K);
      }
      if (mod > con.worst) { con.worst = mod; con.witness = z; }
    }
  }

  sym.pass = sym.worst <= 1e-12;
  gro.pass = gro.worst <= 1.0 + 1e-12;
  con.pass = con.worst <= plan.continuity_factor * plan.continuity_step;
  sym.note = "max relative |K(z)-K(-z)|";
  gro.note = "max of K|z|^{n+sp}/lambda and 1/(K|z|^{n+sp} lambda)";
  con.note = "max relative finite-difference step response";
  rep.pass = sym.pass && tra.pass && gro.pass && con.pass;
  return rep;
}

}  // namespace fracp
