#include "fracp/pv_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fracp/algebra.hpp"
#include "fracp/quadrature.hpp"

namespace fracp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Directions are swept in antipodal pairs and the two g-factors summed before
// multiplying by the shared kernel magnitude: odd parts of the integrand
// cancel exactly in floating point, which keeps annuli of affine data at
// zero instead of accumulating roundoff through the outward shells.
struct AngleSet {
  std::vector<double> thetas;
  double weight = 1.0;
};

AngleSet make_angles(int dim) {
  if (dim == 1) return {{0.0}, 1.0};
  AngleSet a;
  const int pairs = 32;
  a.thetas.reserve(pairs);
  for (int j = 0; j < pairs; ++j) a.thetas.push_back((j + 0.5) * kPi / pairs);
  a.weight = kPi / pairs;
  return a;
}

// Integral over the annulus a < |z| < b of gval(z) * K(z) dz, with gval
// supplied pointwise and the paired angular sweep described above.
double annulus_sum(const KernelSpec& spec, double a, double b,
                   const std::function<double(Point)>& gval) {
  const AngleSet angles = make_angles(spec.dim);
  const double order = 1.0 + spec.s * spec.p;  // radial power after the jacobian
  double total = 0.0;
  for (double theta : angles.thetas) {
    const Point w = direction(theta, spec.dim);
    const double af = angular_factor(spec, theta);
    total += angles.weight * af *
             gauss16(
                 [&](double rho) {
                   const Point z = rho * w;
                   return (gval(z) + gval(-1.0 * z)) * std::pow(rho, -order);
                 },
                 a, b);
  }
  return total;
}

// Integral over |z| > R of g(ux - far(x+z)) K(z) dz.  Bounded models are
// closed-form; power models get dyadic shells plus the analytic remainder of
// the dominant power once |x+z| and |z| are indistinguishable at the working
// precision.
double far_model_integral(const KernelSpec& spec, Point x, double ux,
                          const FarField& far, double R) {
  const double sp = spec.s * spec.p;
  const double mass = kernel_angular_mass(spec);
  if (far.kind != FarField::Kind::Power) {
    const double c = far.kind == FarField::Kind::Constant ? far.value : 0.0;
    return odd_power(ux - c, spec.p) * mass * std::pow(R, -sp) / sp;
  }
  const double gamma = far.exponent;
  const double decay = sp - std::max(gamma, 0.0) * (spec.p - 1.0);
  if (decay <= 1e-9)
    throw std::domain_error("far-field growth outside the tail class");
  auto gval = [&](Point z) {
    return odd_power(ux - far.eval(x + z, spec.dim), spec.p);
  };
  double sum = 0.0;
  double lo = R;
  const int shells = 48;
  for (int k = 0; k < shells; ++k) {
    sum += annulus_sum(spec, lo, 2.0 * lo, gval);
    lo *= 2.0;
  }
  // beyond T the argument is dominated by the power term (gamma > 0) or has
  // settled at ux (gamma <= 0)
  const double T = lo;
  double rem;
  if (gamma > 0.0)
    rem = -odd_power(far.amplitude, spec.p) * mass * std::pow(T, -decay) / decay;
  else
    rem = odd_power(ux, spec.p) * mass * std::pow(T, -sp) / sp;
  return sum + rem;
}

struct RateFit {
  double slope = 0.0;
  double r2 = 0.0;
  int n = 0;
};

// Least-squares slope of log|increment| against log(cutoff).
std::optional<RateFit> fit_loglog(const std::vector<std::pair<double, double>>& pts) {
  std::vector<double> xs, ys;
  const std::size_t take = std::min<std::size_t>(pts.size(), 25);
  for (std::size_t i = pts.size() - take; i < pts.size(); ++i) {
    if (pts[i].second > 0.0 && std::isfinite(pts[i].second)) {
      xs.push_back(std::log(pts[i].first));
      ys.push_back(std::log(pts[i].second));
    }
  }
  const std::size_t n = xs.size();
  if (n < 3) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) return std::nullopt;
  RateFit f;
  f.slope = sxy / sxx;
  f.n = int(n);
  const double ss_res = syy - sxy * sxy / sxx;
  f.r2 = syy <= 1e-20 ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
  return f;
}

// Shrinks the cutoff dyadically, accumulating the exact annulus increments of
// the affine-compensated integrand, and classifies the limit behaviour.
PVResult run_ladder(const KernelSpec& spec, double ux, Point grad,
                    const std::function<double(Point)>& shifted,  // z -> u(x+z)
                    double near_r, double mid_and_far, double tol,
                    const PVOptions& opt) {
  PVResult res;
  const double p = spec.p;
  const double sp = spec.s * p;
  res.scale = std::pow(1.0 + std::abs(ux), p - 1.0) * std::pow(near_r, -sp);
  auto comp = [&](Point z) {
    return odd_power(ux - shifted(z), p) - odd_power(-dot(grad, z, spec.dim), p);
  };

  double I = mid_and_far;
  res.epsilons.push_back(near_r);
  res.partials.push_back(I);
  std::vector<std::pair<double, double>> rate_pts;  // (outer cutoff, |increment|)
  const double small = tol * res.scale;
  int consecutive_small = 0;
  int at_noise_floor = 0;
  bool decided = false;

  for (int k = 0; k < opt.max_levels && !decided; ++k) {
    const double hi = near_r * std::pow(2.0, -k);
    const double lo = 0.5 * hi;
    const double A = annulus_sum(spec, lo, hi, comp);
    I += A;
    res.epsilons.push_back(lo);
    res.partials.push_back(I);
    rate_pts.push_back({hi, std::abs(A)});

    consecutive_small = std::abs(A) <= small ? consecutive_small + 1 : 0;
    if (consecutive_small >= 3) {
      res.verdict = PVVerdict::Converged;
      res.value = I;
      res.note = "increments fell below tolerance";
      decided = true;
    }
    // Cancellation in u(x) - u(y) costs about eps_mach * (1+|u|)^{p-1} per
    // integrand value, amplified by the kernel to scale * (near_r/lo)^{sp}.
    // Past that floor further levels add noise, not signal; stop and let the
    // clean prefix decide.
    const double noise = std::numeric_limits<double>::epsilon() * res.scale *
                         std::pow(near_r / lo, sp);
    at_noise_floor = std::abs(A) <= 10.0 * noise ? at_noise_floor + 1 : 0;
    if (!decided && at_noise_floor >= 2 && consecutive_small == 0) break;
    if (!decided && k >= 8 && std::abs(I) > opt.divergence_factor * res.scale) {
      const auto f = fit_loglog(rate_pts);
      if (f && f->r2 >= opt.rate_r2_min && f->slope < 0.0) {
        res.verdict = PVVerdict::Diverged;
        res.fitted_rate = f->slope;
        res.fit_r2 = f->r2;
        res.note = "partial sums passed the divergence threshold with growing increments";
        decided = true;
      }
    }
  }

  const auto f = fit_loglog(rate_pts);
  if (f) {
    res.fitted_rate = f->slope;
    res.fit_r2 = f->r2;
  }
  if (!decided) {
    if (rate_pts.empty() || rate_pts.back().second == 0.0) {
      // increments vanished identically before the tolerance counter tripped
      res.verdict = PVVerdict::Converged;
      res.value = I;
      res.note = "increments vanished identically";
    } else if (!f) {
      res.note = "too few usable increments for a rate fit";
    } else if (f->r2 < opt.rate_r2_min) {
      res.note = "rate fit ambiguous";
    } else if (f->slope > opt.rate_slope_min) {
      // increments shrink geometrically with a certified rate; complete the
      // tail of the series with the fitted ratio
      const double ratio = std::pow(2.0, -f->slope);
      const double last = res.partials.back() - res.partials[res.partials.size() - 2];
      res.verdict = PVVerdict::Converged;
      res.value = I + last * ratio / (1.0 - ratio);
      res.extrapolated = true;
      res.note = "rate-certified convergence, series tail completed geometrically";
    } else if (f->slope < -opt.rate_slope_min) {
      res.verdict = PVVerdict::Diverged;
      res.note = "rate-certified divergence";
    } else {
      res.note = "increments show no detectable drift";
    }
  }
  return res;
}

// Direct (uncompensated) integral between near_r and the radius where the far
// model takes over; open-ended shells when no model radius exists.
double mid_zone_analytic(const KernelSpec& spec, const AnalyticFunction& u, Point x,
                         double ux, double near_r, double tol_abs) {
  auto gval = [&](Point z) { return odd_power(ux - u.value(x + z), spec.p); };
  if (std::isfinite(u.far_radius)) {
    const double r_out = std::max(near_r, u.far_radius + norm(x, spec.dim));
    double total = 0.0;
    double lo = near_r;
    while (lo < r_out * (1.0 - 1e-14)) {
      const double hi = std::min(2.0 * lo, r_out);
      total += annulus_sum(spec, lo, hi, gval);
      lo = hi;
    }
    return total + far_model_integral(spec, x, ux, u.far_field, r_out);
  }
  // no model radius: march outward until three consecutive shells are
  // negligible, or give up
  double total = 0.0;
  double lo = near_r;
  int consecutive_small = 0;
  for (int k = 0; k < 64; ++k) {
    const double a = annulus_sum(spec, lo, 2.0 * lo, gval);
    total += a;
    lo *= 2.0;
    consecutive_small = std::abs(a) <= tol_abs ? consecutive_small + 1 : 0;
    if (consecutive_small >= 3) return total;
  }
  throw std::domain_error("far-field model required: outward shells do not settle");
}

double near_radius_analytic(const AnalyticFunction& u, Point x, const PVOptions& opt) {
  if (opt.near_radius > 0.0) return opt.near_radius;
  double r = 1.0;
  if (u.smooth_radius) r = std::min(r, 0.5 * u.smooth_radius(x));
  if (!(r > 0.0))
    throw std::invalid_argument("no smooth neighborhood at the base point");
  return r;
}

double dist_to_critical(const AnalyticFunction& u, Point x) {
  double d = kInf;
  for (const Point& c : u.critical_points) d = std::min(d, norm(x - c, u.dim));
  return d;
}

// Sampled sup of |D^2 u| over the closed ball of radius eps.
double hessian_sup(const AnalyticFunction& u, Point x, double eps) {
  double tau = u.hessian(x).spectral_norm(u.dim);
  const AngleSet angles = make_angles(u.dim);
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    for (double theta : angles.thetas) {
      const Point w = direction(theta, u.dim);
      for (double sgn : {1.0, -1.0}) {
        const Point y = x + (sgn * frac * eps) * w;
        tau = std::max(tau, u.hessian(y).spectral_norm(u.dim));
      }
    }
  }
  return tau;
}

}  // namespace

const char* to_string(PVVerdict v) {
  switch (v) {
    case PVVerdict::Converged: return "converged";
    case PVVerdict::Diverged: return "diverged";
    default: return "inconclusive";
  }
}

double near_zone_certificate(const AnalyticFunction& u, Point x, double eps,
                             const KernelSpec& spec) {
  if (u.dim != spec.dim) throw std::invalid_argument("certificate: dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("certificate: cutoff must be positive");
  if (u.smooth_radius && u.smooth_radius(x) < eps)
    throw std::invalid_argument("certificate radius exceeds the smooth neighborhood");

  const double p = spec.p, s = spec.s, lam = spec.lambda;
  const double sp = s * p;
  const double q1 = p * (1.0 - s);
  const double q2 = 2.0 * (p - 1.0) - sp;
  const double gn = norm(u.gradient(x), u.dim);
  const double tau = hessian_sup(u, x, eps);
  const double cg = bound_constants(p).upper * (p - 1.0);
  const double csph = spherical_bound_constant(u.dim, p);
  const double mass = sphere_measure(u.dim);

  std::vector<double> candidates;
  if (p >= 2.0) {
    // split (|linear| + error)^{p-2} into the two pure powers
    candidates.push_back(cg * lam * std::pow(2.0, p - 2.0) * (0.5 * tau) *
                         (csph * std::pow(gn, p - 2.0) * std::pow(eps, q1) / q1 +
                          mass * std::pow(0.5 * tau, p - 2.0) * std::pow(eps, q2) / q2));
  } else {
    if (gn > 0.0)
      candidates.push_back(cg * lam * csph * (0.5 * tau) * std::pow(gn, p - 2.0) *
                           std::pow(eps, q1) / q1);
    if (q2 > 0.0)
      candidates.push_back(cg * lam * mass * std::pow(0.5 * tau, p - 1.0) *
                           std::pow(eps, q2) / q2);
    if (u.critical_set_known && std::isfinite(u.cone_exponent) &&
        !u.critical_points.empty()) {
      const double beta = u.cone_exponent;
      const double e = beta * (p - 1.0) - sp;
      if (e > 0.0) {
        const double d = dist_to_critical(u, x);
        const double nb = c2beta_norm(u, DomainSpec::ball(x, eps), beta);
        if (d <= 1e-14) {
          // double radial integration of |D^2| <= nb * d^{beta-2}
          candidates.push_back(lam * std::pow(nb / (beta * (beta - 1.0)), p - 1.0) *
                               mass * std::pow(eps, e) / e);
        } else if (d < eps && d < 1.0) {
          // inside d: the gradient floor d^{beta-1}/nb controls the linear part
          const double i1 = cg * lam * csph * (0.5 * nb) * std::pow(nb, 2.0 - p) *
                            std::pow(2.0, beta - 2.0) * std::pow(d, e) / q1;
          // outside d: pure error-power route with |D^2| <= nb (2 rho)^{beta-2}
          const double i2 = cg * lam * mass * std::pow(0.5 * nb, p - 1.0) *
                            std::pow(2.0, (beta - 2.0) * (p - 1.0)) *
                            std::pow(eps, e) / e;
          candidates.push_back(i1 + i2);
        }
      }
    }
  }
  double best = kInf;
  for (double c : candidates)
    if (!std::isnan(c)) best = std::min(best, c);
  if (candidates.empty() || !std::isfinite(best))
    throw std::invalid_argument("inadmissible test-function class");
  return best;
}

PVResult pv_evaluate(const AnalyticFunction& u, Point x, const KernelSpec& spec,
                     double tol, const PVOptions& opt) {
  if (u.dim != spec.dim)
    throw std::invalid_argument("principal value: dimension mismatch");
  const double near_r = near_radius_analytic(u, x, opt);
  const double ux = u.value(x);
  const Point grad = u.gradient(x);
  const double scale =
      std::pow(1.0 + std::abs(ux), spec.p - 1.0) * std::pow(near_r, -spec.s * spec.p);
  const double mid = mid_zone_analytic(spec, u, x, ux, near_r, 1e-2 * tol * scale);
  PVResult res = run_ladder(
      spec, ux, grad, [&](Point z) { return u.value(x + z); }, near_r, mid, tol, opt);
  if (opt.want_certificate) {
    try {
      res.near_zone_bound = near_zone_certificate(u, x, res.epsilons.back(), spec);
    } catch (const std::exception&) {
      res.near_zone_bound = std::nullopt;
    }
  }
  return res;
}

PVResult pv_evaluate(const GridFunction& u, Point x, const KernelSpec& spec,
                     double tol, const PVOptions& opt) {
  if (u.dim() != spec.dim)
    throw std::invalid_argument("principal value: dimension mismatch");
  const Box box = u.lattice_box();
  const double face = box.face_distance(x, u.dim());
  if (!(face > 0.0))
    throw std::invalid_argument("principal value: base point outside the lattice box");
  const double h = u.h();
  double near_r = opt.near_radius > 0.0 ? opt.near_radius : std::min(1.0, 0.5 * face);
  near_r = std::min(near_r, 0.5 * face);

  const LocalFit fit = local_quadratic_fit(u, x);
  const double ux = fit.value;
  const double band = 2.5 * h;  // inside: reconstructed quadratic; outside: lattice
  auto shifted = [&](Point z) {
    if (norm(z, u.dim()) <= band) {
      double v = fit.value + fit.grad[0] * z[0] + 0.5 * fit.hess.xx * z[0] * z[0];
      if (u.dim() == 2)
        v += fit.grad[1] * z[1] + fit.hess.xy * z[0] * z[1] + 0.5 * fit.hess.yy * z[1] * z[1];
      return v;
    }
    return u.interpolate(x + z);
  };

  // lattice cells carry the mid zone out to the face ball, the far model the rest
  double mid = 0.0;
  const double r_far = std::max(face, near_r);
  const double cell_mass = std::pow(h, u.dim());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point c = u.node(i);
    const double d = norm(c - x, u.dim());
    if (d >= near_r && d < r_far)
      mid += odd_power(ux - u.value(i), spec.p) * eval_kernel(spec, c - x) * cell_mass;
  }
  mid += far_model_integral(spec, x, ux, u.far_field(), r_far);

  return run_ladder(spec, ux, fit.grad, shifted, near_r, mid, tol, opt);
}

PVResult pv_evaluate(const GluedFunction& u, const KernelSpec& spec, double tol,
                     const PVOptions& opt) {
  if (!u.inner || !u.ambient)
    throw std::invalid_argument("glued principal value: missing pieces");
  if (u.inner->dim != spec.dim || u.ambient->dim() != spec.dim)
    throw std::invalid_argument("glued principal value: dimension mismatch");
  if (!(u.radius > 0.0))
    throw std::invalid_argument("glued principal value: radius must be positive");
  const Point x = u.center;
  const GridFunction& amb = *u.ambient;
  const Box box = amb.lattice_box();
  const double face = box.face_distance(x, spec.dim);
  if (face < u.radius)
    throw std::invalid_argument("glued principal value: ball leaves the lattice box");

  const double ux = u.inner->value(x);
  const Point grad = u.inner->gradient(x);
  auto shifted = [&](Point z) { return u.inner->value(x + z); };

  double mid = 0.0;
  const double cell_mass = std::pow(amb.h(), spec.dim);
  for (std::size_t i = 0; i < amb.size(); ++i) {
    const Point c = amb.node(i);
    const double d = norm(c - x, spec.dim);
    if (d >= u.radius && d < face)
      mid += odd_power(ux - amb.value(i), spec.p) * eval_kernel(spec, c - x) * cell_mass;
  }
  mid += far_model_integral(spec, x, ux, amb.far_field(), face);

  PVResult res = run_ladder(spec, ux, grad, shifted, u.radius, mid, tol, opt);
  if (opt.want_certificate) {
    try {
      res.near_zone_bound = near_zone_certificate(*u.inner, x, res.epsilons.back(), spec);
    } catch (const std::exception&) {
      res.near_zone_bound = std::nullopt;
    }
  }
  return res;
}

ThresholdScan threshold_scan(const std::vector<double>& s_grid,
                             const std::vector<double>& p_grid, double band,
                             double tol) {
  ThresholdScan scan;
  scan.band = band;
  const AnalyticFunction u = analytic_parabola_cap(1);
  PVOptions opt;
  for (double s : s_grid) {
    for (double p : p_grid) {
      const KernelSpec spec = make_kernel(1, s, p, 1.0);
      const PVResult res = pv_evaluate(u, {0.0, 0.0}, spec, tol, opt);
      ThresholdRow row;
      row.s = s;
      row.p = p;
      row.critical_p = spec.critical_p();
      row.verdict = res.verdict;
      row.rate = res.fitted_rate;
      row.near_critical = std::abs(p - row.critical_p) <= band;
      scan.rows.push_back(row);
    }
  }
  return scan;
}

ContinuityProbe continuity_probe(const AnalyticFunction& u, Point x0, double rho,
                                 const KernelSpec& spec, double tol) {
  ContinuityProbe probe;
  PVOptions opt;
  auto must_converge = [&](const AnalyticFunction& f, Point q) {
    const PVResult r = pv_evaluate(f, q, spec, tol, opt);
    if (r.verdict != PVVerdict::Converged)
      throw std::domain_error("stability probe requires convergent principal values");
    return r.value;
  };
  const double v0 = must_converge(u, x0);
  for (int j = 1; j <= 6; ++j) {
    const double d = rho * std::pow(2.0, -j);
    probe.modulus.push_back({d, std::abs(must_converge(u, x0 + d * Point{1.0, 0.0}) - v0)});
  }
  std::vector<Point> qs = {x0, x0 + (0.25 * rho) * Point{1.0, 0.0},
                           x0 - (0.25 * rho) * Point{1.0, 0.0}};
  if (spec.dim == 2) {
    qs.push_back(x0 + (0.25 * rho) * Point{0.0, 1.0});
    qs.push_back(x0 - (0.25 * rho) * Point{0.0, 1.0});
  }
  std::vector<double> base;
  for (Point q : qs) base.push_back(must_converge(u, q));
  std::vector<std::pair<double, double>> pts;
  for (double theta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const AnalyticFunction pert = analytic_sum(u, analytic_bump(u.dim, x0, 0.5 * rho, theta));
    double gap = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i)
      gap = std::max(gap, std::abs(must_converge(pert, qs[i]) - base[i]));
    probe.bump_gap.push_back({theta, gap});
    if (gap > 0.0) pts.push_back({theta, gap});
  }
  if (const auto f = fit_loglog(pts)) probe.gap_slope = f->slope;
  return probe;
}

LocalFit local_quadratic_fit(const GridFunction& u, Point x) {
  const int dim = u.dim();
  const Box box = u.lattice_box();
  if (box.face_distance(x, dim) < 0.0)
    throw std::invalid_argument("quadratic fit: point outside the lattice box");
  const double h = u.h();
  std::array<int, 2> ic{0, 0};
  for (int a = 0; a < dim; ++a) {
    const int n = u.cells(a);
    const int i = int(std::llround((x[a] - box.lo[a]) / h - 0.5));
    ic[a] = std::clamp(i, 2, n - 3);
  }

  const int nb = dim == 1 ? 3 : 6;  // 1, tx, (ty), tx^2, (tx ty, ty^2)
  std::vector<double> ata(std::size_t(nb) * nb, 0.0);
  std::vector<double> atb(nb, 0.0);
  auto accumulate = [&](Point node, double v) {
    const double tx = (node[0] - x[0]) / h;
    const double ty = dim == 2 ? (node[1] - x[1]) / h : 0.0;
    double row[6];
    row[0] = 1.0;
    row[1] = tx;
    if (dim == 1) {
      row[2] = tx * tx;
    } else {
      row[2] = ty;
      row[3] = tx * tx;
      row[4] = tx * ty;
      row[5] = ty * ty;
    }
    for (int r = 0; r < nb; ++r) {
      atb[r] += row[r] * v;
      for (int c = 0; c < nb; ++c) ata[std::size_t(r) * nb + c] += row[r] * row[c];
    }
  };
  for (int dj = dim == 2 ? -2 : 0; dj <= (dim == 2 ? 2 : 0); ++dj)
    for (int di = -2; di <= 2; ++di) {
      const std::size_t idx = u.index(ic[0] + di, dim == 2 ? ic[1] + dj : 0);
      accumulate(u.node(idx), u.value(idx));
    }

  // gaussian elimination with partial pivoting on the tiny normal system
  for (int c = 0; c < nb; ++c) {
    int piv = c;
    for (int r = c + 1; r < nb; ++r)
      if (std::abs(ata[std::size_t(r) * nb + c]) > std::abs(ata[std::size_t(piv) * nb + c]))
        piv = r;
    if (piv != c) {
      for (int k = 0; k < nb; ++k)
        std::swap(ata[std::size_t(c) * nb + k], ata[std::size_t(piv) * nb + k]);
      std::swap(atb[c], atb[piv]);
    }
    const double d = ata[std::size_t(c) * nb + c];
    if (std::abs(d) < 1e-300)
      throw std::runtime_error("quadratic fit: degenerate stencil");
    for (int r = c + 1; r < nb; ++r) {
      const double m = ata[std::size_t(r) * nb + c] / d;
      for (int k = c; k < nb; ++k)
        ata[std::size_t(r) * nb + k] -= m * ata[std::size_t(c) * nb + k];
      atb[r] -= m * atb[c];
    }
  }
  std::vector<double> coef(nb);
  for (int r = nb - 1; r >= 0; --r) {
    double v = atb[r];
    for (int k = r + 1; k < nb; ++k) v -= ata[std::size_t(r) * nb + k] * coef[k];
    coef[r] = v / ata[std::size_t(r) * nb + r];
  }

  LocalFit fit;
  fit.value = coef[0];
  if (dim == 1) {
    fit.grad = {coef[1] / h, 0.0};
    fit.hess = {2.0 * coef[2] / (h * h), 0.0, 0.0};
  } else {
    fit.grad = {coef[1] / h, coef[2] / h};
    fit.hess = {2.0 * coef[3] / (h * h), coef[4] / (h * h), 2.0 * coef[5] / (h * h)};
  }
  return fit;
}

}  // namespace fracp
