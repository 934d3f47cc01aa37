#pragma once

// Dense direct solve of the p = 2 first-variation system, used as an oracle
// for the iterative solver.  Assembles its own kernel weights and exterior
// integrals from closed forms, independent of the library path.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fracp/function_space.hpp"
#include "fracp/kernels.hpp"

namespace orc {

// Interior values minimizing the quadratic energy with collar and exterior
// data taken from u.  1D pure power kernel only.
inline std::vector<double> dirichlet_lu_1d(const fracp::GridFunction& u,
                                           double s) {
  const double h = u.h();
  const double sp = s * 2.0;
  const fracp::Box box = u.lattice_box();
  const double c = u.far_field().kind == fracp::FarField::Kind::Constant
                       ? u.far_field().value
                       : 0.0;
  const std::vector<std::size_t>& interior = u.interior_indices();
  const int m = int(interior.size());
  std::vector<int> slot(u.size(), -1);
  for (int k = 0; k < m; ++k) slot[interior[k]] = k;

  const auto w_at = [&](double dist) {
    return std::pow(dist, -1.0 - sp) * h * h;  // K(d) h^{2n}, n = 1
  };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < m; ++k) {
    const std::size_t i = interior[k];
    const double xi = u.node(i)[0];
    double diag = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (j == i) continue;
      const double w = w_at(std::abs(u.node(j)[0] - xi));
      diag += w;
      if (slot[j] >= 0)
        A(k, slot[j]) -= w;
      else
        b(k) += w * u.value(j);
    }
    const double kaph = (std::pow(xi - box.lo[0], -sp) + std::pow(box.hi[0] - xi, -sp)) / sp * h;
    A(k, k) = diag + kaph;
    b(k) += c * kaph;
  }
  const Eigen::VectorXd sol = A.partialPivLu().solve(b);
  return std::vector<double>(sol.data(), sol.data() + m);
}

}  // namespace orc
