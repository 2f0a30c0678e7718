#include "dcsim/linear_solver.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dcsim/errors.hpp"

namespace dcsim {

SolveStats solve_helmholtz(Backend b, const Grid& g, double dt, double decay, std::span<const double> rhs,
                           std::span<double> x, double tol, int max_iter) {
  using namespace kernels;
  const std::size_t n = rhs.size();
  std::vector<double> r(n), zv(n), p(n), Ap(n), diag(n);
  helmholtz_diagonal(b, g, dt, decay, diag);

  helmholtz_apply(b, g, dt, decay, x, Ap);
  for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - Ap[k];

  const double bnorm = std::sqrt(dot(b, rhs, rhs));
  const double target = tol * (bnorm > 0.0 ? bnorm : 1.0);
  double rnorm = std::sqrt(dot(b, r, r));

  SolveStats stats;
  if (rnorm > target) {
    for (std::size_t k = 0; k < n; ++k) zv[k] = r[k] / diag[k];
    p = zv;
    double rz = dot(b, r, zv);
    while (rnorm > target) {
      if (stats.iterations >= max_iter)
        throw NumericalError("Helmholtz CG did not converge: residual " + std::to_string(rnorm / target * tol));
      helmholtz_apply(b, g, dt, decay, p, Ap);
      const double pAp = dot(b, p, Ap);
      if (!(pAp > 0.0)) throw NumericalError("Helmholtz CG breakdown (non-positive curvature)");
      const double alpha = rz / pAp;
      axpy(b, alpha, p, x);
      axpy(b, -alpha, Ap, r);
      rnorm = std::sqrt(dot(b, r, r));
      ++stats.iterations;
      if (!std::isfinite(rnorm)) throw NumericalError("Helmholtz CG produced non-finite residual");
      for (std::size_t k = 0; k < n; ++k) zv[k] = r[k] / diag[k];
      const double rz_new = dot(b, r, zv);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t k = 0; k < n; ++k) p[k] = zv[k] + beta * p[k];
    }
  }

  // Mass correction: every column of the operator sums to 1 + dt*decay, so
  // the exact solution satisfies sum(x) = sum(rhs) / (1 + dt*decay).
  const double defect = sum(b, rhs) / (1.0 + dt * decay) - sum(b, std::span<const double>(x));
  const double shift = defect / static_cast<double>(n);
  if (shift != 0.0)
    for (std::size_t k = 0; k < n; ++k) x[k] += shift;

  stats.relative_residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
  return stats;
}

}  // namespace dcsim
