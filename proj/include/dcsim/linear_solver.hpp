#pragma once

#include <span>

#include "dcsim/grid.hpp"
#include "dcsim/kernels.hpp"

namespace dcsim {

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves ((1 + dt*decay) I - dt*lap) x = rhs with homogeneous Neumann
/// boundaries by Jacobi-preconditioned conjugate gradients. `x` holds the
/// initial guess on entry.
///
/// After convergence x is shifted by a constant so that sum(A x) == sum(rhs)
/// up to rounding; the operator maps constants to constants, so the shift
/// leaves the residual norm essentially unchanged while making the discrete
/// mass balance exact. Throws NumericalError if `tol` is not reached.
SolveStats solve_helmholtz(Backend b, const Grid& g, double dt, double decay, std::span<const double> rhs,
                           std::span<double> x, double tol = 1e-12, int max_iter = 10000);

}  // namespace dcsim
