#pragma once

#include <span>
#include <vector>

#include "dcsim/grid.hpp"
#include "dcsim/model.hpp"

namespace dcsim {

/// Which implementation runs the cell/face loops. `reference` is the plain
/// serial version kept as the testing baseline; `openmp` is the fused,
/// data-parallel production path.
enum class Backend { reference, openmp };

/// Fluxes through cell faces, positive in the +axis direction.
/// x faces: (nx+1) * ny entries, index i + (nx+1) j, face i sits left of cell i.
/// y faces: nx * (ny+1) entries, index i + nx j, face j sits below cell row j.
struct FaceFluxes {
  std::vector<double> x;
  std::vector<double> y;
};

/// Degenerate diffusion flux -(P(u_R) - P(u_L))/h with P(u) = (u+eps)^m - eps^m.
/// Boundary faces carry zero flux.
FaceFluxes diffusive_flux_u(const Grid& g, std::span<const double> u, const ModelParams& p);

/// Chemotactic flux a * (u^m)_face with a = phi(mean u) (v_R - v_L)/h; u^m is
/// taken from the upwind side when `upwind`, otherwise averaged.
FaceFluxes chemotactic_flux_u(const Grid& g, std::span<const double> u, std::span<const double> v,
                              const ModelParams& p, bool upwind);

namespace kernels {

/// du/dt = -div(F_diff + F_chemo) + mu u^delta (1 - r u).
void u_rate(Backend b, const Grid& g, std::span<const double> u, std::span<const double> v,
            const ModelParams& p, bool upwind, std::span<double> out);

/// Five/three-point Neumann Laplacian.
void laplacian(Backend b, const Grid& g, std::span<const double> x, std::span<double> out);

/// out = (1 + dt*decay) x - dt * lap(x).
void helmholtz_apply(Backend b, const Grid& g, double dt, double decay, std::span<const double> x,
                     std::span<double> out);

/// Diagonal of the Helmholtz operator above.
void helmholtz_diagonal(Backend b, const Grid& g, double dt, double decay, std::span<double> out);

/// w_out = w * exp(-z dt).
void exp_decay(Backend b, std::span<const double> w, std::span<const double> z, double dt,
               std::span<double> out);

/// y += alpha * x
void axpy(Backend b, double alpha, std::span<const double> x, std::span<double> y);

double sum(Backend b, std::span<const double> x);
double dot(Backend b, std::span<const double> x, std::span<const double> y);
double max_value(Backend b, std::span<const double> x);
double min_value(Backend b, std::span<const double> x);
double max_abs(Backend b, std::span<const double> x);

/// max over interior faces of |x_R - x_L| / h.
double max_face_gradient(Backend b, const Grid& g, std::span<const double> x);

}  // namespace kernels
}  // namespace dcsim
