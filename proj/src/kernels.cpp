#include "dcsim/kernels.hpp"

#include "kernels_impl.hpp"

namespace dcsim::kernels {

#define DCSIM_DISPATCH(b, call) \
  return (b) == Backend::reference ? reference::call : omp::call

void u_rate(Backend b, const Grid& g, std::span<const double> u, std::span<const double> v,
            const ModelParams& p, bool upwind, std::span<double> out) {
  DCSIM_DISPATCH(b, u_rate(g, u, v, p, upwind, out));
}

void laplacian(Backend b, const Grid& g, std::span<const double> x, std::span<double> out) {
  DCSIM_DISPATCH(b, laplacian(g, x, out));
}

void helmholtz_apply(Backend b, const Grid& g, double dt, double decay, std::span<const double> x,
                     std::span<double> out) {
  DCSIM_DISPATCH(b, helmholtz_apply(g, dt, decay, x, out));
}

void helmholtz_diagonal(Backend b, const Grid& g, double dt, double decay, std::span<double> out) {
  DCSIM_DISPATCH(b, helmholtz_diagonal(g, dt, decay, out));
}

void exp_decay(Backend b, std::span<const double> w, std::span<const double> z, double dt,
               std::span<double> out) {
  DCSIM_DISPATCH(b, exp_decay(w, z, dt, out));
}

void axpy(Backend b, double alpha, std::span<const double> x, std::span<double> y) {
  DCSIM_DISPATCH(b, axpy(alpha, x, y));
}

double sum(Backend b, std::span<const double> x) { DCSIM_DISPATCH(b, sum(x)); }
double dot(Backend b, std::span<const double> x, std::span<const double> y) {
  DCSIM_DISPATCH(b, dot(x, y));
}
double max_value(Backend b, std::span<const double> x) { DCSIM_DISPATCH(b, max_value(x)); }
double min_value(Backend b, std::span<const double> x) { DCSIM_DISPATCH(b, min_value(x)); }
double max_abs(Backend b, std::span<const double> x) { DCSIM_DISPATCH(b, max_abs(x)); }
double max_face_gradient(Backend b, const Grid& g, std::span<const double> x) {
  DCSIM_DISPATCH(b, max_face_gradient(g, x));
}

#undef DCSIM_DISPATCH

}  // namespace dcsim::kernels
