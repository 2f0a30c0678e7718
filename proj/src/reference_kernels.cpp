// Serial reference kernels. Written for clarity: fluxes are materialised on
// every face, then differenced. The OpenMP kernels are checked against these.

#include <algorithm>
#include <cmath>

#include "dcsim/kernels.hpp"
#include "kernels_impl.hpp"

namespace dcsim {

namespace {

double transformed(double u, const ModelParams& p) {
  u = kernels::positive_part(u);
  if (p.eps_reg == 0.0) return u == 0.0 ? 0.0 : std::pow(u, p.m);
  return std::pow(u + p.eps_reg, p.m) - std::pow(p.eps_reg, p.m);
}

double power_m(double u, double m) {
  u = kernels::positive_part(u);
  return u == 0.0 ? 0.0 : std::pow(u, m);
}

// Visits interior faces: fn(face_index, left_cell, right_cell) per axis.
template <class Fn>
void for_interior_x_faces(const Grid& g, Fn fn) {
  const int nx = g.cells(0), ny = g.cells(1);
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const std::size_t face = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx + 1) * j;
      const std::size_t right = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j;
      fn(face, right - 1, right);
    }
}

template <class Fn>
void for_interior_y_faces(const Grid& g, Fn fn) {
  if (g.dim() < 2) return;
  const int nx = g.cells(0), ny = g.cells(1);
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t face = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j;
      const std::size_t up = face;
      fn(face, up - static_cast<std::size_t>(nx), up);
    }
}

FaceFluxes empty_fluxes(const Grid& g) {
  FaceFluxes f;
  f.x.assign(static_cast<std::size_t>(g.cells(0) + 1) * g.cells(1), 0.0);
  if (g.dim() == 2) f.y.assign(static_cast<std::size_t>(g.cells(0)) * (g.cells(1) + 1), 0.0);
  return f;
}

}  // namespace

FaceFluxes diffusive_flux_u(const Grid& g, std::span<const double> u, const ModelParams& p) {
  FaceFluxes f = empty_fluxes(g);
  const double h = g.spacing();
  auto law = [&](std::size_t L, std::size_t R) { return -(transformed(u[R], p) - transformed(u[L], p)) / h; };
  for_interior_x_faces(g, [&](std::size_t face, std::size_t L, std::size_t R) { f.x[face] = law(L, R); });
  for_interior_y_faces(g, [&](std::size_t face, std::size_t L, std::size_t R) { f.y[face] = law(L, R); });
  return f;
}

FaceFluxes chemotactic_flux_u(const Grid& g, std::span<const double> u, std::span<const double> v,
                              const ModelParams& p, bool upwind) {
  FaceFluxes f = empty_fluxes(g);
  const double h = g.spacing();
  auto law = [&](std::size_t L, std::size_t R) {
    const double a = p.phi(0.5 * (u[L] + u[R])) * (v[R] - v[L]) / h;
    if (a == 0.0) return 0.0;
    const double carried = upwind ? (a > 0.0 ? power_m(u[L], p.m) : power_m(u[R], p.m))
                                   : 0.5 * (power_m(u[L], p.m) + power_m(u[R], p.m));
    return a * carried;
  };
  for_interior_x_faces(g, [&](std::size_t face, std::size_t L, std::size_t R) { f.x[face] = law(L, R); });
  for_interior_y_faces(g, [&](std::size_t face, std::size_t L, std::size_t R) { f.y[face] = law(L, R); });
  return f;
}

namespace kernels::reference {

void u_rate(const Grid& g, std::span<const double> u, std::span<const double> v, const ModelParams& p,
            bool upwind, std::span<double> out) {
  const FaceFluxes d = diffusive_flux_u(g, u, p);
  const FaceFluxes c = chemotactic_flux_u(g, u, v, p, upwind);
  const int nx = g.cells(0), ny = g.cells(1);
  const double h = g.spacing();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j;
      const std::size_t fw = static_cast<std::size_t>(i) + static_cast<std::size_t>(nx + 1) * j;
      double div = ((d.x[fw + 1] + c.x[fw + 1]) - (d.x[fw] + c.x[fw])) / h;
      if (g.dim() == 2) {
        const std::size_t fs = k, fn = k + static_cast<std::size_t>(nx);
        div += ((d.y[fn] + c.y[fn]) - (d.y[fs] + c.y[fs])) / h;
      }
      out[k] = -div + logistic_eval(positive_part(u[k]), p);
    }
  }
}

void laplacian(const Grid& g, std::span<const double> x, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  auto couple = [&](std::size_t, std::size_t L, std::size_t R) {
    const double diff = (x[R] - x[L]) * inv_h2;
    out[L] += diff;
    out[R] -= diff;
  };
  for_interior_x_faces(g, couple);
  for_interior_y_faces(g, couple);
}

void helmholtz_apply(const Grid& g, double dt, double decay, std::span<const double> x,
                     std::span<double> out) {
  laplacian(g, x, out);
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (1.0 + dt * decay) * x[k] - dt * out[k];
}

void helmholtz_diagonal(const Grid& g, double dt, double decay, std::span<double> out) {
  std::fill(out.begin(), out.end(), 1.0 + dt * decay);
  const double c = dt / (g.spacing() * g.spacing());
  auto couple = [&](std::size_t, std::size_t L, std::size_t R) {
    out[L] += c;
    out[R] += c;
  };
  for_interior_x_faces(g, couple);
  for_interior_y_faces(g, couple);
}

void exp_decay(std::span<const double> w, std::span<const double> z, double dt, std::span<double> out) {
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = w[k] * std::exp(-z[k] * dt);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double a : x) s += a;
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double max_value(std::span<const double> x) { return *std::max_element(x.begin(), x.end()); }
double min_value(std::span<const double> x) { return *std::min_element(x.begin(), x.end()); }

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double a : x) m = std::max(m, std::abs(a));
  return m;
}

double max_face_gradient(const Grid& g, std::span<const double> x) {
  double m = 0.0;
  const double h = g.spacing();
  auto visit = [&](std::size_t, std::size_t L, std::size_t R) { m = std::max(m, std::abs(x[R] - x[L]) / h); };
  for_interior_x_faces(g, visit);
  for_interior_y_faces(g, visit);
  return m;
}

}  // namespace kernels::reference
}  // namespace dcsim
