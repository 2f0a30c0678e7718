// OpenMP kernels. Each pass is a parallel-for over cells; face values are
// recomputed by both adjacent cells from the same inputs, so the update stays
// conservative without a separate face array. Reductions sum fixed-size
// blocks and combine the partials in block order, which keeps results
// independent of the thread count.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dcsim/kernels.hpp"
#include "kernels_impl.hpp"

namespace dcsim::kernels::omp {

namespace {

constexpr std::ptrdiff_t kParallelMin = 4096;
constexpr std::size_t kBlock = 4096;

double transformed(double u, double m, double eps) {
  u = positive_part(u);
  if (eps == 0.0) return u == 0.0 ? 0.0 : std::pow(u, m);
  return std::pow(u + eps, m) - std::pow(eps, m);
}

double power_m(double u, double m) {
  u = positive_part(u);
  return u == 0.0 ? 0.0 : std::pow(u, m);
}

template <class BlockFn>
double blocked_sum(std::size_t n, BlockFn block_sum) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nb, 0.0);
  const auto nbs = static_cast<std::ptrdiff_t>(nb);
#pragma omp parallel for schedule(static) if (nbs > 1)
  for (std::ptrdiff_t b = 0; b < nbs; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    partial[static_cast<std::size_t>(b)] = block_sum(lo, std::min(n, lo + kBlock));
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace

void u_rate(const Grid& g, std::span<const double> u, std::span<const double> v, const ModelParams& p,
            bool upwind, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  std::vector<double> P(u.size()), Um(u.size());
  double* Pw = P.data();
  double* Uw = Um.data();
  const double m = p.m, eps = p.eps_reg;
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    Pw[k] = transformed(u[k], m, eps);
    Uw[k] = eps == 0.0 ? Pw[k] : power_m(u[k], m);
  }

  const int nx = g.cells(0), ny = g.cells(1);
  const bool two_d = g.dim() == 2;
  const double h = g.spacing();
  const Sensitivity& phi = p.phi;
  const double* Pd = P.data();
  const double* Ud = Um.data();

  // Total flux through the face from cell L to cell R.
  auto face = [&](std::size_t L, std::size_t R) {
    const double diff = -(Pd[R] - Pd[L]) / h;
    const double a = phi(0.5 * (u[L] + u[R])) * (v[R] - v[L]) / h;
    double chemo = 0.0;
    if (a != 0.0) {
      const double carried = upwind ? (a > 0.0 ? Ud[L] : Ud[R]) : 0.5 * (Ud[L] + Ud[R]);
      chemo = a * carried;
    }
    return diff + chemo;
  };

#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const int i = static_cast<int>(k % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(k / static_cast<std::size_t>(nx));
    const double east = i + 1 < nx ? face(k, k + 1) : 0.0;
    const double west = i > 0 ? face(k - 1, k) : 0.0;
    double div = (east - west) / h;
    if (two_d) {
      const auto sx = static_cast<std::size_t>(nx);
      const double north = j + 1 < ny ? face(k, k + sx) : 0.0;
      const double south = j > 0 ? face(k - sx, k) : 0.0;
      div += (north - south) / h;
    }
    const double uk = positive_part(u[k]);
    const double react = uk == 0.0 ? 0.0 : p.mu * std::pow(uk, p.delta) * (1.0 - p.r * uk);
    out[k] = -div + react;
  }
}

void laplacian(const Grid& g, std::span<const double> x, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const int nx = g.cells(0), ny = g.cells(1);
  const bool two_d = g.dim() == 2;
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const auto sx = static_cast<std::size_t>(nx);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const int i = static_cast<int>(k % sx);
    const int j = static_cast<int>(k / sx);
    double acc = 0.0;
    if (i > 0) acc -= (x[k] - x[k - 1]) * inv_h2;
    if (i + 1 < nx) acc += (x[k + 1] - x[k]) * inv_h2;
    if (two_d) {
      if (j > 0) acc -= (x[k] - x[k - sx]) * inv_h2;
      if (j + 1 < ny) acc += (x[k + sx] - x[k]) * inv_h2;
    }
    out[k] = acc;
  }
}

void helmholtz_apply(const Grid& g, double dt, double decay, std::span<const double> x,
                     std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const int nx = g.cells(0), ny = g.cells(1);
  const bool two_d = g.dim() == 2;
  const double c = dt / (g.spacing() * g.spacing());
  const double self = 1.0 + dt * decay;
  const auto sx = static_cast<std::size_t>(nx);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const int i = static_cast<int>(k % sx);
    const int j = static_cast<int>(k / sx);
    double acc = self * x[k];
    if (i > 0) acc += c * (x[k] - x[k - 1]);
    if (i + 1 < nx) acc -= c * (x[k + 1] - x[k]);
    if (two_d) {
      if (j > 0) acc += c * (x[k] - x[k - sx]);
      if (j + 1 < ny) acc -= c * (x[k + sx] - x[k]);
    }
    out[k] = acc;
  }
}

void helmholtz_diagonal(const Grid& g, double dt, double decay, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const int nx = g.cells(0), ny = g.cells(1);
  const bool two_d = g.dim() == 2;
  const double c = dt / (g.spacing() * g.spacing());
  const auto sx = static_cast<std::size_t>(nx);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const int i = static_cast<int>(k % sx);
    const int j = static_cast<int>(k / sx);
    int neighbours = (i > 0) + (i + 1 < nx);
    if (two_d) neighbours += (j > 0) + (j + 1 < ny);
    out[k] = 1.0 + dt * decay + c * neighbours;
  }
}

void exp_decay(std::span<const double> w, std::span<const double> z, double dt, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(w.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = w[k] * std::exp(-z[k] * dt);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

double sum(std::span<const double> x) {
  return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += x[k];
    return s;
  });
}

double dot(std::span<const double> x, std::span<const double> y) {
  return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += x[k] * y[k];
    return s;
  });
}

double max_value(std::span<const double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  double m = x.empty() ? 0.0 : x[0];
#pragma omp parallel for schedule(static) reduction(max : m) if (n >= kParallelMin)
  for (std::ptrdiff_t k = 0; k < n; ++k) m = std::max(m, x[k]);
  return m;
}

double min_value(std::span<const double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  double m = x.empty() ? 0.0 : x[0];
#pragma omp parallel for schedule(static) reduction(min : m) if (n >= kParallelMin)
  for (std::ptrdiff_t k = 0; k < n; ++k) m = std::min(m, x[k]);
  return m;
}

double max_abs(std::span<const double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m) if (n >= kParallelMin)
  for (std::ptrdiff_t k = 0; k < n; ++k) m = std::max(m, std::abs(x[k]));
  return m;
}

double max_face_gradient(const Grid& g, std::span<const double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const int nx = g.cells(0), ny = g.cells(1);
  const bool two_d = g.dim() == 2;
  const auto sx = static_cast<std::size_t>(nx);
  const double h = g.spacing();
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m) if (n >= kParallelMin)
  for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const int i = static_cast<int>(k % sx);
    const int j = static_cast<int>(k / sx);
    if (i + 1 < nx) m = std::max(m, std::abs(x[k + 1] - x[k]) / h);
    if (two_d && j + 1 < ny) m = std::max(m, std::abs(x[k + sx] - x[k]) / h);
  }
  return m;
}

}  // namespace dcsim::kernels::omp
