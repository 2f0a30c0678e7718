// Reference vs OpenMP kernels on a 2D grid.
//   bench_kernels [cells_per_axis=512] [repeats=20]

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "dcsim/kernels.hpp"
#include "dcsim/linear_solver.hpp"
#include "dcsim/solver.hpp"

using namespace dcsim;

namespace {

double time_ms(int repeats, const std::function<void()>& f) {
  f();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 512;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 20;
  const Grid g(2, n, 16.0);
  const std::size_t N = g.size();

  StateQuad s(g);
  for (std::size_t k = 0; k < N; ++k) {
    const Coord x = g.cell_center(k);
    const double d2 = (x[0] - 8) * (x[0] - 8) + (x[1] - 8) * (x[1] - 8);
    s.u[k] = std::max(0.0, 0.5 * (1.0 - d2 / 16.0));
    s.v[k] = 0.1 * std::sin(x[0]) * std::cos(x[1]) + 0.2;
    s.w[k] = 1.0;
    s.z[k] = 0.05 * std::exp(-d2);
  }
  ModelParams p;
  p.phi = Sensitivity::linear_switch(1.0);
  std::vector<double> out(N), x(N);

  std::printf("grid %dx%d (%zu cells), %d threads, %d repeats\n", n, n, N, omp_get_max_threads(), repeats);
  std::printf("%-18s %12s %12s %8s\n", "kernel", "reference ms", "openmp ms", "speedup");

  struct Case {
    const char* name;
    std::function<void(Backend)> body;
  };
  std::vector<Case> cases = {
      {"u_rate", [&](Backend b) { kernels::u_rate(b, g, s.u.span(), s.v.span(), p, true, out); }},
      {"laplacian", [&](Backend b) { kernels::laplacian(b, g, s.v.span(), out); }},
      {"helmholtz_apply", [&](Backend b) { kernels::helmholtz_apply(b, g, 0.01, 1.0, s.v.span(), out); }},
      {"dot", [&](Backend b) { volatile double d = kernels::dot(b, s.u.span(), s.v.span()); (void)d; }},
      {"helmholtz_solve",
       [&](Backend b) {
         x = s.z.values;
         solve_helmholtz(b, g, 0.01, 1.0, s.v.span(), x);
       }},
      {"full_step",
       [&](Backend b) {
         SolverConfig c;
         c.backend = b;
         volatile double t = step(s, p, c).first.t;
         (void)t;
       }},
  };
  for (const Case& c : cases) {
    const double ref = time_ms(repeats, [&] { c.body(Backend::reference); });
    const double par = time_ms(repeats, [&] { c.body(Backend::openmp); });
    std::printf("%-18s %12.3f %12.3f %8.2f\n", c.name, ref, par, ref / par);
  }
}
