#include "dcsim/lattice.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dcsim {

LatticeState LatticeState::make(int sites, std::int64_t u_max, std::uint64_t seed) {
  LatticeState s;
  s.sites = sites;
  s.u_max = u_max;
  s.occupancy.assign(static_cast<std::size_t>(std::max(sites, 0)), 0);
  s.v.assign(s.occupancy.size(), 0.0);
  s.z.assign(s.occupancy.size(), 0.0);
  s.reseed(seed);
  s.validate();
  return s;
}

std::int64_t LatticeState::total() const {
  return std::accumulate(occupancy.begin(), occupancy.end(), std::int64_t{0});
}

void LatticeState::reseed(std::uint64_t seed) {
  rng_seed = seed;
  rng.seed(seed);
}

void LatticeState::validate() const {
  const auto n = static_cast<std::size_t>(sites);
  if (sites < 2) throw std::invalid_argument("lattice needs at least 2 sites");
  if (occupancy.size() != n || v.size() != n || z.size() != n)
    throw std::invalid_argument("lattice arrays must have one entry per site");
  if (u_max < 1) throw std::invalid_argument("u_max must be a positive integer");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(m > 1.0)) throw std::invalid_argument("m must exceed 1");
  if (!(k > 0.0) || !(length > 0.0)) throw std::invalid_argument("k and length must be positive");
  if (!tau_of_v) throw std::invalid_argument("tau_of_v must be set");
  if (kernel != LatticeKernel::quorum_pushing && beta_sens.kind() != Sensitivity::Kind::constant)
    throw std::invalid_argument("only quorum_pushing accepts a z-dependent beta");
  for (std::int64_t c : occupancy)
    if (c < 0) throw std::invalid_argument("occupancy must be nonnegative");
}

std::pair<double, double> transition_rates(const LatticeState& s, int i) {
  if (i < 0 || i >= s.sites) throw std::out_of_range("transition_rates: site index out of range");
  const double scale = s.k / (s.spacing() * s.spacing());
  const double tau_i = s.tau_of_v(s.v[static_cast<std::size_t>(i)]);
  const double beta = s.kernel == LatticeKernel::quorum_pushing ? s.beta_sens(s.z[static_cast<std::size_t>(i)])
                                                                 : s.beta_sens(0.0);
  auto rate_to = [&](int j) {
    const double q = q_eval(s.kernel == LatticeKernel::volume_filling ? s.relative(j) : s.relative(i), s.m);
    const double bracket = s.alpha + beta * (s.tau_of_v(s.v[static_cast<std::size_t>(j)]) - tau_i);
    return scale * q * std::max(bracket, 0.0);
  };
  const double left = i > 0 ? rate_to(i - 1) : 0.0;
  const double right = i < s.sites - 1 ? rate_to(i + 1) : 0.0;
  return {left, right};
}

namespace {

void compute_rates(const LatticeState& s, std::vector<double>& left, std::vector<double>& right) {
  const int n = s.sites;
  left.resize(static_cast<std::size_t>(n));
  right.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (n >= 4096)
  for (int i = 0; i < n; ++i) {
    const auto [l, r] = transition_rates(s, i);
    left[static_cast<std::size_t>(i)] = l;
    right[static_cast<std::size_t>(i)] = r;
  }
}

double max_of(const std::vector<double>& left, const std::vector<double>& right) {
  double mx = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i) mx = std::max({mx, left[i], right[i]});
  return mx;
}

void leap(LatticeState& s, double dt, const std::vector<double>& left, const std::vector<double>& right) {
  const auto n = static_cast<std::size_t>(s.sites);
  std::vector<std::int64_t> delta(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t count = s.occupancy[i];
    if (count == 0) continue;
    const double pl = left[i] * dt;
    const double pr = right[i] * dt;
    std::int64_t to_left = 0, to_right = 0;
    if (pl > 0.0) to_left = std::binomial_distribution<std::int64_t>(count, pl)(s.rng);
    if (pr > 0.0 && count > to_left)
      to_right = std::binomial_distribution<std::int64_t>(count - to_left, std::min(1.0, pr / (1.0 - pl)))(s.rng);
    delta[i] -= to_left + to_right;
    if (to_left) delta[i - 1] += to_left;
    if (to_right) delta[i + 1] += to_right;
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.occupancy[i] += delta[i];
    if (s.occupancy[i] > s.overflow_cap()) ++s.overflow_count;
  }
  s.t += dt;
}

void check_leap(double dt, double mx) {
  if (dt * mx > 0.1) {
    std::ostringstream os;
    os << "leap condition violated: dt * max_rate = " << dt * mx << " > 0.1; use dt <= " << 0.1 / mx;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

double max_rate(const LatticeState& s) {
  std::vector<double> left, right;
  compute_rates(s, left, right);
  return max_of(left, right);
}

void advance_tau_leap(LatticeState& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_tau_leap: dt must be positive");
  std::vector<double> left, right;
  compute_rates(s, left, right);
  check_leap(dt, max_of(left, right));
  leap(s, dt, left, right);
}

LatticeState step_tau_leap(const LatticeState& s, double dt) {
  LatticeState next = s;
  advance_tau_leap(next, dt);
  return next;
}

void run_lattice(LatticeState& s, double t_end, double leap_fraction) {
  if (!(leap_fraction > 0.0 && leap_fraction <= 0.1)) throw std::invalid_argument("leap fraction must lie in (0, 0.1]");
  s.validate();
  std::vector<double> left, right;
  while (s.t < t_end) {
    compute_rates(s, left, right);
    const double mx = max_of(left, right);
    const double remaining = t_end - s.t;
    if (mx == 0.0) {  // frozen lattice
      s.t = t_end;
      break;
    }
    const double dt = std::min(leap_fraction / mx, remaining);
    leap(s, dt, left, right);
    if (dt == remaining) s.t = t_end;
  }
}

Field coarse_density(const LatticeState& s, int cells_per_bin) {
  if (cells_per_bin < 1 || s.sites % cells_per_bin != 0)
    throw std::invalid_argument("coarse_density: sites must be divisible by cells_per_bin");
  const int bins = s.sites / cells_per_bin;
  Field f(Grid(1, bins, s.length));
  for (int b = 0; b < bins; ++b) {
    std::int64_t acc = 0;
    for (int c = 0; c < cells_per_bin; ++c) acc += s.occupancy[static_cast<std::size_t>(b * cells_per_bin + c)];
    f[static_cast<std::size_t>(b)] = static_cast<double>(acc) / (static_cast<double>(s.u_max) * cells_per_bin);
  }
  return f;
}

LatticeEnsemble run_ensemble(const LatticeState& initial, int seeds, std::uint64_t seed_base, double t_end,
                             int cells_per_bin, int workers) {
  if (seeds < 1) throw std::invalid_argument("ensemble needs at least one seed");
  initial.validate();
  coarse_density(initial, cells_per_bin);  // divisibility check before spawning work

  LatticeEnsemble out;
  out.members.resize(static_cast<std::size_t>(seeds));
  std::vector<std::uint64_t> overflow(static_cast<std::size_t>(seeds), 0);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int k = 0; k < seeds; ++k) {
    LatticeState s = initial;
    s.reseed(seed_base + static_cast<std::uint64_t>(k));
    run_lattice(s, t_end);
    out.members[static_cast<std::size_t>(k)] = coarse_density(s, cells_per_bin);
    overflow[static_cast<std::size_t>(k)] = s.overflow_count;
  }

  out.mean = out.members.front();
  out.stderr_of_mean = out.members.front();
  const std::size_t bins = out.mean.size();
  for (std::size_t b = 0; b < bins; ++b) {
    double mean = 0.0;
    for (const Field& f : out.members) mean += f[b];
    mean /= seeds;
    double var = 0.0;
    for (const Field& f : out.members) var += (f[b] - mean) * (f[b] - mean);
    out.mean[b] = mean;
    out.stderr_of_mean[b] = seeds > 1 ? std::sqrt(var / (seeds - 1) / seeds) : 0.0;
  }
  for (std::uint64_t o : overflow) out.overflow_count += o;
  return out;
}

}  // namespace dcsim
