#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "dcsim/grid.hpp"
#include "dcsim/model.hpp"

namespace dcsim {

enum class LatticeKernel { volume_filling, pushing, quorum_pushing };

/// 1D random walk of particles on `sites` sites of spacing length/sites.
/// Per-particle jump rates are (k/h^2) * T, with T built from q(u~) where
/// u~ = occupancy/u_max. v and z are prescribed, never evolved.
struct LatticeState {
  int sites = 0;
  std::vector<std::int64_t> occupancy;
  std::int64_t u_max = 1;
  std::vector<double> v;
  std::vector<double> z;
  double alpha = 1.0;
  /// beta(z) for quorum_pushing; must be constant for the other kernels.
  Sensitivity beta_sens = Sensitivity::constant(0.0);
  std::function<double(double)> tau_of_v = [](double x) { return x; };
  LatticeKernel kernel = LatticeKernel::pushing;
  double m = 2.0;
  double k = 1.0;
  double length = 1.0;
  double t = 0.0;
  std::uint64_t rng_seed = 0;
  std::mt19937_64 rng{0};
  /// Site-steps that ended above the soft cap 4*u_max.
  std::uint64_t overflow_count = 0;

  /// Empty lattice with flat zero signals.
  static LatticeState make(int sites, std::int64_t u_max, std::uint64_t seed);

  double spacing() const { return length / sites; }
  double relative(int i) const { return static_cast<double>(occupancy[static_cast<std::size_t>(i)]) / static_cast<double>(u_max); }
  std::int64_t overflow_cap() const { return 4 * u_max; }
  std::int64_t total() const;
  void reseed(std::uint64_t seed);
  /// Throws std::invalid_argument on inconsistent sizes or parameters.
  void validate() const;
};

/// (rate_left, rate_right) per particle at site i; the outward rate at a
/// boundary site is 0 and negative brackets are clamped to 0.
std::pair<double, double> transition_rates(const LatticeState& s, int i);

double max_rate(const LatticeState& s);

/// One tau-leap of length dt. Per site, the left and right jump counts are a
/// multinomial draw from the current occupancy; moves are committed after
/// all draws. Throws std::invalid_argument if dt * max_rate > 0.1.
LatticeState step_tau_leap(const LatticeState& s, double dt);
void advance_tau_leap(LatticeState& s, double dt);

/// Advances to time t_end with dt = leap / max_rate, clamped to the end time.
void run_lattice(LatticeState& s, double t_end, double leap = 0.1);

/// Relative density averaged over bins of `cells_per_bin` sites.
Field coarse_density(const LatticeState& s, int cells_per_bin);

struct LatticeEnsemble {
  std::vector<Field> members;  ///< one coarse density per seed
  Field mean;
  Field stderr_of_mean;
  std::uint64_t overflow_count = 0;
};

/// Runs one copy of `initial` per seed (seed_base, seed_base+1, ...) in
/// parallel and bins the results. workers <= 0 uses the OpenMP default.
LatticeEnsemble run_ensemble(const LatticeState& initial, int seeds, std::uint64_t seed_base, double t_end,
                             int cells_per_bin, int workers = 0);

}  // namespace dcsim
