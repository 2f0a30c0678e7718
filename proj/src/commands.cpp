#include "dcsim/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "dcsim/config.hpp"
#include "dcsim/csv.hpp"
#include "dcsim/diagnostics.hpp"
#include "dcsim/errors.hpp"
#include "dcsim/lattice.hpp"
#include "dcsim/snapshot.hpp"
#include "dcsim/solver.hpp"

namespace fs = std::filesystem;

namespace dcsim {

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

RunConfig effective_config(const CommandOptions& opt) {
  if (opt.config_path.empty()) throw std::invalid_argument("--config is required");
  RunConfig cfg = load_config(opt.config_path);
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threshold_support) cfg.solver.support_threshold = *opt.threshold_support;
  cfg.validate();
  return cfg;
}

std::string snapshot_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.bin", step);
  return buf;
}

class SnapshotWriter : public RunSink {
 public:
  explicit SnapshotWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  void on_snapshot(const StateQuad& s, std::size_t step) override {
    write_snapshot(s, (dir_ / snapshot_name(step)).string());
  }

 private:
  fs::path dir_;
};

double final_residual(const HistoryRow& r) {
  return std::max({r.norm_u_minus_1, r.norm_w, r.norm_v_minus_target, r.norm_z_minus_1});
}

struct RunOutcome {
  RunResult result;
  ConservationAudit audit;
};

RunOutcome execute_run(const RunConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream c(dir / "config.cfg");
    c << serialize_config(cfg);
  }
  const StateQuad initial = build_initial_state(cfg);
  std::vector<RunSink*> sinks;
  std::optional<SnapshotWriter> snaps;
  if (cfg.write_snapshots) {
    fs::remove_all(dir / "snapshots");
    snaps.emplace(dir / "snapshots");
    sinks.push_back(&*snaps);
  }
  RunOutcome o{run(initial, cfg.model, cfg.solver, sinks), {}};
  write_history_csv(o.result.history, (dir / "history.csv").string());
  write_snapshot(o.result.final_state, (dir / "final.bin").string());
  if (!o.result.history.rows.empty()) o.audit = conservation_audit(o.result.history);
  return o;
}

std::vector<StateQuad> load_snapshots(const fs::path& dir, const Grid& grid) {
  std::vector<fs::path> files;
  if (fs::exists(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".bin") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<StateQuad> out;
  for (const auto& f : files) {
    StateQuad s = read_snapshot(f.string());
    if (s.grid().size() != grid.size() || s.grid().spacing() != grid.spacing())
      throw SnapshotError(f.string() + " does not match the run grid");
    for (Field* fld : {&s.u, &s.v, &s.w, &s.z}) fld->grid = grid;  // snapshots carry no origin
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

int cmd_run(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = effective_config(opt);
    const RunOutcome o = execute_run(cfg);
    const RunResult& r = o.result;
    out << "steps = " << r.steps << "\n"
        << "t = " << format_real(r.final_state.t) << "\n"
        << "max_u = " << format_real(r.max_u) << "\n"
        << "min_field = " << format_real(r.min_field_value) << "\n"
        << "clipped_mass = " << format_real(r.clipped_total) << "\n"
        << "mass_drift = " << format_real(o.audit.drift) << "\n";
    int code = kExitOk;
    if (!r.history.rows.empty()) {
      const double res = final_residual(r.history.rows.back());
      out << "final_residual = " << format_real(res) << "\n";
      if (opt.tol_steady && !(res <= *opt.tol_steady)) {
        err << "steady residual " << res << " exceeds " << *opt.tol_steady << '\n';
        code = kExitViolation;
      }
    }
    if (opt.tol_mass && !(o.audit.drift <= *opt.tol_mass)) {
      err << "mass drift " << o.audit.drift << " exceeds " << *opt.tol_mass << '\n';
      code = kExitViolation;
    }
    return code;
  });
}

int cmd_verify(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path dir(opt.run_dir.empty() ? opt.out_dir : opt.run_dir);
    if (dir.empty()) throw std::invalid_argument("verify needs --run DIR");
    RunConfig cfg = load_config((dir / "config.cfg").string());
    if (opt.threshold_support) cfg.solver.support_threshold = *opt.threshold_support;
    const StateQuad initial = build_initial_state(cfg);
    const std::vector<StateQuad> snaps = load_snapshots(dir / "snapshots", initial.grid());
    const FrontHistory history = read_history_csv((dir / "history.csv").string());
    const double tol_sandwich = opt.tol_sandwich.value_or(1e-8);
    const double tol_mass = opt.tol_mass.value_or(1e-10);

    std::ostringstream rep;
    int code = kExitOk;
    if (cfg.oracles.conservation) {
      const ConservationAudit a = conservation_audit(history);
      const bool ok = a.drift <= tol_mass;
      rep << "conservation_drift = " << format_real(a.drift) << (a.absolute ? " (absolute)" : "") << "\n"
          << "conservation = " << (ok ? "PASS" : "FAIL") << "\n";
      if (!ok) code = kExitViolation;
    }
    if (cfg.oracles.sandwich) {
      if (snaps.empty()) throw InsufficientData("no snapshots in " + (dir / "snapshots").string());
      cfg.model.validate_theorem_mode();
      const Coord x0 = cfg.solver.front_center.value_or(centroid(initial.u));
      const SignalBounds bounds = observed_signal_bounds(snaps, cfg.solver.backend);
      const SandwichProfiles prof = build_sandwich_profiles(initial, cfg.model, x0, bounds, cfg.oracles.margin);
      const SandwichReport s = sandwich_check(snaps, prof.lower, prof.upper, tol_sandwich);
      rep << "C1 = " << format_real(prof.bounds.C1) << "\n"
          << "C2 = " << format_real(prof.bounds.C2) << "\n"
          << "lower_eps = " << format_real(prof.lower.eps) << "\n"
          << "lower_beta = " << format_real(prof.lower.beta) << "\n"
          << "upper_tau = " << format_real(prof.upper.params.tau) << "\n"
          << "upper_t0 = " << format_real(prof.upper.t0) << "\n"
          << "max_lower_violation = " << format_real(s.max_lower_violation) << "\n"
          << "max_upper_violation = " << format_real(s.max_upper_violation) << "\n"
          << "violations = " << s.violation_count << "\n";
      for (std::size_t k = 0; k < std::min<std::size_t>(s.violation_locations.size(), 5); ++k) {
        const ViolationSite& v = s.violation_locations[k];
        rep << "  " << (v.lower ? "lower" : "upper") << " violation at x = " << format_real(v.x[0])
            << ", t = " << format_real(v.t) << ": " << format_real(v.amount) << "\n";
      }
      rep << "sandwich = " << (s.violation_count == 0 ? "PASS" : "FAIL") << "\n";
      if (s.violation_count) code = kExitViolation;
    }
    if (cfg.oracles.steady && !history.rows.empty()) {
      const HistoryRow& last = history.rows.back();
      rep << "residual_u = " << format_real(last.norm_u_minus_1) << "\n"
          << "residual_w = " << format_real(last.norm_w) << "\n"
          << "residual_v = " << format_real(last.norm_v_minus_target) << "\n"
          << "residual_z = " << format_real(last.norm_z_minus_1) << "\n";
      if (opt.tol_steady && !(final_residual(last) <= *opt.tol_steady)) {
        rep << "steady = FAIL\n";
        code = kExitViolation;
      }
    }
    out << rep.str();
    std::ofstream(dir / "verify.txt") << rep.str();
    return code;
  });
}

int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig base = effective_config(opt);
    if (base.sweep.empty()) throw std::invalid_argument("config has no [sweep] section");

    std::vector<std::vector<std::string>> points{{}};
    for (const SweepAxis& axis : base.sweep) {
      std::vector<std::vector<std::string>> next;
      for (const auto& p : points)
        for (const auto& v : axis.values) {
          next.push_back(p);
          next.back().push_back(v);
        }
      points = std::move(next);
    }

    const fs::path root(base.output_dir);
    fs::create_directories(root);
    const int n = static_cast<int>(points.size());
    std::vector<int> codes(points.size(), kExitOk);
    std::vector<std::string> messages(points.size());
    std::vector<HistoryRow> finals(points.size());
    const int threads = opt.workers > 0 ? opt.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int k = 0; k < n; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      try {
        RunConfig cfg = base;
        cfg.sweep.clear();
        for (std::size_t a = 0; a < base.sweep.size(); ++a) apply_setting(cfg, base.sweep[a].key, points[idx][a]);
        char name[32];
        std::snprintf(name, sizeof name, "point_%03d", k);
        cfg.output_dir = (root / name).string();
        cfg.validate();
        const RunOutcome o = execute_run(cfg);
        if (!o.result.history.rows.empty()) finals[idx] = o.result.history.rows.back();
        messages[idx] = "ok";
      } catch (const NumericalError& e) {
        codes[idx] = kExitNumerical;
        messages[idx] = e.what();
      } catch (const std::exception& e) {
        codes[idx] = kExitUsage;
        messages[idx] = e.what();
      }
    }

    auto quoted = [](const std::string& s) {
      return s.find_first_of(",\"") == std::string::npos ? s : "\"" + s + "\"";
    };
    std::ofstream index(root / "sweep.csv");
    index << "point";
    for (const SweepAxis& a : base.sweep) index << ',' << a.key;
    index << ",status,t,sup_u,support_radius\n";
    int code = kExitOk;
    for (std::size_t k = 0; k < points.size(); ++k) {
      index << k;
      for (const auto& v : points[k]) index << ',' << quoted(v);
      index << ',' << (codes[k] == kExitOk ? "ok" : "failed") << ',' << format_real(finals[k].t) << ','
            << format_real(finals[k].sup_u) << ',' << format_real(finals[k].support_radius) << '\n';
      if (codes[k] != kExitOk) {
        err << "point " << k << ": " << messages[k] << '\n';
        code = std::max(code, codes[k]);
      }
    }
    out << "points = " << points.size() << "\n";
    return code;
  });
}

int cmd_fit(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.csv_path.empty() || opt.column.empty()) throw std::invalid_argument("fit needs --csv and --column");
    const auto cols = read_csv_columns(opt.csv_path);
    if (!cols.count("t")) throw std::invalid_argument("csv has no 't' column");
    if (!cols.count(opt.column)) throw std::invalid_argument("csv has no '" + opt.column + "' column");
    const auto& t = cols.at("t");
    const auto& y = cols.at(opt.column);
    const double t_min = opt.t_min.value_or(leading_fraction_cutoff(t, opt.drop_fraction));
    double r2 = 0.0;
    if (opt.fit_model == "exp") {
      const ExponentialFit f = fit_exponential(t, y, t_min);
      out << "rate = " << format_real(f.rate) << "\n"
          << "prefactor = " << format_real(f.prefactor) << "\n"
          << "rate_stderr = " << format_real(f.rate_stderr) << "\n"
          << "r_squared = " << format_real(f.r_squared) << "\n"
          << "samples = " << f.samples << "\n"
          << "excluded_nonpositive = " << f.excluded_nonpositive << "\n";
      r2 = f.r_squared;
    } else if (opt.fit_model == "power") {
      const PowerLawFit f = fit_power_law(t, y, t_min);
      out << "exponent = " << format_real(f.exponent) << "\n"
          << "prefactor = " << format_real(f.prefactor) << "\n"
          << "exponent_stderr = " << format_real(f.exponent_stderr) << "\n"
          << "r_squared = " << format_real(f.r_squared) << "\n"
          << "samples = " << f.samples << "\n";
      r2 = f.r_squared;
    } else {
      throw std::invalid_argument("--model must be exp or power");
    }
    if (opt.min_r2 && !(r2 >= *opt.min_r2)) {
      err << "r_squared " << r2 << " below " << *opt.min_r2 << '\n';
      return static_cast<int>(kExitViolation);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_lattice(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = effective_config(opt);
    if (!cfg.lattice) throw std::invalid_argument("config has no [lattice] section");
    const LatticeSpec& spec = *cfg.lattice;
    const LatticeState initial = spec.make(cfg.model.m, cfg.seed);
    const LatticeEnsemble ens =
        run_ensemble(initial, spec.seeds, cfg.seed, spec.end_time, spec.cells_per_bin, opt.workers);

    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    {
      std::ofstream csv(dir / "lattice.csv");
      write_lattice_csv(ens, cfg.seed, spec.end_time, csv);
    }
    out << "seeds = " << spec.seeds << "\n"
        << "overflow_count = " << ens.overflow_count << "\n";

    // The flat-signal pushing walk has the semi-discrete limit u_t = k alpha (u^m)_xx.
    const bool comparable = spec.kernel == LatticeKernel::pushing && spec.beta == 0.0;
    std::optional<Field> pde;
    if (comparable) {
      ModelParams p;
      p.m = cfg.model.m;
      p.mu = 0.0;
      p.phi = Sensitivity::constant(0.0);
      StateQuad s(Grid(1, spec.sites, spec.length));
      for (int i = 0; i < spec.sites; ++i) s.u[static_cast<std::size_t>(i)] = initial.relative(i);
      SolverConfig sc = cfg.solver;
      sc.end_time = spec.k * spec.alpha * spec.end_time;
      sc.output_stride = std::numeric_limits<std::size_t>::max();
      const StateQuad fin = run(s, p, sc).final_state;
      pde.emplace(ens.mean.grid);
      for (std::size_t b = 0; b < pde->size(); ++b) {
        double acc = 0.0;
        for (int c = 0; c < spec.cells_per_bin; ++c) acc += fin.u[b * static_cast<std::size_t>(spec.cells_per_bin) + static_cast<std::size_t>(c)];
        (*pde)[b] = acc / spec.cells_per_bin;
      }
    }

    std::ofstream mean(dir / "lattice_mean.csv");
    mean << "bin,x,mean,stderr" << (pde ? ",pde" : "") << "\n";
    double l1 = 0.0;
    for (std::size_t b = 0; b < ens.mean.size(); ++b) {
      mean << b << ',' << format_real(ens.mean.grid.center(0, static_cast<int>(b))) << ',' << format_real(ens.mean[b])
           << ',' << format_real(ens.stderr_of_mean[b]);
      if (pde) {
        mean << ',' << format_real((*pde)[b]);
        l1 += std::abs(ens.mean[b] - (*pde)[b]) * ens.mean.grid.spacing();
      }
      mean << '\n';
    }
    if (!pde) {
      out << "pde_comparison = skipped (needs the pushing kernel with beta = 0)\n";
      return static_cast<int>(kExitOk);
    }
    out << "l1_distance = " << format_real(l1) << "\n";
    if (opt.tol_l1 && !(l1 <= *opt.tol_l1)) {
      err << "L1 distance " << l1 << " exceeds " << *opt.tol_l1 << '\n';
      return static_cast<int>(kExitViolation);
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace dcsim
