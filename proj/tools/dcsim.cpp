// dcsim: run, verify, sweep, fit and lattice subcommands.

#include <iostream>

#include "CLI11.hpp"
#include "dcsim/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Degenerate chemotaxis simulator"};
  app.require_subcommand(1);
  dcsim::CommandOptions opt;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config_path, "run configuration file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--seed", opt.seed, "random seed (overrides [run] seed)");
    sub->add_option("--workers", opt.workers, "parallel workers")->check(CLI::NonNegativeNumber);
    sub->add_option("--threshold-support", opt.threshold_support, "u level that counts as support");
  };

  auto* run = app.add_subcommand("run", "integrate the PDE system");
  add_common(run, true);
  run->add_option("--tol-mass", opt.tol_mass, "fail if the v+w mass drift exceeds this");
  run->add_option("--tol-steady", opt.tol_steady, "fail if the final steady residual exceeds this");

  auto* verify = app.add_subcommand("verify", "check a finished run against the comparison profiles");
  verify->add_option("--run", opt.run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  verify->add_option("--tol-sandwich", opt.tol_sandwich, "allowed profile violation (default 1e-8)");
  verify->add_option("--tol-mass", opt.tol_mass, "allowed relative v+w drift (default 1e-10)");
  verify->add_option("--tol-steady", opt.tol_steady, "fail if the final steady residual exceeds this");
  verify->add_option("--threshold-support", opt.threshold_support, "u level that counts as support");

  auto* sweep = app.add_subcommand("sweep", "run the [sweep] parameter grid");
  add_common(sweep, true);

  auto* fit = app.add_subcommand("fit", "fit a history column");
  fit->add_option("--csv", opt.csv_path, "history CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--column", opt.column, "column to fit")->required();
  fit->add_option("--model", opt.fit_model, "exp or power")->check(CLI::IsMember({"exp", "power"}));
  fit->add_option("--t-min", opt.t_min, "ignore samples before this time");
  fit->add_option("--drop-fraction", opt.drop_fraction, "ignore this leading fraction of samples")
      ->check(CLI::Range(0.0, 1.0));
  fit->add_option("--min-r2", opt.min_r2, "fail if r_squared is below this");

  auto* lattice = app.add_subcommand("lattice", "run a lattice ensemble and compare with the PDE");
  add_common(lattice, true);
  lattice->add_option("--tol-l1", opt.tol_l1, "fail if the L1 distance to the PDE exceeds this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dcsim::kExitUsage;
  }

  if (*run) return dcsim::cmd_run(opt, std::cout, std::cerr);
  if (*verify) return dcsim::cmd_verify(opt, std::cout, std::cerr);
  if (*sweep) return dcsim::cmd_sweep(opt, std::cout, std::cerr);
  if (*fit) return dcsim::cmd_fit(opt, std::cout, std::cerr);
  return dcsim::cmd_lattice(opt, std::cout, std::cerr);
}
