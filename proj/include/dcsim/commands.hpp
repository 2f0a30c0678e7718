#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace dcsim {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitViolation = 3 };

/// Flags shared by the subcommands; each reads only what it needs.
struct CommandOptions {
  std::string config_path;
  std::string out_dir;  ///< overrides [output] dir when non-empty
  std::optional<std::uint64_t> seed;
  int workers = 0;
  std::optional<double> tol_sandwich;
  std::optional<double> tol_mass;
  std::optional<double> tol_steady;
  std::optional<double> tol_l1;
  std::optional<double> threshold_support;

  std::string run_dir;  ///< verify: a completed run directory

  std::string csv_path;  ///< fit
  std::string column;
  std::string fit_model = "exp";  ///< "exp" or "power"
  std::optional<double> t_min;
  double drop_fraction = 0.2;  ///< leading transient ignored when t_min is unset
  std::optional<double> min_r2;
};

/// Run layout: <out>/config.cfg, history.csv, final.bin, snapshots/snap_NNNNNN.bin.
int cmd_run(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_fit(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_lattice(const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace dcsim
