#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dcsim/diagnostics.hpp"
#include "dcsim/lattice.hpp"

namespace dcsim {

/// Header line then one row per sample; reals with 17 significant digits.
void write_history_csv(const FrontHistory& h, std::ostream& out);
void write_history_csv(const FrontHistory& h, const std::string& path);

/// Columns by header name. Throws std::runtime_error on ragged or
/// non-numeric rows.
std::map<std::string, std::vector<double>> read_csv_columns(std::istream& in);
std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path);

FrontHistory read_history_csv(const std::string& path);

/// seed,time,bin,density for every ensemble member.
void write_lattice_csv(const LatticeEnsemble& e, std::uint64_t seed_base, double t, std::ostream& out);

std::string format_real(double x);

}  // namespace dcsim
