#include "dcsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dcsim {

std::string format_real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void write_history_csv(const FrontHistory& h, std::ostream& out) {
  const auto& names = FrontHistory::column_names();
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  std::vector<double HistoryRow::*> members;
  for (const auto& n : names) members.push_back(FrontHistory::member(n));
  for (const HistoryRow& row : h.rows) {
    for (std::size_t c = 0; c < members.size(); ++c) out << (c ? "," : "") << format_real(row.*members[c]);
    out << '\n';
  }
}

void write_history_csv(const FrontHistory& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_history_csv(h, out);
}

std::map<std::string, std::vector<double>> read_csv_columns(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  std::vector<std::string> names;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) names.push_back(cell);
  }
  std::map<std::string, std::vector<double>> cols;
  for (const auto& n : names) cols[n];
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(rs, cell, ',')) {
      if (c >= names.size()) throw std::runtime_error("csv row " + std::to_string(row) + ": too many cells");
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw std::runtime_error("csv row " + std::to_string(row) + ": '" + cell + "' is not a number");
      cols[names[c++]].push_back(x);
    }
    if (c != names.size()) throw std::runtime_error("csv row " + std::to_string(row) + ": too few cells");
  }
  return cols;
}

std::map<std::string, std::vector<double>> read_csv_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv_columns(in);
}

FrontHistory read_history_csv(const std::string& path) {
  const auto cols = read_csv_columns(path);
  FrontHistory h;
  const auto& names = FrontHistory::column_names();
  for (const auto& n : names)
    if (!cols.count(n)) throw std::runtime_error("history csv " + path + " lacks column " + n);
  const std::size_t rows = cols.at(names.front()).size();
  h.rows.resize(rows);
  for (const auto& n : names) {
    const auto member = FrontHistory::member(n);
    const auto& col = cols.at(n);
    for (std::size_t r = 0; r < rows; ++r) h.rows[r].*member = col[r];
  }
  return h;
}

void write_lattice_csv(const LatticeEnsemble& e, std::uint64_t seed_base, double t, std::ostream& out) {
  out << "seed,time,bin,density\n";
  for (std::size_t k = 0; k < e.members.size(); ++k)
    for (std::size_t b = 0; b < e.members[k].size(); ++b)
      out << seed_base + k << ',' << format_real(t) << ',' << b << ',' << format_real(e.members[k][b]) << '\n';
}

}  // namespace dcsim
