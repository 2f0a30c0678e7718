#include "dcsim/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "dcsim/errors.hpp"

namespace dcsim {

namespace {

constexpr const char* kMagicPrefix = "DCSIM";
constexpr int kVersion = 1;

std::uint64_t to_little(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((x >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
  return x;
}

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw SnapshotError(std::string("snapshot header truncated before ") + what);
  return line;
}

}  // namespace

void write_snapshot(const StateQuad& s, std::ostream& out) {
  s.validate();
  const Grid& g = s.grid();
  std::ostringstream head;
  head << std::setprecision(17);
  head << kMagicPrefix << kVersion << '\n' << g.dim() << '\n';
  for (int a = 0; a < g.dim(); ++a) head << (a ? " " : "") << g.cells(a);
  head << '\n';
  for (int a = 0; a < g.dim(); ++a) head << (a ? " " : "") << g.extent(a);
  head << '\n' << s.t << '\n' << "u v w z\n";
  out << head.str();
  for (const Field* f : {&s.u, &s.v, &s.w, &s.z}) {
    std::vector<std::uint64_t> raw(f->size());
    for (std::size_t k = 0; k < raw.size(); ++k) raw[k] = to_little(std::bit_cast<std::uint64_t>(f->values[k]));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
  }
  if (!out) throw SnapshotError("snapshot write failed");
}

void write_snapshot(const StateQuad& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("cannot open " + path + " for writing");
  write_snapshot(s, out);
}

StateQuad read_snapshot(std::istream& in) {
  const std::string magic = next_line(in, "magic");
  if (magic.rfind(kMagicPrefix, 0) != 0) throw SnapshotError("not a snapshot (bad magic '" + magic + "')");
  if (magic != std::string(kMagicPrefix) + std::to_string(kVersion))
    throw SnapshotError("unsupported snapshot version '" + magic.substr(5) + "' (expected " +
                        std::to_string(kVersion) + ")");

  int dim = 0;
  std::array<int, 2> cells{1, 1};
  std::array<double, 2> extent{0.0, 0.0};
  double t = 0.0;
  {
    std::istringstream ls(next_line(in, "dim"));
    if (!(ls >> dim) || (dim != 1 && dim != 2)) throw SnapshotError("snapshot header: bad dim");
  }
  {
    std::istringstream ls(next_line(in, "cells"));
    for (int a = 0; a < dim; ++a)
      if (!(ls >> cells[a]) || cells[a] < 1) throw SnapshotError("snapshot header: bad cell counts");
  }
  {
    std::istringstream ls(next_line(in, "extent"));
    for (int a = 0; a < dim; ++a)
      if (!(ls >> extent[a])) throw SnapshotError("snapshot header: bad extents");
  }
  {
    std::istringstream ls(next_line(in, "time"));
    if (!(ls >> t)) throw SnapshotError("snapshot header: bad time");
  }
  if (next_line(in, "field order") != "u v w z") throw SnapshotError("snapshot header: field order must be 'u v w z'");

  Grid g;
  try {
    g = dim == 1 ? Grid(1, cells[0], extent[0]) : Grid(2, cells, extent);
  } catch (const std::invalid_argument& e) {
    throw SnapshotError(std::string("snapshot header: ") + e.what());
  }

  const std::size_t expected = 4 * g.size() * 8;
  std::vector<char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (payload.size() != expected)
    throw SnapshotError("snapshot payload length mismatch: expected " + std::to_string(expected) + " bytes, got " +
                        std::to_string(payload.size()));

  StateQuad s(g);
  s.t = t;
  std::size_t offset = 0;
  for (Field* f : {&s.u, &s.v, &s.w, &s.z}) {
    for (std::size_t k = 0; k < f->size(); ++k, offset += 8) {
      std::uint64_t raw;
      std::memcpy(&raw, payload.data() + offset, 8);
      f->values[k] = std::bit_cast<double>(to_little(raw));
    }
  }
  return s;
}

StateQuad read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open " + path);
  return read_snapshot(in);
}

}  // namespace dcsim
