#pragma once

#include <iosfwd>
#include <string>

#include "dcsim/model.hpp"

namespace dcsim {

/// Six text lines (magic "DCSIM1", dim, cells per axis, extent per axis,
/// time, "u v w z") followed by the four fields as little-endian doubles.
/// The grid origin is not stored; read_snapshot returns origin 0.
void write_snapshot(const StateQuad& s, std::ostream& out);
void write_snapshot(const StateQuad& s, const std::string& path);

/// Throws SnapshotError for a foreign magic, another format version, or a
/// payload whose length does not match the header.
StateQuad read_snapshot(std::istream& in);
StateQuad read_snapshot(const std::string& path);

}  // namespace dcsim
