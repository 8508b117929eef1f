#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>

#include "khess/grid.hpp"

namespace khess {

/// Writes a field as CSV: header "x1,...,xn,u", one row per node in
/// row-major node order, 17 significant digits.
void write_field(std::ostream& out, const MeshFunction& u);

/// Reads a field written by write_field, rebuilding its grid from the
/// header dimension and the row count.
std::pair<std::shared_ptr<const Grid>, MeshFunction> read_field(std::istream& in);

/// CSV of the plane slice of a 3-d field along the given axis (0..2) at
/// axis coordinate `value`, which must lie on the lattice. Rows are
/// (coordinate1, coordinate2, u) in row-major order over the remaining axes.
std::string export_slice(const MeshFunction& u, int axis, double value);

}  // namespace khess
