#pragma once

#include "trisolve/problem.hpp"

#include <iosfwd>
#include <string>

namespace trisolve {

// Binary layout, all little-endian:
//   char[4]   magic "TSDF"
//   uint32    version (1)
//   uint32    dim
//   uint32    divisions[dim]
//   float64   extents[dim]
//   uint64    value count
//   float64   nodal values (mesh vertex order)

void write_binary(const DiscreteFunction& u, std::ostream& out);
/// Rebuilds the box mesh from the header. Throws ParameterError on malformed input.
DiscreteFunction read_binary(std::istream& in);

void save_binary(const DiscreteFunction& u, const std::string& path);
DiscreteFunction load_binary(const std::string& path);

/// Columns x,y[,z],u with a header row; values at 17 significant digits.
void write_csv(const DiscreteFunction& u, std::ostream& out);

} // namespace trisolve
