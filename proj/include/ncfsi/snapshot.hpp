#pragma once

#include <iosfwd>

#include "ncfsi/stepper.hpp"

namespace ncfsi {

/// `NCFSI-MESH v1` snapshot extended with per-dof field blocks
/// (`FIELD u 2`, `FIELD omega 1`, `FIELD p 1`, `FIELD d 2`); byte-stable for
/// identical states, and read(write(s)) re-exports identical bytes.
void write_snapshot(std::ostream& os, const State& state);

/// Rebuilds the mesh, spaces and fields; `t` is not part of the format and
/// is left at zero.
State read_snapshot(std::istream& is);

} // namespace ncfsi
