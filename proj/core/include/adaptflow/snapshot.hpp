#ifndef ADAPTFLOW_SNAPSHOT_HPP
#define ADAPTFLOW_SNAPSHOT_HPP

#include <string>

#include "adaptflow/grid.hpp"

namespace adaptflow {

/// Uniform grid snapshot file.
///
/// Layout (little endian):
///   char[4]  magic "AFSN"
///   u32      version (1)
///   u32      dim (2 or 3)
///   i32      level
///   u64      cells per axis
///   f64      gamma, time, origin, extent
///   payload  interior cells in row-major order (x fastest), each cell as
///            rho, mom[0..dim-1], rhoE doubles.
///
/// Reading and re-writing a snapshot is bit-exact.
struct Snapshot {
  UniformGrid grid;
  double gamma = 1.4;
  double time = 0.0;
};

void write_snapshot(const std::string& path, const UniformGrid& grid, double gamma,
                    double time);

Snapshot read_snapshot(const std::string& path);

/// Plain-text sidecar helpers (run configuration next to a snapshot).
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace adaptflow

#endif  // ADAPTFLOW_SNAPSHOT_HPP
