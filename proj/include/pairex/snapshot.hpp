#pragma once

// Binary snapshot format, shared with the CLI:
//   8-byte magic "PAIREX01"
//   little-endian u32 {dim, points_per_axis, kind}
//   f64 box_length
//   row-major interleaved re/im f64 entries
// Kernel kinds carry n*n entries (n = points_per_axis^dim), the field kind n.

#include <cstdint>
#include <string>

#include "pairex/kernel.hpp"

namespace pairex {

enum class SnapshotKind : std::uint32_t {
  zeta = 0,
  sh = 1,
  ch = 2,
  sh2k = 3,
  ch2k = 4,
  theta = 5,
  kernel = 6,
  field = 16,
};

void write_kernel_snapshot(const std::string& path, const Kernel& k, SnapshotKind kind);
void write_field_snapshot(const std::string& path, const Field& f);

struct Snapshot {
  SnapshotKind kind;
  int dim = 0;
  int points_per_axis = 0;
  double box_length = 0.0;
  CMatrix kernel;  // for kernel kinds
  CVector field;   // for the field kind
};

Snapshot read_snapshot(const std::string& path);

}  // namespace pairex
