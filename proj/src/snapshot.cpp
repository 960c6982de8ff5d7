#include "pairex/snapshot.hpp"

#include <cstring>
#include <fstream>

namespace pairex {

namespace {

constexpr char kMagic[8] = {'P', 'A', 'I', 'R', 'E', 'X', '0', '1'};

void write_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ofstream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::ifstream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

double read_f64(std::ifstream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_header(std::ofstream& os, const Grid& g, SnapshotKind kind) {
  os.write(kMagic, sizeof kMagic);
  write_u32(os, static_cast<std::uint32_t>(g.dim));
  write_u32(os, static_cast<std::uint32_t>(g.points_per_axis));
  write_u32(os, static_cast<std::uint32_t>(kind));
  write_f64(os, g.box_length);
}

}  // namespace

void write_kernel_snapshot(const std::string& path, const Kernel& k, SnapshotKind kind) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw NumericalError("write_kernel_snapshot: cannot open " + path);
  write_header(os, *k.grid, kind);
  const Index n = k.grid->total_points;
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) {
      write_f64(os, k.entries(r, c).real());
      write_f64(os, k.entries(r, c).imag());
    }
  if (!os) throw NumericalError("write_kernel_snapshot: write failed on " + path);
}

void write_field_snapshot(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw NumericalError("write_field_snapshot: cannot open " + path);
  write_header(os, *f.grid, SnapshotKind::field);
  for (Index j = 0; j < f.values.size(); ++j) {
    write_f64(os, f.values(j).real());
    write_f64(os, f.values(j).imag());
  }
  if (!os) throw NumericalError("write_field_snapshot: write failed on " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw NumericalError("read_snapshot: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw NumericalError("read_snapshot: bad magic in " + path);

  Snapshot s;
  s.dim = static_cast<int>(read_u32(is));
  s.points_per_axis = static_cast<int>(read_u32(is));
  s.kind = static_cast<SnapshotKind>(read_u32(is));
  s.box_length = read_f64(is);

  Index n = 1;
  for (int a = 0; a < s.dim; ++a) n *= s.points_per_axis;
  if (s.kind == SnapshotKind::field) {
    s.field = CVector(n);
    for (Index j = 0; j < n; ++j) {
      const double re = read_f64(is);
      const double im = read_f64(is);
      s.field(j) = Complex(re, im);
    }
  } else {
    s.kernel = CMatrix(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) {
        const double re = read_f64(is);
        const double im = read_f64(is);
        s.kernel(r, c) = Complex(re, im);
      }
  }
  if (!is) throw NumericalError("read_snapshot: truncated file " + path);
  return s;
}

}  // namespace pairex
