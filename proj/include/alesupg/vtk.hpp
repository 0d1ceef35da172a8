#pragma once

// Legacy ASCII VTK output of a scalar field. P2 fields go on the
// visualization submesh that splits every cell into four at its edge
// midpoints, so every DOF becomes a point.

#include <cstdio>
#include <fstream>
#include <span>
#include <string>

#include "alesupg/space.hpp"

namespace alesupg {

/// `<name>_t<step>.vtk` with the step zero-padded to six digits.
inline std::string snapshot_filename(const std::string& name, Index step) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", step);
  return name + "_t" + buf + ".vtk";
}

inline void write_vtk(std::ostream& out, const FunctionSpace& space, std::span<const Vec2> coords,
                      std::span<const double> u, const std::string& field = "u") {
  if (u.size() != space.dof_count()) throw Error("write_vtk: field does not match the space");
  const auto pts = space.dof_coordinates(coords);
  const Index nc = space.mesh().cell_count();
  const bool p2 = space.degree() == 2;
  const Index ncells = p2 ? 4 * nc : nc;
  char buf[96];

  out << "# vtk DataFile Version 3.0\n" << field << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << pts.size() << " double\n";
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", p.x, p.y);
    out << buf;
  }
  out << "CELLS " << ncells << ' ' << 4 * ncells << '\n';
  static constexpr int sub[4][3] = {{0, 3, 5}, {3, 1, 4}, {5, 4, 2}, {3, 4, 5}};
  for (Index k = 0; k < nc; ++k) {
    const auto d = space.cell_dofs(k);
    if (!p2) {
      out << "3 " << d[0] << ' ' << d[1] << ' ' << d[2] << '\n';
      continue;
    }
    for (const auto& s : sub) out << "3 " << d[s[0]] << ' ' << d[s[1]] << ' ' << d[s[2]] << '\n';
  }
  out << "CELL_TYPES " << ncells << '\n';
  for (Index k = 0; k < ncells; ++k) out << "5\n";
  out << "POINT_DATA " << pts.size() << "\nSCALARS " << field << " double 1\nLOOKUP_TABLE default\n";
  for (double v : u) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

inline void write_vtk(const std::string& path, const FunctionSpace& space, std::span<const Vec2> coords,
                      std::span<const double> u, const std::string& field = "u") {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_vtk(f, space, coords, u, field);
  if (!f) throw IoError("failed writing " + path);
}

}  // namespace alesupg
