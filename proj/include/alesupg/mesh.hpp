#pragma once

// Triangle meshes with fixed topology. Node coordinates stored in the mesh are
// the reference (t = 0) positions; moved geometries travel as separate
// coordinate arrays indexed like Mesh::nodes().

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alesupg/core.hpp"

namespace alesupg {

using Cell = std::array<Index, 3>;

struct BoundaryFacet {
  std::array<Index, 2> nodes;
  int tag = 0;
  friend bool operator==(const BoundaryFacet&, const BoundaryFacet&) = default;
};

inline std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

/// Signed area of triangle (a, b, c); positive for counterclockwise order.
inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross(b - a, c - a);
}

inline double cell_area(std::span<const Vec2> coords, const Cell& cell) {
  return signed_area(coords[cell[0]], coords[cell[1]], coords[cell[2]]);
}

class Mesh {
 public:
  Mesh() = default;

  /// Validates topology and orientation. Clockwise cells are reordered to
  /// counterclockwise; zero-area cells and any broken invariant throw
  /// TopologyError naming the offending cell or facet.
  static Mesh create(std::vector<Vec2> nodes, std::vector<Cell> cells,
                     std::vector<BoundaryFacet> boundary) {
    Mesh m;
    m.nodes_ = std::move(nodes);
    m.cells_ = std::move(cells);
    m.boundary_ = std::move(boundary);
    m.validate_and_orient();
    return m;
  }

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<BoundaryFacet>& boundary_facets() const { return boundary_; }
  Index node_count() const { return nodes_.size(); }
  Index cell_count() const { return cells_.size(); }

  /// Distinct boundary tags in ascending order.
  std::vector<int> tags() const {
    std::set<int> s;
    for (const auto& f : boundary_) s.insert(f.tag);
    return {s.begin(), s.end()};
  }

  /// Nodes lying on at least one boundary facet, ascending.
  std::vector<Index> boundary_nodes() const {
    std::set<Index> s;
    for (const auto& f : boundary_) s.insert({f.nodes[0], f.nodes[1]});
    return {s.begin(), s.end()};
  }

  std::vector<Index> nodes_with_tag(int tag) const {
    std::set<Index> s;
    for (const auto& f : boundary_)
      if (f.tag == tag) s.insert({f.nodes[0], f.nodes[1]});
    return {s.begin(), s.end()};
  }

 private:
  void validate_and_orient() {
    const Index n = nodes_.size();
    for (Index k = 0; k < cells_.size(); ++k) {
      auto& c = cells_[k];
      for (Index v : c)
        if (v >= n)
          throw TopologyError("cell " + std::to_string(k) + " references node " + std::to_string(v) +
                              " but node_count is " + std::to_string(n));
      if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2])
        throw TopologyError("cell " + std::to_string(k) + " repeats a node");
      const double a = cell_area(nodes_, c);
      if (!(a != 0.0) || !std::isfinite(a))
        throw TopologyError("cell " + std::to_string(k) + " has zero area");
      if (a < 0.0) std::swap(c[1], c[2]);
    }

    std::unordered_map<std::uint64_t, int> edge_cells;
    edge_cells.reserve(cells_.size() * 2);
    for (Index k = 0; k < cells_.size(); ++k) {
      const auto& c = cells_[k];
      for (int e = 0; e < 3; ++e) {
        int& cnt = edge_cells[edge_key(c[e], c[(e + 1) % 3])];
        if (++cnt > 2)
          throw TopologyError("edge of cell " + std::to_string(k) + " is shared by more than two cells");
      }
    }

    std::unordered_map<std::uint64_t, Index> seen;
    for (Index f = 0; f < boundary_.size(); ++f) {
      const auto& fc = boundary_[f];
      if (fc.nodes[0] >= n || fc.nodes[1] >= n || fc.nodes[0] == fc.nodes[1])
        throw TopologyError("boundary facet " + std::to_string(f) + " has invalid nodes");
      const auto key = edge_key(fc.nodes[0], fc.nodes[1]);
      auto it = edge_cells.find(key);
      if (it == edge_cells.end() || it->second != 1)
        throw TopologyError("boundary facet " + std::to_string(f) + " is not an edge of exactly one cell");
      if (!seen.emplace(key, f).second)
        throw TopologyError("boundary facet " + std::to_string(f) + " duplicates facet " +
                            std::to_string(seen[key]));
    }
    for (Index k = 0; k < cells_.size(); ++k) {
      const auto& c = cells_[k];
      for (int e = 0; e < 3; ++e) {
        const auto key = edge_key(c[e], c[(e + 1) % 3]);
        if (edge_cells[key] == 1 && !seen.count(key))
          throw TopologyError("boundary edge (" + std::to_string(c[e]) + "," +
                              std::to_string(c[(e + 1) % 3]) + ") of cell " + std::to_string(k) +
                              " carries no tag");
      }
    }
  }

  std::vector<Vec2> nodes_;
  std::vector<Cell> cells_;
  std::vector<BoundaryFacet> boundary_;
};

/// Dirichlet data per tag and the set of tags with homogeneous Neumann data.
struct BoundaryCondition {
  std::map<int, std::function<double(double, Vec2)>> dirichlet;
  std::set<int> neumann;

  void validate() const {
    for (int t : neumann)
      if (dirichlet.count(t))
        throw ConfigError("boundary tag " + std::to_string(t) + " is both Dirichlet and Neumann");
  }
};

/// Longest edge of the cell on the given geometry.
inline double cell_diameter(std::span<const Vec2> coords, const Cell& c) {
  const Vec2 &a = coords[c[0]], &b = coords[c[1]], &d = coords[c[2]];
  return std::max({norm(b - a), norm(d - b), norm(a - d)});
}

inline double cell_diameter(const Mesh& mesh, Index cell) {
  if (cell >= mesh.cell_count()) throw Error("cell index " + std::to_string(cell) + " out of range");
  return cell_diameter(mesh.nodes(), mesh.cells()[cell]);
}

inline double global_mesh_size(const Mesh& mesh, std::span<const Vec2> coords) {
  if (mesh.cell_count() == 0) throw Error("global_mesh_size: empty mesh");
  double h = 0.0;
  for (const auto& c : mesh.cells()) h = std::max(h, cell_diameter(coords, c));
  return h;
}

inline double global_mesh_size(const Mesh& mesh) { return global_mesh_size(mesh, mesh.nodes()); }

inline double mesh_area(const Mesh& mesh, std::span<const Vec2> coords) {
  double a = 0.0;
  for (const auto& c : mesh.cells()) a += cell_area(coords, c);
  return a;
}

/// Index of the first cell with nonpositive signed area, or cell_count().
inline Index first_inverted_cell(const Mesh& mesh, std::span<const Vec2> coords) {
  for (Index k = 0; k < mesh.cell_count(); ++k)
    if (!(cell_area(coords, mesh.cells()[k]) > 0.0)) return k;
  return mesh.cell_count();
}

inline void require_untangled(const Mesh& mesh, std::span<const Vec2> coords, const std::string& context) {
  const Index k = first_inverted_cell(mesh, coords);
  if (k != mesh.cell_count()) throw TangledMeshError(context + ": nonpositive cell area", k);
}

// ---------------------------------------------------------------------------
// ASCII format
//
//   tri-mesh v1
//   nodes N      followed by N lines "x y"
//   cells M      followed by M lines "i j k"
//   boundary B   followed by B lines "i j tag"
//
// Tokens are whitespace separated; '#' starts a comment.

namespace detail {

struct LineReader {
  std::istream& in;
  std::size_t line_no = 0;

  // Next non-blank, comment-stripped line split into tokens; false at EOF.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
      std::istringstream ss(line);
      tokens.clear();
      for (std::string t; ss >> t;) tokens.push_back(t);
      if (!tokens.empty()) return true;
    }
    return false;
  }
};

inline double parse_double(const std::string& s, std::size_t line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size()) throw ParseError("expected a number, got '" + s + "'", line);
  return v;
}

inline long long parse_int(const std::string& s, std::size_t line) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size()) throw ParseError("expected an integer, got '" + s + "'", line);
  return v;
}

inline Index parse_index(const std::string& s, std::size_t line) {
  const long long v = parse_int(s, line);
  if (v < 0) throw ParseError("negative index " + s, line);
  return static_cast<Index>(v);
}

inline std::size_t expect_section(LineReader& r, const std::string& name) {
  std::vector<std::string> tok;
  if (!r.next(tok)) throw ParseError("missing '" + name + "' section", r.line_no);
  if (tok.size() != 2 || tok[0] != name)
    throw ParseError("expected '" + name + " <count>'", r.line_no);
  return parse_index(tok[1], r.line_no);
}

}  // namespace detail

inline Mesh read_mesh(std::istream& in) {
  detail::LineReader r{in};
  std::vector<std::string> tok;
  if (!r.next(tok) || tok.size() != 2 || tok[0] != "tri-mesh" || tok[1] != "v1")
    throw ParseError("expected header 'tri-mesh v1'", r.line_no);

  const std::size_t n = detail::expect_section(r, "nodes");
  std::vector<Vec2> nodes(n);
  for (auto& p : nodes) {
    if (!r.next(tok)) throw ParseError("unexpected end of file in nodes", r.line_no);
    if (tok.size() != 2) throw ParseError("node line needs 2 values", r.line_no);
    p = {detail::parse_double(tok[0], r.line_no), detail::parse_double(tok[1], r.line_no)};
  }

  const std::size_t m = detail::expect_section(r, "cells");
  std::vector<Cell> cells(m);
  for (auto& c : cells) {
    if (!r.next(tok)) throw ParseError("unexpected end of file in cells", r.line_no);
    if (tok.size() != 3) throw ParseError("cell line needs 3 indices", r.line_no);
    for (int i = 0; i < 3; ++i) c[i] = detail::parse_index(tok[i], r.line_no);
  }

  const std::size_t b = detail::expect_section(r, "boundary");
  std::vector<BoundaryFacet> facets(b);
  for (auto& f : facets) {
    if (!r.next(tok)) throw ParseError("unexpected end of file in boundary", r.line_no);
    if (tok.size() != 3) throw ParseError("boundary line needs 'i j tag'", r.line_no);
    f.nodes = {detail::parse_index(tok[0], r.line_no), detail::parse_index(tok[1], r.line_no)};
    f.tag = static_cast<int>(detail::parse_int(tok[2], r.line_no));
  }
  if (r.next(tok)) throw ParseError("trailing content after boundary section", r.line_no);
  return Mesh::create(std::move(nodes), std::move(cells), std::move(facets));
}

inline Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

/// Canonical form: coordinates with 17 significant digits, so a reload is
/// bit-exact.
inline void write_mesh(std::ostream& out, const Mesh& mesh) {
  char buf[64];
  out << "tri-mesh v1\nnodes " << mesh.node_count() << '\n';
  for (const auto& p : mesh.nodes()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    out << buf;
  }
  out << "cells " << mesh.cell_count() << '\n';
  for (const auto& c : mesh.cells()) out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "boundary " << mesh.boundary_facets().size() << '\n';
  for (const auto& f : mesh.boundary_facets()) out << f.nodes[0] << ' ' << f.nodes[1] << ' ' << f.tag << '\n';
}

inline void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file '" + path + "'");
  write_mesh(out, mesh);
  if (!out) throw IoError("write failed for '" + path + "'");
}

/// Red refinement: every triangle split into four through its edge midpoints.
inline Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Vec2> nodes = mesh.nodes();
  std::unordered_map<std::uint64_t, Index> mid;
  auto midpoint = [&](Index a, Index b) {
    auto [it, fresh] = mid.emplace(edge_key(a, b), nodes.size());
    if (fresh) nodes.push_back(0.5 * (nodes[a] + nodes[b]));
    return it->second;
  };
  std::vector<Cell> cells;
  cells.reserve(4 * mesh.cell_count());
  for (const auto& c : mesh.cells()) {
    const Index m01 = midpoint(c[0], c[1]), m12 = midpoint(c[1], c[2]), m20 = midpoint(c[2], c[0]);
    cells.push_back({c[0], m01, m20});
    cells.push_back({m01, c[1], m12});
    cells.push_back({m20, m12, c[2]});
    cells.push_back({m01, m12, m20});
  }
  std::vector<BoundaryFacet> facets;
  for (const auto& f : mesh.boundary_facets()) {
    const Index m = mid.at(edge_key(f.nodes[0], f.nodes[1]));
    facets.push_back({{f.nodes[0], m}, f.tag});
    facets.push_back({{m, f.nodes[1]}, f.tag});
  }
  return Mesh::create(std::move(nodes), std::move(cells), std::move(facets));
}

/// For each cell, the neighbor across local edge e = (v_e, v_{e+1}), or
/// npos on the boundary.
inline std::vector<std::array<Index, 3>> cell_neighbors(const Mesh& mesh) {
  constexpr Index npos = static_cast<Index>(-1);
  std::unordered_map<std::uint64_t, std::pair<Index, int>> first;
  std::vector<std::array<Index, 3>> nb(mesh.cell_count(), {npos, npos, npos});
  for (Index k = 0; k < mesh.cell_count(); ++k) {
    const auto& c = mesh.cells()[k];
    for (int e = 0; e < 3; ++e) {
      const auto key = edge_key(c[e], c[(e + 1) % 3]);
      auto [it, fresh] = first.emplace(key, std::pair{k, e});
      if (!fresh) {
        nb[k][e] = it->second.first;
        nb[it->second.first][it->second.second] = k;
      }
    }
  }
  return nb;
}

}  // namespace alesupg
