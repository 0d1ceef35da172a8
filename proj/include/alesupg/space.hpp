#pragma once

// Continuous Lagrange space on a fixed-topology mesh. Vertex DOFs carry the
// node index; P2 edge DOFs follow, numbered in order of first appearance
// while walking cells. The numbering does not depend on coordinates, so a
// DOF vector is valid on every time level of a moving mesh.

#include <array>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "alesupg/elements.hpp"
#include "alesupg/mesh.hpp"

namespace alesupg {

class FunctionSpace {
 public:
  FunctionSpace(const Mesh& mesh, int degree) : mesh_(&mesh), element_(degree) {
    const Index nn = mesh.node_count();
    const int nloc = element_.node_count();
    cell_dofs_.resize(mesh.cell_count() * static_cast<Index>(nloc));
    Index next = nn;
    for (Index k = 0; k < mesh.cell_count(); ++k) {
      const auto& c = mesh.cells()[k];
      for (int i = 0; i < 3; ++i) cell_dofs_[k * nloc + i] = c[i];
      if (degree == 2) {
        for (int e = 0; e < 3; ++e) {
          const Index a = c[e], b = c[(e + 1) % 3];
          auto [it, fresh] = edge_dof_.emplace(edge_key(a, b), next);
          if (fresh) {
            edges_.push_back({std::min(a, b), std::max(a, b)});
            ++next;
          }
          cell_dofs_[k * nloc + 3 + e] = it->second;
        }
      }
    }
    dof_count_ = next;
  }

  const Mesh& mesh() const { return *mesh_; }
  const ReferenceElement& element() const { return element_; }
  int degree() const { return element_.degree(); }
  int local_count() const { return element_.node_count(); }
  Index dof_count() const { return dof_count_; }

  std::span<const Index> cell_dofs(Index cell) const {
    return {cell_dofs_.data() + cell * static_cast<Index>(local_count()), static_cast<Index>(local_count())};
  }

  std::array<Vec2, 3> cell_vertices(std::span<const Vec2> coords, Index cell) const {
    const auto& c = mesh_->cells()[cell];
    return {coords[c[0]], coords[c[1]], coords[c[2]]};
  }

  /// Physical position of every DOF on the given geometry.
  std::vector<Vec2> dof_coordinates(std::span<const Vec2> coords) const {
    std::vector<Vec2> x(dof_count_);
    for (Index i = 0; i < mesh_->node_count(); ++i) x[i] = coords[i];
    for (Index e = 0; e < edges_.size(); ++e)
      x[mesh_->node_count() + e] = 0.5 * (coords[edges_[e][0]] + coords[edges_[e][1]]);
    return x;
  }

  /// DOFs on facets carrying `tag`, ascending.
  std::vector<Index> boundary_dofs(int tag) const {
    std::set<Index> s;
    for (const auto& f : mesh_->boundary_facets()) {
      if (f.tag != tag) continue;
      s.insert({f.nodes[0], f.nodes[1]});
      if (degree() == 2) s.insert(edge_dof_.at(edge_key(f.nodes[0], f.nodes[1])));
    }
    return {s.begin(), s.end()};
  }

  /// Nodal interpolant of `fn` on the given geometry.
  std::vector<double> interpolate(const std::function<double(Vec2)>& fn, std::span<const Vec2> coords) const {
    const auto x = dof_coordinates(coords);
    std::vector<double> u(x.size());
    for (Index i = 0; i < x.size(); ++i) u[i] = fn(x[i]);
    return u;
  }

 private:
  const Mesh* mesh_;
  ReferenceElement element_;
  std::vector<Index> cell_dofs_;
  std::unordered_map<std::uint64_t, Index> edge_dof_;
  std::vector<std::array<Index, 2>> edges_;
  Index dof_count_ = 0;
};

/// Quadrature order used for a space unless overridden: 2 * degree + 1.
inline int default_quadrature_order(const FunctionSpace& space) { return 2 * space.degree() + 1; }

/// Evaluate a FE field at reference point `xi` of `cell`.
inline double evaluate_in_cell(const FunctionSpace& space, std::span<const double> u, Index cell, const Vec2& xi) {
  const auto s = space.element().eval(xi);
  const auto dofs = space.cell_dofs(cell);
  double v = 0.0;
  for (int i = 0; i < s.count; ++i) v += s.value[i] * u[dofs[i]];
  return v;
}

}  // namespace alesupg
