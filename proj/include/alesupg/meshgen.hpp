#pragma once

// Built-in mesh generators for the reference scenarios.

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "alesupg/mesh.hpp"

namespace alesupg {

/// Boundary tags used by unit_square().
enum SquareTag : int { kSquareBottom = 1, kSquareRight = 2, kSquareTop = 3, kSquareLeft = 4 };

/// n x n squares on [x0, x0+len]^2, each split along its (0,0)-(1,1) diagonal:
/// 2n^2 cells, (n+1)^2 nodes.
inline Mesh unit_square(Index n, double len = 1.0, Vec2 origin = {0.0, 0.0}) {
  if (n == 0) throw Error("unit_square: n must be positive");
  const Index m = n + 1;
  std::vector<Vec2> nodes;
  nodes.reserve(m * m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i)
      nodes.push_back({origin.x + len * double(i) / double(n), origin.y + len * double(j) / double(n)});
  auto id = [m](Index i, Index j) { return j * m + i; };
  std::vector<Cell> cells;
  cells.reserve(2 * n * n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  std::vector<BoundaryFacet> facets;
  for (Index i = 0; i < n; ++i) {
    facets.push_back({{id(i, 0), id(i + 1, 0)}, kSquareBottom});
    facets.push_back({{id(n, i), id(n, i + 1)}, kSquareRight});
    facets.push_back({{id(i + 1, n), id(i, n)}, kSquareTop});
    facets.push_back({{id(0, i + 1), id(0, i)}, kSquareLeft});
  }
  return Mesh::create(std::move(nodes), std::move(cells), std::move(facets));
}

/// Boundary tags used by channel_with_hole().
enum ChannelTag : int { kChannelInlet = 1, kChannelWall = 2, kChannelOutflow = 3, kChannelDisc = 4 };

struct ChannelGeometry {
  double x_min = -3.0, x_max = 9.0;
  double y_min = -3.0, y_max = 3.0;
  double disc_radius = 1.0;
  double box_half = 2.0;  // half width of the O-grid block around the disc
  double radial_ratio = 1.15;
};

/// Channel [x_min,x_max] x [y_min,y_max] minus a disc centred at the origin.
/// An O-grid block with geometric radial grading surrounds the disc; the rest
/// of the channel is a uniform tensor grid. Cell count is close to
/// `target_cells` (about 11 k^2 for k segments per block side).
inline Mesh channel_with_hole(Index target_cells, const ChannelGeometry& g = {}) {
  const Index k = std::max<Index>(4, static_cast<Index>(std::lround(std::sqrt(double(target_cells) / 11.0))));
  const double h0 = 2.0 * g.box_half / double(k);
  auto segs = [h0](double len) { return std::max<Index>(1, static_cast<Index>(std::lround(len / h0))); };

  auto axis = [&](double lo, double hi, Index& ia, Index& ib) {
    std::vector<double> v;
    const Index n0 = segs(-g.box_half - lo), n2 = segs(hi - g.box_half);
    for (Index i = 0; i < n0; ++i) v.push_back(lo + (-g.box_half - lo) * double(i) / double(n0));
    ia = v.size();
    for (Index i = 0; i < k; ++i) v.push_back(-g.box_half + 2.0 * g.box_half * double(i) / double(k));
    ib = v.size();
    for (Index i = 0; i <= n2; ++i) v.push_back(g.box_half + (hi - g.box_half) * double(i) / double(n2));
    return v;
  };
  Index ixa = 0, ixb = 0, iya = 0, iyb = 0;
  const auto X = axis(g.x_min, g.x_max, ixa, ixb);
  const auto Y = axis(g.y_min, g.y_max, iya, iyb);
  const Index nx = X.size() - 1, ny = Y.size() - 1;

  std::vector<Vec2> nodes;
  std::map<std::pair<Index, Index>, Index> grid_id;
  auto inside_box = [&](Index a, Index b) { return a > ixa && a < ixb && b > iya && b < iyb; };
  for (Index b = 0; b <= ny; ++b)
    for (Index a = 0; a <= nx; ++a)
      if (!inside_box(a, b)) {
        grid_id[{a, b}] = nodes.size();
        nodes.push_back({X[a], Y[b]});
      }

  std::vector<Cell> cells;
  auto add_quad = [&](Index p0, Index p1, Index p2, Index p3) {
    // split along the shorter diagonal
    if (norm(nodes[p2] - nodes[p0]) <= norm(nodes[p3] - nodes[p1])) {
      cells.push_back({p0, p1, p2});
      cells.push_back({p0, p2, p3});
    } else {
      cells.push_back({p0, p1, p3});
      cells.push_back({p1, p2, p3});
    }
  };
  for (Index b = 0; b < ny; ++b)
    for (Index a = 0; a < nx; ++a) {
      if (a >= ixa && a < ixb && b >= iya && b < iyb) continue;
      add_quad(grid_id[{a, b}], grid_id[{a + 1, b}], grid_id[{a + 1, b + 1}], grid_id[{a, b + 1}]);
    }

  // O-grid: ring 0 on the disc, ring nr on the block boundary (shared nodes).
  const Index perim = 4 * k;
  const Index nr = std::max<Index>(2, static_cast<Index>(std::lround(double(k) / 2.0)));
  std::vector<Index> outer(perim);
  for (Index i = 0; i < perim; ++i) {
    const Index side = i / k, p = i % k;
    std::pair<Index, Index> ab;
    switch (side) {
      case 0: ab = {ixb, iya + p}; break;
      case 1: ab = {ixb - p, iyb}; break;
      case 2: ab = {ixa, iyb - p}; break;
      default: ab = {ixa + p, iya}; break;
    }
    outer[i] = grid_id.at(ab);
  }
  std::vector<std::vector<Index>> ring(nr + 1, std::vector<Index>(perim));
  ring[nr] = outer;
  const double q = g.radial_ratio;
  for (Index j = 0; j < nr; ++j) {
    const double s = (q == 1.0) ? double(j) / double(nr) : (std::pow(q, double(j)) - 1.0) / (std::pow(q, double(nr)) - 1.0);
    for (Index i = 0; i < perim; ++i) {
      const Vec2 sq = nodes[outer[i]];
      const double th = std::atan2(sq.y, sq.x);
      const Vec2 circ{g.disc_radius * std::cos(th), g.disc_radius * std::sin(th)};
      ring[j][i] = nodes.size();
      nodes.push_back((1.0 - s) * circ + s * sq);
    }
  }
  for (Index j = 0; j < nr; ++j)
    for (Index i = 0; i < perim; ++i) {
      const Index i1 = (i + 1) % perim;
      add_quad(ring[j][i], ring[j][i1], ring[j + 1][i1], ring[j + 1][i]);
    }

  std::vector<BoundaryFacet> facets;
  for (Index a = 0; a < nx; ++a) {
    facets.push_back({{grid_id[{a, 0}], grid_id[{a + 1, 0}]}, kChannelWall});
    facets.push_back({{grid_id[{a + 1, ny}], grid_id[{a, ny}]}, kChannelWall});
  }
  for (Index b = 0; b < ny; ++b) {
    facets.push_back({{grid_id[{0, b + 1}], grid_id[{0, b}]}, kChannelInlet});
    facets.push_back({{grid_id[{nx, b}], grid_id[{nx, b + 1}]}, kChannelOutflow});
  }
  for (Index i = 0; i < perim; ++i) facets.push_back({{ring[0][(i + 1) % perim], ring[0][i]}, kChannelDisc});

  return Mesh::create(std::move(nodes), std::move(cells), std::move(facets));
}

}  // namespace alesupg
