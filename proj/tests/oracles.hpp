#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library's assembly, quadrature or solver code.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alesupg/core.hpp"
#include "alesupg/mesh.hpp"

namespace oracle {

using alesupg::Index;
using alesupg::Vec2;

using Dense = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Dense a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (a[p][k] == 0.0) throw std::runtime_error("dense_solve: singular");
    std::swap(a[p], a[k]);
    std::swap(b[p], b[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i][k] / a[k][k];
      if (m == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

inline double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

/// Integral of xi^a eta^b over the reference triangle: a! b! / (a + b + 2)!.
inline double monomial_integral(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

/// Gradients of the barycentric coordinates of a triangle and its area.
struct P1Cell {
  std::array<Vec2, 3> grad;
  double area;
};

inline P1Cell p1_cell(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double twice = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  P1Cell r;
  r.area = 0.5 * twice;
  r.grad[0] = {(b.y - c.y) / twice, (c.x - b.x) / twice};
  r.grad[1] = {(c.y - a.y) / twice, (a.x - c.x) / twice};
  r.grad[2] = {(a.y - b.y) / twice, (b.x - a.x) / twice};
  return r;
}

inline double longest_edge(const Vec2& a, const Vec2& b, const Vec2& c) {
  return std::max({std::hypot(b.x - a.x, b.y - a.y), std::hypot(c.x - b.x, c.y - b.y), std::hypot(a.x - c.x, a.y - c.y)});
}

/// Textbook fixed-domain P1 SUPG data with constant eps, b, c, f:
///   A_ij = eps (grad phi_j, grad phi_i) + (b . grad phi_j) |K| / 3 + c |K| (1 + d_ij) / 12
///        + delta_K [ (b . grad phi_j)(b . grad phi_i) |K| + c (b . grad phi_i) |K| / 3 ]
///   F_i  = f |K| / 3 + delta_K f (b . grad phi_i) |K|
///   M_ij = |K| (1 + d_ij) / 12
/// with delta_K = delta0 h_K / |b| when eps < h_K |b|, h_K the longest edge.
struct FixedSupg {
  std::map<std::pair<Index, Index>, double> A, M;
  std::vector<double> F;
};

inline FixedSupg fixed_supg_p1(const alesupg::Mesh& mesh, double eps, Vec2 b, double c, double f, double delta0) {
  FixedSupg r;
  r.F.assign(mesh.node_count(), 0.0);
  const double bn = std::hypot(b.x, b.y);
  for (const auto& cell : mesh.cells()) {
    const Vec2 p0 = mesh.nodes()[cell[0]], p1 = mesh.nodes()[cell[1]], p2 = mesh.nodes()[cell[2]];
    const auto g = p1_cell(p0, p1, p2);
    const double h = longest_edge(p0, p1, p2);
    const double delta = (bn > 0.0 && eps < h * bn) ? delta0 * h / bn : 0.0;
    for (int i = 0; i < 3; ++i) {
      const double bgi = b.x * g.grad[i].x + b.y * g.grad[i].y;
      r.F[cell[i]] += f * g.area / 3.0 + delta * f * bgi * g.area;
      for (int j = 0; j < 3; ++j) {
        const double bgj = b.x * g.grad[j].x + b.y * g.grad[j].y;
        const double m = g.area * (i == j ? 2.0 : 1.0) / 12.0;
        const double stiff = eps * (g.grad[i].x * g.grad[j].x + g.grad[i].y * g.grad[j].y) * g.area;
        const double a = stiff + bgj * g.area / 3.0 + c * m + delta * (bgj * bgi * g.area + c * bgi * g.area / 3.0);
        r.A[{cell[i], cell[j]}] += a;
        r.M[{cell[i], cell[j]}] += m;
      }
    }
  }
  return r;
}

/// Smallest c with ||lap v||_K <= c h_K^{-1} |v|_{1,K} for every P2 function
/// on every cell, h_K the longest edge. Per cell c^2 = h^2 |K| l^T S^+ l with
/// l the (constant) Laplacians of the basis and S the local stiffness matrix.
inline double p2_inverse_constant(const alesupg::Mesh& mesh) {
  double cmax = 0.0;
  for (const auto& cell : mesh.cells()) {
    const Vec2 p[3] = {mesh.nodes()[cell[0]], mesh.nodes()[cell[1]], mesh.nodes()[cell[2]]};
    const auto g = p1_cell(p[0], p[1], p[2]);
    auto gd = [&](int a, int b) { return g.grad[a].x * g.grad[b].x + g.grad[a].y * g.grad[b].y; };
    // gradient of each basis function as sum_a lambda_a v[a]
    std::array<std::array<Vec2, 3>, 6> v{};
    std::array<double, 6> lap{};
    for (int i = 0; i < 3; ++i) {
      for (int a = 0; a < 3; ++a) {
        const double s = (a == i ? 4.0 : 0.0) - 1.0;
        v[i][a] = {s * g.grad[i].x, s * g.grad[i].y};
      }
      lap[i] = 4.0 * gd(i, i);
    }
    const int edges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    for (int e = 0; e < 3; ++e) {
      const int i = edges[e][0], j = edges[e][1];
      v[3 + e][j] = {4.0 * g.grad[i].x, 4.0 * g.grad[i].y};
      v[3 + e][i] = {4.0 * g.grad[j].x, 4.0 * g.grad[j].y};
      lap[3 + e] = 8.0 * gd(i, j);
    }
    Dense S(6, std::vector<double>(6, 1.0));  // + 1 1^T removes the constant kernel
    for (int q = 0; q < 6; ++q)
      for (int r = 0; r < 6; ++r)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            S[q][r] += (v[q][a].x * v[r][b].x + v[q][a].y * v[r][b].y) * g.area * (a == b ? 2.0 : 1.0) / 12.0;
    const auto x = dense_solve(S, std::vector<double>(lap.begin(), lap.end()));
    double q = 0.0;
    for (int i = 0; i < 6; ++i) q += lap[i] * x[i];
    const double h = longest_edge(p[0], p[1], p[2]);
    cmax = std::max(cmax, std::sqrt(h * h * g.area * q));
  }
  return cmax;
}

}  // namespace oracle
