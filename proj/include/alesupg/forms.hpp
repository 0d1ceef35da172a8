#pragma once

// Cellwise assembly of the conservative ALE-SUPG forms.
//
// Operator (trial u, test v), integrated on the supplied geometry:
//
//   eps (grad u, grad v) + (b . grad u, v) + (c u, v)
//   + sum_K delta_K (-eps lap u + (b - w) . grad u + c u, (b - w) . grad v)_K
//   - ((div w) u + w . grad u, v)
//
// The last line is the conservative mesh-velocity term -(div(w u), v), so the
// Galerkin part carries (b - w) . grad u and the reaction (c - div w) u.
// The right-hand side is (f, v) + sum_K delta_K (f, (b - w) . grad v)_K; the
// discrete time derivative is not part of the weighted residual.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "alesupg/elements.hpp"
#include "alesupg/linalg.hpp"
#include "alesupg/mesh.hpp"
#include "alesupg/space.hpp"

namespace alesupg {

struct Coefficients {
  double epsilon = 1.0;
  std::function<Vec2(double, Vec2)> b = [](double, Vec2) { return Vec2{}; };
  std::function<double(double, Vec2)> c = [](double, Vec2) { return 0.0; };
  std::function<double(double, Vec2)> f = [](double, Vec2) { return 0.0; };
  /// Lower bound for c - div(b)/2.
  double mu = 0.0;

  static Coefficients constant(double epsilon, Vec2 b, double c, double f, double mu) {
    Coefficients k;
    k.epsilon = epsilon;
    k.b = [b](double, Vec2) { return b; };
    k.c = [c](double, Vec2) { return c; };
    k.f = [f](double, Vec2) { return f; };
    k.mu = mu;
    return k;
  }
};

struct AdmissibilityReport {
  double min_margin = std::numeric_limits<double>::infinity();  // min of c - div(b)/2 - mu
  Vec2 where;
  bool ok = true;
};

/// Samples c - div(b)/2 >= mu > 0 at the quadrature points of every cell,
/// with div(b) by central differences. A failure is reported, never thrown.
inline AdmissibilityReport check_admissibility(const Coefficients& k, const FunctionSpace& space,
                                               std::span<const Vec2> coords, double t, double tol = 1e-10) {
  AdmissibilityReport r;
  const auto& q = quadrature(default_quadrature_order(space));
  const double h = 1e-6 * std::max(1.0, global_mesh_size(space.mesh(), coords));
  for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
    const auto map = physical_map(space.cell_vertices(coords, cell), cell);
    for (const auto& xi : q.points) {
      const Vec2 x = map.point(xi);
      const double divb = (k.b(t, x + Vec2{h, 0}).x - k.b(t, x - Vec2{h, 0}).x) / (2 * h) +
                          (k.b(t, x + Vec2{0, h}).y - k.b(t, x - Vec2{0, h}).y) / (2 * h);
      const double m = k.c(t, x) - 0.5 * divb - k.mu;
      if (m < r.min_margin) {
        r.min_margin = m;
        r.where = x;
      }
    }
  }
  r.ok = k.mu > 0.0 && r.min_margin >= -tol;
  return r;
}

struct Stabilization {
  double delta0 = 0.0;
  bool enforce_theory_bounds = false;
  /// Inverse-inequality constant; only used for P2 with the cap enabled.
  double c_inv = 1.0;
};

/// Cell data needed by the optional theory caps.
struct DeltaCaps {
  double c_max = 0.0;  // ||c||_{K,inf}
  double mu = 0.0;
  int degree = 1;
};

/// delta0 h / |b - w| when eps < h |b - w| (strict), else 0. With
/// enforce_theory_bounds the result is capped by mu / (2 c_max^2),
/// h^2 / (2 eps c_inv^2) (P2 only) and dt / 4.
inline double compute_delta_K(double h, double epsilon, double bw_norm, const Stabilization& stab, double dt,
                              const DeltaCaps& caps = {}) {
  if (!(bw_norm > 0.0) || stab.delta0 == 0.0) return 0.0;
  double d = (epsilon < h * bw_norm) ? stab.delta0 * h / bw_norm : 0.0;
  if (stab.enforce_theory_bounds && d > 0.0) {
    if (caps.c_max > 0.0) d = std::min(d, caps.mu / (2.0 * caps.c_max * caps.c_max));
    if (caps.degree >= 2) d = std::min(d, h * h / (2.0 * epsilon * stab.c_inv * stab.c_inv));
    d = std::min(d, dt / 4.0);
  }
  return d;
}

/// Everything a cellwise form integrates against.
struct FormContext {
  const FunctionSpace& space;
  std::span<const Vec2> coords;   // geometry of integration
  const Coefficients& coeffs;
  std::span<const Vec2> w_nodes;  // empty: stationary mesh
  std::span<const double> delta;  // per cell; empty: no stabilization
  double t = 0.0;
  int quad_order = 0;             // 0: default_quadrature_order(space)

  int order() const { return quad_order > 0 ? quad_order : default_quadrature_order(space); }
};

/// Quadrature-point data for one cell.
struct CellQuadrature {
  AffineMap map;
  int nloc = 0;
  double div_w = 0.0;
  struct Point {
    double weight;  // includes |det J|
    Vec2 x;
    Vec2 w;
    std::array<double, kMaxShape> phi;
    std::array<Vec2, kMaxShape> grad;
    std::array<double, kMaxShape> lap;
  };
  std::vector<Point> points;
};

inline CellQuadrature cell_quadrature(const FunctionSpace& space, std::span<const Vec2> coords,
                                      std::span<const Vec2> w_nodes, Index cell, int order) {
  static constexpr std::array<Vec2, 3> gl{{{-1, -1}, {1, 0}, {0, 1}}};
  CellQuadrature cq;
  cq.map = physical_map(space.cell_vertices(coords, cell), cell);
  cq.nloc = space.local_count();
  const auto& vc = space.mesh().cells()[cell];
  std::array<Vec2, 3> wv{};
  if (!w_nodes.empty()) {
    for (int i = 0; i < 3; ++i) {
      wv[i] = w_nodes[vc[i]];
      cq.div_w += dot(wv[i], cq.map.grad(gl[i]));
    }
  }
  const auto& q = quadrature(order);
  cq.points.resize(q.points.size());
  for (Index p = 0; p < q.points.size(); ++p) {
    const Vec2 xi = q.points[p];
    const auto s = space.element().eval(xi);
    auto& pt = cq.points[p];
    pt.weight = q.weights[p] * cq.map.det;
    pt.x = cq.map.point(xi);
    const double l0 = 1.0 - xi.x - xi.y;
    pt.w = l0 * wv[0] + xi.x * wv[1] + xi.y * wv[2];
    for (int i = 0; i < cq.nloc; ++i) {
      pt.phi[i] = s.value[i];
      pt.grad[i] = cq.map.grad(s.grad[i]);
      pt.lap[i] = space.degree() > 1 ? cq.map.laplacian(s.hess[i]) : 0.0;
    }
  }
  return cq;
}

/// Per-cell delta_K on the context geometry with the context's w and t.
/// |b - w|_{K,inf} is the max over the cell's quadrature points.
inline std::vector<double> compute_cell_deltas(const FunctionSpace& space, std::span<const Vec2> coords,
                                               const Coefficients& k, std::span<const Vec2> w_nodes,
                                               const Stabilization& stab, double t, double dt) {
  const Mesh& mesh = space.mesh();
  std::vector<double> d(mesh.cell_count(), 0.0);
  if (stab.delta0 == 0.0) return d;
  const int order = default_quadrature_order(space);
  for (Index cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto cq = cell_quadrature(space, coords, w_nodes, cell, order);
    double bw = 0.0, cmax = 0.0;
    for (const auto& p : cq.points) {
      bw = std::max(bw, norm(k.b(t, p.x) - p.w));
      cmax = std::max(cmax, std::abs(k.c(t, p.x)));
    }
    const double h = cell_diameter(coords, mesh.cells()[cell]);
    d[cell] = compute_delta_K(h, k.epsilon, bw, stab, dt, {cmax, k.mu, space.degree()});
  }
  return d;
}

enum FormTerms : unsigned {
  kGalerkin = 1u,      // eps (grad u, grad v) + (b . grad u, v) + (c u, v)
  kSupg = 2u,          // delta-weighted residual against (b - w) . grad v
  kMeshVelocity = 4u,  // -((div w) u + w . grad u, v)
  kAleSupg = kGalerkin | kSupg | kMeshVelocity,
  kSupgOnly = kGalerkin | kSupg,  // a_SUPG alone
};

inline CsMatrix assemble_mass(const FunctionSpace& space, std::span<const Vec2> coords, int quad_order = 0) {
  const int order = quad_order > 0 ? quad_order : default_quadrature_order(space);
  const int n = space.local_count();
  CsBuilder M(space.dof_count());
  M.reserve(space.mesh().cell_count() * static_cast<std::size_t>(n * n));
  for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
    const auto cq = cell_quadrature(space, coords, {}, cell, order);
    const auto dofs = space.cell_dofs(cell);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (const auto& p : cq.points) s += p.weight * p.phi[i] * p.phi[j];
        M.add(dofs[i], dofs[j], s);
      }
  }
  return std::move(M).build();
}

/// Operator matrix for the selected terms; rows are test functions.
inline CsMatrix assemble_operator(const FormContext& ctx, unsigned terms) {
  const auto& space = ctx.space;
  const auto& k = ctx.coeffs;
  const int n = space.local_count();
  const bool moving = !ctx.w_nodes.empty();
  CsBuilder A(space.dof_count());
  A.reserve(space.mesh().cell_count() * static_cast<std::size_t>(n * n));
  std::array<std::array<double, kMaxShape>, kMaxShape> ae{};
  for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
    const auto cq = cell_quadrature(space, ctx.coords, ctx.w_nodes, cell, ctx.order());
    const double delta = ctx.delta.empty() ? 0.0 : ctx.delta[cell];
    for (auto& row : ae) row.fill(0.0);
    for (const auto& p : cq.points) {
      const Vec2 b = k.b(ctx.t, p.x);
      const double c = k.c(ctx.t, p.x);
      const Vec2 bw = b - p.w;
      for (int j = 0; j < n; ++j) {
        const double b_grad = dot(b, p.grad[j]);
        const double bw_grad_j = dot(bw, p.grad[j]);
        const double residual = -k.epsilon * p.lap[j] + bw_grad_j + c * p.phi[j];
        const double conv_w = cq.div_w * p.phi[j] + dot(p.w, p.grad[j]);
        for (int i = 0; i < n; ++i) {
          double v = 0.0;
          if (terms & kGalerkin)
            v += k.epsilon * dot(p.grad[j], p.grad[i]) + b_grad * p.phi[i] + c * p.phi[j] * p.phi[i];
          if ((terms & kSupg) && delta != 0.0) v += delta * residual * dot(bw, p.grad[i]);
          if ((terms & kMeshVelocity) && moving) v -= conv_w * p.phi[i];
          ae[i][j] += p.weight * v;
        }
      }
    }
    const auto dofs = space.cell_dofs(cell);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A.add(dofs[i], dofs[j], ae[i][j]);
  }
  return std::move(A).build();
}

/// a_SUPG minus the conservative mesh-velocity term.
inline CsMatrix assemble_ale_supg(const FormContext& ctx) { return assemble_operator(ctx, kAleSupg); }

/// (f, v) + sum_K delta_K (f, (b - w) . grad v)_K.
inline std::vector<double> assemble_rhs(const FormContext& ctx) {
  const auto& space = ctx.space;
  const auto& k = ctx.coeffs;
  const int n = space.local_count();
  std::vector<double> F(space.dof_count(), 0.0);
  for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
    const auto cq = cell_quadrature(space, ctx.coords, ctx.w_nodes, cell, ctx.order());
    const double delta = ctx.delta.empty() ? 0.0 : ctx.delta[cell];
    const auto dofs = space.cell_dofs(cell);
    std::array<double, kMaxShape> fe{};
    for (const auto& p : cq.points) {
      const double f = k.f(ctx.t, p.x);
      if (f == 0.0) continue;
      const Vec2 bw = k.b(ctx.t, p.x) - p.w;
      for (int i = 0; i < n; ++i) fe[i] += p.weight * f * (p.phi[i] + delta * dot(bw, p.grad[i]));
    }
    for (int i = 0; i < n; ++i) F[dofs[i]] += fe[i];
  }
  return F;
}

/// (g, v) for a given function, used by the L2 projection.
inline std::vector<double> assemble_load(const FunctionSpace& space, std::span<const Vec2> coords,
                                         const std::function<double(Vec2)>& g, int quad_order = 0) {
  const int order = quad_order > 0 ? quad_order : default_quadrature_order(space) + 1;
  const int n = space.local_count();
  std::vector<double> F(space.dof_count(), 0.0);
  for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
    const auto cq = cell_quadrature(space, coords, {}, cell, std::min(order, 6));
    const auto dofs = space.cell_dofs(cell);
    for (const auto& p : cq.points) {
      const double gv = g(p.x);
      for (int i = 0; i < n; ++i) F[dofs[i]] += p.weight * gv * p.phi[i];
    }
  }
  return F;
}

// ---------------------------------------------------------------------------
// Dirichlet constraints

using Constraint = std::pair<Index, double>;

struct SparseSystem {
  CsMatrix op;
  std::vector<double> rhs;
  std::vector<Constraint> constrained;  // ascending by DOF
};

/// Constrained DOFs and values at time t on the given geometry. Every
/// boundary tag must be Dirichlet or Neumann. A DOF shared by several
/// Dirichlet tags takes the value of the smallest tag.
inline std::vector<Constraint> dirichlet_constraints(const FunctionSpace& space, const BoundaryCondition& bc,
                                                     std::span<const Vec2> coords, double t) {
  bc.validate();
  const auto x = space.dof_coordinates(coords);
  std::map<Index, double> vals;
  for (int tag : space.mesh().tags()) {
    auto it = bc.dirichlet.find(tag);
    if (it == bc.dirichlet.end()) {
      if (bc.neumann.count(tag)) continue;
      throw ConfigError("boundary tag " + std::to_string(tag) + " has no boundary condition");
    }
    for (Index d : space.boundary_dofs(tag)) vals.emplace(d, it->second(t, x[d]));
  }
  return {vals.begin(), vals.end()};
}

/// Symmetric elimination: constrained rows and columns are cleared, the
/// diagonal set to one and the rhs corrected with the eliminated columns.
/// Applying the same constraints twice changes nothing.
inline void apply_constraints(SparseSystem& sys, std::span<const Constraint> cons) {
  const Index n = sys.op.size();
  if (sys.rhs.size() != n) throw Error("apply_constraints: dimension mismatch");
  std::vector<char> is_c(n, 0);
  std::vector<double> g(n, 0.0);
  for (const auto& [d, v] : cons) {
    is_c[d] = 1;
    g[d] = v;
  }
  std::vector<std::tuple<Index, Index, double>> t;
  t.reserve(sys.op.nonzeros() + cons.size());
  const auto off = sys.op.offsets();
  const auto col = sys.op.columns();
  const auto val = sys.op.values();
  for (Index i = 0; i < n; ++i) {
    if (is_c[i]) continue;
    for (Index k = off[i]; k < off[i + 1]; ++k) {
      if (is_c[col[k]])
        sys.rhs[i] -= val[k] * g[col[k]];
      else
        t.emplace_back(i, col[k], val[k]);
    }
  }
  for (const auto& [d, v] : cons) {
    t.emplace_back(d, d, 1.0);
    sys.rhs[d] = v;
  }
  sys.op = CsMatrix::from_triplets(n, std::move(t));
  std::map<Index, double> merged(sys.constrained.begin(), sys.constrained.end());
  for (const auto& c : cons) merged[c.first] = c.second;
  sys.constrained.assign(merged.begin(), merged.end());
}

inline SparseSystem apply_dirichlet(SparseSystem sys, const FunctionSpace& space, const BoundaryCondition& bc,
                                    std::span<const Vec2> coords, double t) {
  const auto cons = dirichlet_constraints(space, bc, coords, t);
  apply_constraints(sys, cons);
  return sys;
}

}  // namespace alesupg
