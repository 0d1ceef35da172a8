#pragma once

// Discrete ALE kinematics: per-step frames with linear-in-time node
// trajectories, piecewise-constant mesh velocity, cellwise divergence, and
// the pseudo-solid (linear elastic) mesh update.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alesupg/elements.hpp"
#include "alesupg/linalg.hpp"
#include "alesupg/mesh.hpp"

namespace alesupg {

// ---------------------------------------------------------------------------
// Analytic motion of the dilating square: x = Y (2 - cos 20 pi t).

inline double example1_scale(double t) { return 2.0 - std::cos(20.0 * std::numbers::pi * t); }

inline Vec2 example1_map(double t, const Vec2& Y) { return example1_scale(t) * Y; }

inline Vec2 example1_velocity(double t, const Vec2& x) {
  const double a = 20.0 * std::numbers::pi * t;
  return (20.0 * std::numbers::pi * std::sin(a) / (2.0 - std::cos(a))) * x;
}

/// Analytic divergence of example1_velocity (constant in space).
inline double example1_divergence(double t) {
  const double a = 20.0 * std::numbers::pi * t;
  return 2.0 * 20.0 * std::numbers::pi * std::sin(a) / (2.0 - std::cos(a));
}

// ---------------------------------------------------------------------------

/// Per-node mesh velocity (coords_np1 - coords_n) / dt.
inline std::vector<Vec2> discrete_mesh_velocity(std::span<const Vec2> coords_n, std::span<const Vec2> coords_np1,
                                                double dt) {
  if (coords_n.size() != coords_np1.size()) throw Error("discrete_mesh_velocity: coordinate arrays differ in length");
  if (!(dt > 0.0)) throw Error("discrete_mesh_velocity: dt must be positive");
  std::vector<Vec2> w(coords_n.size());
  for (Index i = 0; i < w.size(); ++i) w[i] = (coords_np1[i] - coords_n[i]) / dt;
  return w;
}

/// Cellwise divergence of the P1 interpolant of `w_nodes` on `coords`.
inline std::vector<double> divergence_w(const Mesh& mesh, std::span<const Vec2> coords, std::span<const Vec2> w_nodes) {
  if (w_nodes.size() != mesh.node_count()) throw Error("divergence_w: velocity not defined on all nodes");
  static constexpr std::array<Vec2, 3> gl{{{-1, -1}, {1, 0}, {0, 1}}};
  std::vector<double> div(mesh.cell_count());
  for (Index k = 0; k < mesh.cell_count(); ++k) {
    const auto& c = mesh.cells()[k];
    const auto map = physical_map({coords[c[0]], coords[c[1]], coords[c[2]]}, k);
    double d = 0.0;
    for (int i = 0; i < 3; ++i) d += dot(w_nodes[c[i]], map.grad(gl[i]));
    div[k] = d;
  }
  return div;
}

/// One time step of the discrete ALE map.
struct AleFrame {
  double t_n = 0.0;
  double dt = 0.0;
  std::vector<Vec2> coords_n;
  std::vector<Vec2> coords_np1;
  std::vector<Vec2> w_nodes;        // constant over the step
  std::vector<double> div_w_cells;  // on the midpoint geometry

  double t_np1() const { return t_n + dt; }
  double t_mid() const { return t_n + 0.5 * dt; }
  bool stationary() const { return coords_n == coords_np1; }
  std::vector<Vec2> midpoint() const {
    std::vector<Vec2> m(coords_n.size());
    for (Index i = 0; i < m.size(); ++i) m[i] = 0.5 * coords_n[i] + 0.5 * coords_np1[i];
    return m;
  }
};

/// Geometry at time tau in [t_n, t_n + dt]; exact at both endpoints.
inline std::vector<Vec2> interpolate_positions(const AleFrame& f, double tau) {
  const double tol = 1e-12 * std::max(1.0, std::abs(f.t_np1()));
  if (tau < f.t_n - tol || tau > f.t_np1() + tol) throw Error("interpolate_positions: tau outside the step");
  if (tau <= f.t_n) return f.coords_n;
  if (tau >= f.t_np1()) return f.coords_np1;
  const double th = (tau - f.t_n) / f.dt;
  std::vector<Vec2> x(f.coords_n.size());
  for (Index i = 0; i < x.size(); ++i) x[i] = (1.0 - th) * f.coords_n[i] + th * f.coords_np1[i];
  return x;
}

/// Builds the frame for [t_n, t_n + dt]. Cell areas are quadratic in time
/// along the linear trajectories; a nonpositive minimum anywhere in the step
/// raises TangledMeshError.
inline AleFrame make_frame(const Mesh& mesh, std::vector<Vec2> coords_n, std::vector<Vec2> coords_np1, double t_n,
                           double dt) {
  AleFrame f;
  f.t_n = t_n;
  f.dt = dt;
  f.w_nodes = discrete_mesh_velocity(coords_n, coords_np1, dt);
  f.coords_n = std::move(coords_n);
  f.coords_np1 = std::move(coords_np1);
  const auto mid = f.midpoint();
  for (Index k = 0; k < mesh.cell_count(); ++k) {
    const auto& c = mesh.cells()[k];
    const double a0 = cell_area(f.coords_n, c), am = cell_area(mid, c), a1 = cell_area(f.coords_np1, c);
    double amin = std::min({a0, am, a1});
    const double p = -3.0 * a0 + 4.0 * am - a1, q = 2.0 * a0 - 4.0 * am + 2.0 * a1;
    if (q > 0.0) {
      const double s = -p / (2.0 * q);
      if (s > 0.0 && s < 1.0) amin = std::min(amin, a0 + p * s + q * s * s);
    }
    if (!(amin > 0.0)) throw TangledMeshError("mesh tangles within step starting at t=" + std::to_string(t_n), k);
  }
  f.div_w_cells = divergence_w(mesh, mid, f.w_nodes);
  return f;
}

// ---------------------------------------------------------------------------
// Pseudo-solid mesh update

struct ElasticOptions {
  double lambda = 1.0;
  double mu = 1.0;
  /// Scale each cell's stiffness by mean_area / area so that small cells
  /// deform less.
  bool area_stiffening = true;
};

/// Displacement of every node from linear elasticity (P1 vector elements,
/// plane strain) on the geometry `coords`, with `boundary_displacement`
/// prescribed on every boundary node. Boundary values are reproduced
/// exactly. Throws TangledMeshError if the displaced mesh inverts a cell.
inline std::vector<Vec2> elastic_mesh_update(const Mesh& mesh, std::span<const Vec2> coords,
                                             std::span<const std::optional<Vec2>> boundary_displacement,
                                             const ElasticOptions& opt = {}) {
  const Index nn = mesh.node_count();
  if (boundary_displacement.size() != nn) throw Error("elastic_mesh_update: displacement array has wrong length");
  std::vector<char> fixed(nn, 0);
  for (Index v : mesh.boundary_nodes()) {
    if (!boundary_displacement[v])
      throw Error("elastic_mesh_update: no displacement given for boundary node " + std::to_string(v));
    fixed[v] = 1;
  }

  double mean_area = 0.0;
  for (const auto& c : mesh.cells()) mean_area += cell_area(coords, c);
  mean_area /= double(mesh.cell_count());

  const double l = opt.lambda, m = opt.mu;
  static constexpr std::array<Vec2, 3> gl{{{-1, -1}, {1, 0}, {0, 1}}};
  const Index n = 2 * nn;
  std::vector<double> rhs(n, 0.0);
  std::vector<double> g(n, 0.0);
  for (Index v = 0; v < nn; ++v)
    if (fixed[v]) {
      g[2 * v] = boundary_displacement[v]->x;
      g[2 * v + 1] = boundary_displacement[v]->y;
    }

  CsBuilder K(n);
  K.reserve(mesh.cell_count() * 36);
  for (Index k = 0; k < mesh.cell_count(); ++k) {
    const auto& c = mesh.cells()[k];
    const auto map = physical_map({coords[c[0]], coords[c[1]], coords[c[2]]}, k);
    const double area = 0.5 * map.det;
    const double s = opt.area_stiffening ? mean_area / area : 1.0;
    std::array<Vec2, 3> gr;
    for (int i = 0; i < 3; ++i) gr[i] = map.grad(gl[i]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        // plane-strain block for nodes a, b
        const Vec2 ga = gr[a], gb = gr[b];
        const double kxx = (l + 2 * m) * ga.x * gb.x + m * ga.y * gb.y;
        const double kxy = l * ga.x * gb.y + m * ga.y * gb.x;
        const double kyx = l * ga.y * gb.x + m * ga.x * gb.y;
        const double kyy = (l + 2 * m) * ga.y * gb.y + m * ga.x * gb.x;
        const std::array<double, 4> blk{kxx, kxy, kyx, kyy};
        for (int r = 0; r < 2; ++r)
          for (int q = 0; q < 2; ++q) {
            const Index row = 2 * c[a] + r, col = 2 * c[b] + q;
            const double val = s * area * blk[2 * r + q];
            if (fixed[row / 2]) continue;
            if (fixed[col / 2])
              rhs[row] -= val * g[col];
            else
              K.add(row, col, val);
          }
      }
  }
  for (Index v = 0; v < nn; ++v)
    if (fixed[v]) {
      for (int r = 0; r < 2; ++r) {
        K.add(2 * v + r, 2 * v + r, 1.0);
        rhs[2 * v + r] = g[2 * v + r];
      }
    }
  const auto x = solve(std::move(K).build(), rhs);

  std::vector<Vec2> disp(nn);
  std::vector<Vec2> moved(nn);
  for (Index v = 0; v < nn; ++v) {
    disp[v] = fixed[v] ? *boundary_displacement[v] : Vec2{x[2 * v], x[2 * v + 1]};
    moved[v] = coords[v] + disp[v];
  }
  const Index bad = first_inverted_cell(mesh, moved);
  if (bad != mesh.cell_count()) throw TangledMeshError("elastic mesh update inverted a cell", bad);
  return disp;
}

// ---------------------------------------------------------------------------

/// How node positions evolve in time.
struct MotionLaw {
  enum class Kind { stationary, analytic, elastic };
  Kind kind = Kind::stationary;
  /// analytic: (t, reference point) -> physical point; identity at t = 0.
  std::function<Vec2(double, Vec2)> map;
  /// elastic: (t, boundary node reference point) -> displacement from the
  /// reference position at time t.
  std::function<Vec2(double, Vec2)> boundary_displacement;
  ElasticOptions elastic;

  static MotionLaw stationary_law() { return {}; }
  static MotionLaw analytic(std::function<Vec2(double, Vec2)> m) {
    MotionLaw l;
    l.kind = Kind::analytic;
    l.map = std::move(m);
    return l;
  }
  static MotionLaw elastic_law(std::function<Vec2(double, Vec2)> bd, ElasticOptions opt = {}) {
    MotionLaw l;
    l.kind = Kind::elastic;
    l.boundary_displacement = std::move(bd);
    l.elastic = opt;
    return l;
  }
};

/// Node positions at t_n + dt given those at t_n. Analytic motion maps the
/// reference nodes; elastic motion solves on the current geometry (the
/// previous time level is the reference domain of the update).
inline std::vector<Vec2> advance_coordinates(const MotionLaw& law, const Mesh& mesh, std::span<const Vec2> coords_n,
                                             double t_n, double dt) {
  const double t1 = t_n + dt;
  switch (law.kind) {
    case MotionLaw::Kind::stationary: return {coords_n.begin(), coords_n.end()};
    case MotionLaw::Kind::analytic: {
      std::vector<Vec2> x(mesh.node_count());
      for (Index i = 0; i < x.size(); ++i) x[i] = law.map(t1, mesh.nodes()[i]);
      return x;
    }
    case MotionLaw::Kind::elastic: {
      std::vector<std::optional<Vec2>> bd(mesh.node_count());
      for (Index v : mesh.boundary_nodes()) {
        const Vec2 ref = mesh.nodes()[v];
        bd[v] = ref + law.boundary_displacement(t1, ref) - coords_n[v];
      }
      const auto d = elastic_mesh_update(mesh, coords_n, bd, law.elastic);
      std::vector<Vec2> x(mesh.node_count());
      for (Index i = 0; i < x.size(); ++i) x[i] = coords_n[i] + d[i];
      for (Index v : mesh.boundary_nodes()) x[v] = mesh.nodes()[v] + law.boundary_displacement(t1, mesh.nodes()[v]);
      return x;
    }
  }
  return {coords_n.begin(), coords_n.end()};
}

/// Node positions at time t for laws that have a closed form (stationary and
/// analytic); elastic laws start from the reference nodes.
inline std::vector<Vec2> initial_coordinates(const MotionLaw& law, const Mesh& mesh, double t0) {
  if (law.kind == MotionLaw::Kind::analytic) {
    std::vector<Vec2> x(mesh.node_count());
    for (Index i = 0; i < x.size(); ++i) x[i] = law.map(t0, mesh.nodes()[i]);
    return x;
  }
  return mesh.nodes();
}

}  // namespace alesupg
