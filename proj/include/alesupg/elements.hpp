#pragma once

// Lagrange P1/P2 reference triangles, quadrature on the reference triangle
// {xi >= 0, eta >= 0, xi + eta <= 1}, and the affine reference-to-physical
// map. Geometry is always straight-edged.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "alesupg/core.hpp"

namespace alesupg {

/// Symmetric 2x2 matrix (second derivatives).
struct Sym2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;
  double trace() const { return xx + yy; }
};

struct Mat2 {
  // column-major: a = (a00, a10), b = (a01, a11)
  double a00 = 1.0, a01 = 0.0, a10 = 0.0, a11 = 1.0;
  double det() const { return a00 * a11 - a01 * a10; }
  Vec2 operator*(const Vec2& v) const { return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y}; }
  Vec2 transpose_times(const Vec2& v) const { return {a00 * v.x + a10 * v.y, a01 * v.x + a11 * v.y}; }
};

inline constexpr int kMaxShape = 6;

/// Values, reference gradients and reference Hessians of every shape function
/// at one reference point.
struct ShapeValues {
  int count = 0;
  std::array<double, kMaxShape> value{};
  std::array<Vec2, kMaxShape> grad{};
  std::array<Sym2, kMaxShape> hess{};
};

class ReferenceElement {
 public:
  explicit ReferenceElement(int degree) : degree_(degree) {
    if (degree != 1 && degree != 2) throw Error("unsupported element degree " + std::to_string(degree));
  }

  int degree() const { return degree_; }
  int node_count() const { return degree_ == 1 ? 3 : 6; }

  /// Vertex nodes first, then midpoints of edges (0,1), (1,2), (2,0).
  static Vec2 node(int i) {
    static constexpr std::array<Vec2, 6> pts{{{0, 0}, {1, 0}, {0, 1}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}}};
    return pts.at(static_cast<std::size_t>(i));
  }

  ShapeValues eval(const Vec2& xi) const {
    constexpr double tol = 1e-12;
    if (xi.x < -tol || xi.y < -tol || xi.x + xi.y > 1.0 + tol)
      throw Error("reference point outside the reference triangle");
    const std::array<double, 3> l{1.0 - xi.x - xi.y, xi.x, xi.y};
    static constexpr std::array<Vec2, 3> gl{{{-1, -1}, {1, 0}, {0, 1}}};
    ShapeValues s;
    s.count = node_count();
    if (degree_ == 1) {
      for (int i = 0; i < 3; ++i) {
        s.value[i] = l[i];
        s.grad[i] = gl[i];
      }
      return s;
    }
    auto outer = [](const Vec2& a, const Vec2& b) {
      return Sym2{2.0 * a.x * b.x, a.x * b.y + a.y * b.x, 2.0 * a.y * b.y};
    };
    for (int i = 0; i < 3; ++i) {
      s.value[i] = l[i] * (2.0 * l[i] - 1.0);
      s.grad[i] = (4.0 * l[i] - 1.0) * gl[i];
      const Sym2 o = outer(gl[i], gl[i]);  // 2 g g^T
      s.hess[i] = {2.0 * o.xx, 2.0 * o.xy, 2.0 * o.yy};
    }
    static constexpr std::array<std::array<int, 2>, 3> edges{{{0, 1}, {1, 2}, {2, 0}}};
    for (int e = 0; e < 3; ++e) {
      const int i = edges[e][0], j = edges[e][1];
      s.value[3 + e] = 4.0 * l[i] * l[j];
      s.grad[3 + e] = 4.0 * (l[j] * gl[i] + l[i] * gl[j]);
      const Sym2 o = outer(gl[i], gl[j]);  // g_i g_j^T + g_j g_i^T
      s.hess[3 + e] = {4.0 * o.xx, 4.0 * o.xy, 4.0 * o.yy};
    }
    return s;
  }

 private:
  int degree_;
};

struct QuadratureRule {
  int degree = 0;
  std::vector<Vec2> points;
  std::vector<double> weights;  // sum to 1/2
};

/// Symmetric rules with positive weights, exact for polynomials up to
/// `order` (1..6). Order 3 requests get the 6-point degree-4 rule.
inline const QuadratureRule& quadrature(int order) {
  static const std::array<QuadratureRule, 5> rules = [] {
    std::array<QuadratureRule, 5> r;
    auto orbit3 = [](QuadratureRule& q, double a, double w) {
      const double b = 1.0 - 2.0 * a;
      for (Vec2 p : {Vec2{a, a}, Vec2{b, a}, Vec2{a, b}}) {
        q.points.push_back(p);
        q.weights.push_back(0.5 * w);
      }
    };
    auto orbit6 = [](QuadratureRule& q, double a, double b, double w) {
      const double c = 1.0 - a - b;
      for (Vec2 p : {Vec2{a, b}, Vec2{b, a}, Vec2{b, c}, Vec2{c, b}, Vec2{c, a}, Vec2{a, c}}) {
        q.points.push_back(p);
        q.weights.push_back(0.5 * w);
      }
    };
    r[0].degree = 1;
    r[0].points = {{1.0 / 3.0, 1.0 / 3.0}};
    r[0].weights = {0.5};

    r[1].degree = 2;
    orbit3(r[1], 1.0 / 6.0, 1.0 / 3.0);

    r[2].degree = 4;
    orbit3(r[2], 0.44594849091596488632, 0.22338158967801146570);
    orbit3(r[2], 0.091576213509770743460, 0.10995174365532186764);

    r[3].degree = 5;
    const double s15 = std::sqrt(15.0);
    r[3].points.push_back({1.0 / 3.0, 1.0 / 3.0});
    r[3].weights.push_back(0.5 * 9.0 / 40.0);
    orbit3(r[3], (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
    orbit3(r[3], (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);

    r[4].degree = 6;
    orbit3(r[4], 0.24928674517091042129, 0.11678627572637936603);
    orbit3(r[4], 0.063089014491502228340, 0.050844906370206816921);
    orbit6(r[4], 0.053145049844816947353, 0.31035245103378440542, 0.082851075618373575194);
    return r;
  }();
  switch (order) {
    case 1: return rules[0];
    case 2: return rules[1];
    case 3:
    case 4: return rules[2];
    case 5: return rules[3];
    case 6: return rules[4];
    default: throw Error("unsupported quadrature order " + std::to_string(order));
  }
}

/// Affine map x = v0 + J xi of a straight-edged triangle.
struct AffineMap {
  Vec2 origin;
  Mat2 jac;
  Mat2 inv;
  double det = 0.0;

  Vec2 point(const Vec2& xi) const { return origin + jac * xi; }
  /// Physical gradient from a reference gradient: J^{-T} g.
  Vec2 grad(const Vec2& g) const { return inv.transpose_times(g); }
  /// Physical Laplacian from a reference Hessian: tr(J^{-T} H J^{-1}).
  double laplacian(const Sym2& h) const {
    // sum over columns c of J^{-1} of c^T H c
    double lap = 0.0;
    for (int r = 0; r < 2; ++r) {
      const double p = r == 0 ? inv.a00 : inv.a01;
      const double q = r == 0 ? inv.a10 : inv.a11;
      lap += p * p * h.xx + 2.0 * p * q * h.xy + q * q * h.yy;
    }
    return lap;
  }
};

/// Map of the cell with vertices v[0..2]. Throws GeometryError for a
/// nonpositive determinant.
inline AffineMap physical_map(const std::array<Vec2, 3>& v, Index cell_id = 0) {
  AffineMap m;
  m.origin = v[0];
  const Vec2 e1 = v[1] - v[0], e2 = v[2] - v[0];
  m.jac = {e1.x, e2.x, e1.y, e2.y};
  m.det = m.jac.det();
  if (!(m.det > 0.0)) throw GeometryError("nonpositive Jacobian determinant", cell_id);
  const double id = 1.0 / m.det;
  m.inv = {m.jac.a11 * id, -m.jac.a01 * id, -m.jac.a10 * id, m.jac.a00 * id};
  return m;
}

}  // namespace alesupg
