#pragma once

// Norms, the per-step stability ledger, over/undershoot metrics, line
// sampling and the GCL residual.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "alesupg/forms.hpp"
#include "alesupg/motion.hpp"
#include "alesupg/space.hpp"
#include "alesupg/stepping.hpp"

namespace alesupg {

namespace detail {

inline void require_size(const FunctionSpace& space, std::span<const double> u, const char* what) {
  if (u.size() != space.dof_count())
    throw Error(std::string(what) + ": field has " + std::to_string(u.size()) + " entries, expected " +
                std::to_string(space.dof_count()));
}

struct FieldAtPoint {
  double value = 0.0;
  Vec2 grad;
};

inline FieldAtPoint field_at(const CellQuadrature::Point& p, int nloc, std::span<const Index> dofs,
                             std::span<const double> u) {
  FieldAtPoint r;
  for (int i = 0; i < nloc; ++i) {
    r.value += p.phi[i] * u[dofs[i]];
    r.grad += u[dofs[i]] * p.grad[i];
  }
  return r;
}

}  // namespace detail

/// sqrt(u^T M u) with M on the given geometry.
inline double l2_norm_squared(std::span<const double> u, const FunctionSpace& space, std::span<const Vec2> coords) {
  detail::require_size(space, u, "l2_norm");
  const int order = default_quadrature_order(space);
  double s = 0.0;
  for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
    const auto cq = cell_quadrature(space, coords, {}, cell, order);
    const auto dofs = space.cell_dofs(cell);
    for (const auto& p : cq.points) {
      const double v = detail::field_at(p, cq.nloc, dofs, u).value;
      s += p.weight * v * v;
    }
  }
  return s;
}

inline double l2_norm(std::span<const double> u, const FunctionSpace& space, std::span<const Vec2> coords) {
  return std::sqrt(l2_norm_squared(u, space, coords));
}

/// ||u - exact||_{L2} on the given geometry with the highest quadrature order.
inline double l2_error(std::span<const double> u, const FunctionSpace& space, std::span<const Vec2> coords,
                       const std::function<double(Vec2)>& exact) {
  detail::require_size(space, u, "l2_error");
  double s = 0.0;
  for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
    const auto cq = cell_quadrature(space, coords, {}, cell, 6);
    const auto dofs = space.cell_dofs(cell);
    for (const auto& p : cq.points) {
      const double e = detail::field_at(p, cq.nloc, dofs, u).value - exact(p.x);
      s += p.weight * e * e;
    }
  }
  return std::sqrt(s);
}

/// The three contributions to the squared mesh-dependent norm.
struct TripleNormParts {
  double diffusion = 0.0;  // eps |u|_1^2
  double supg = 0.0;       // sum_K delta_K ||(b - w) . grad u||_K^2
  double reaction = 0.0;   // mu ||u||_0^2
  double squared() const { return diffusion + supg + reaction; }
};

inline TripleNormParts triple_norm_parts(std::span<const double> u, const FunctionSpace& space,
                                         std::span<const Vec2> coords, const Coefficients& k,
                                         std::span<const Vec2> w_nodes, std::span<const double> delta, double t) {
  detail::require_size(space, u, "triple_norm");
  if (!delta.empty() && delta.size() != space.mesh().cell_count())
    throw Error("triple_norm: delta must have one entry per cell");
  const int order = default_quadrature_order(space);
  TripleNormParts r;
  double grad2 = 0.0, l2 = 0.0;
  for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
    const auto cq = cell_quadrature(space, coords, w_nodes, cell, order);
    const auto dofs = space.cell_dofs(cell);
    const double d = delta.empty() ? 0.0 : delta[cell];
    for (const auto& p : cq.points) {
      const auto f = detail::field_at(p, cq.nloc, dofs, u);
      grad2 += p.weight * dot(f.grad, f.grad);
      l2 += p.weight * f.value * f.value;
      if (d != 0.0) {
        const double s = dot(k.b(t, p.x) - p.w, f.grad);
        r.supg += d * p.weight * s * s;
      }
    }
  }
  r.diffusion = k.epsilon * grad2;
  r.reaction = k.mu * l2;
  return r;
}

inline double triple_norm(std::span<const double> u, const FunctionSpace& space, std::span<const Vec2> coords,
                          const Coefficients& k, std::span<const Vec2> w_nodes, std::span<const double> delta,
                          double t) {
  return std::sqrt(triple_norm_parts(u, space, coords, k, w_nodes, delta, t).squared());
}

/// Excursions below lo and above hi, as percent of hi - lo.
struct Excursion {
  double undershoot_pct = 0.0;
  double overshoot_pct = 0.0;
};

inline Excursion overshoot_undershoot(std::span<const double> u, double lo, double hi) {
  if (u.empty()) throw Error("overshoot_undershoot: empty field");
  if (!(lo < hi)) throw Error("overshoot_undershoot: lower bound must be below upper bound");
  const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
  const double range = hi - lo;
  return {100.0 * std::max(0.0, lo - *mn) / range, 100.0 * std::max(0.0, *mx - hi) / range};
}

struct LineSample {
  double x = 0.0;
  std::optional<double> value;  // empty: the point is outside the domain
};

/// Locates points by walking across cell neighbors, with an exhaustive
/// search as fallback.
class PointLocator {
 public:
  PointLocator(const Mesh& mesh, std::span<const Vec2> coords)
      : mesh_(&mesh), coords_(coords), nb_(cell_neighbors(mesh)) {}

  struct Hit {
    Index cell;
    Vec2 xi;
  };

  std::optional<Hit> locate(const Vec2& x, Index start = 0) const {
    constexpr Index npos = static_cast<Index>(-1);
    Index cell = std::min(start, mesh_->cell_count() - 1);
    for (Index steps = 0; steps < mesh_->cell_count(); ++steps) {
      const auto l = barycentric(cell, x);
      int worst = 0;
      for (int i = 1; i < 3; ++i)
        if (l[i] < l[worst]) worst = i;
      if (l[worst] >= -kTol) return Hit{cell, clamp(l)};
      // the edge opposite vertex i is local edge i + 1
      const Index next = nb_[cell][(worst + 1) % 3];
      if (next == npos) break;
      cell = next;
    }
    for (Index k = 0; k < mesh_->cell_count(); ++k) {
      const auto l = barycentric(k, x);
      if (std::min({l[0], l[1], l[2]}) >= -kTol) return Hit{k, clamp(l)};
    }
    return std::nullopt;
  }

 private:
  static constexpr double kTol = 1e-12;

  std::array<double, 3> barycentric(Index k, const Vec2& x) const {
    const auto& c = mesh_->cells()[k];
    const Vec2 a = coords_[c[0]], b = coords_[c[1]], d = coords_[c[2]];
    const double area = signed_area(a, b, d);
    return {signed_area(x, b, d) / area, signed_area(a, x, d) / area, signed_area(a, b, x) / area};
  }

  static Vec2 clamp(const std::array<double, 3>& l) {
    Vec2 xi{std::max(0.0, l[1]), std::max(0.0, l[2])};
    const double s = xi.x + xi.y;
    if (s > 1.0) xi = xi / s;
    return xi;
  }

  const Mesh* mesh_;
  std::span<const Vec2> coords_;
  std::vector<std::array<Index, 3>> nb_;
};

/// n equally spaced samples of u along y = y0 for x in [x0, x1].
inline std::vector<LineSample> line_sample(std::span<const double> u, const FunctionSpace& space,
                                           std::span<const Vec2> coords, double y0, double x0, double x1, Index n) {
  detail::require_size(space, u, "line_sample");
  if (n == 0) return {};
  const PointLocator loc(space.mesh(), coords);
  std::vector<LineSample> out(n);
  Index last = 0;
  for (Index i = 0; i < n; ++i) {
    const double x = n == 1 ? x0 : x0 + (x1 - x0) * double(i) / double(n - 1);
    out[i].x = x;
    if (auto hit = loc.locate({x, y0}, last)) {
      out[i].value = evaluate_in_cell(space, u, hit->cell, hit->xi);
      last = hit->cell;
    }
  }
  return out;
}

/// |(||u||^2_{n+1} - ||u||^2_n) - dt * int_{mid} u^2 div w| / ||u||^2_n.
/// Returns the absolute defect when ||u||_n = 0.
inline double gcl_residual(const FunctionSpace& space, const AleFrame& frame, std::span<const double> u) {
  detail::require_size(space, u, "gcl_residual");
  if (frame.stationary()) return 0.0;
  const double n0 = l2_norm_squared(u, space, frame.coords_n);
  const double n1 = l2_norm_squared(u, space, frame.coords_np1);
  const auto mid = frame.midpoint();
  const int order = default_quadrature_order(space);
  double integral = 0.0;
  for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
    const auto cq = cell_quadrature(space, mid, frame.w_nodes, cell, order);
    const auto dofs = space.cell_dofs(cell);
    for (const auto& p : cq.points) {
      const double v = detail::field_at(p, cq.nloc, dofs, u).value;
      integral += p.weight * v * v * cq.div_w;
    }
  }
  const double defect = std::abs((n1 - n0) - frame.dt * integral);
  return n0 > 0.0 ? defect / n0 : defect;
}

// ---------------------------------------------------------------------------
// Stability ledger

struct LedgerRecord {
  Index step = 0;
  double t = 0.0;  // t^{n+1}
  double l2_n = 0.0;
  double l2_np1 = 0.0;
  /// BE: |||u^{n+1}|||; CN: |||u^{n+1} + u^n|||; both on the midpoint geometry.
  double triple_mid = 0.0;
  double f_term = 0.0;
  /// CN slack uses the dt/8 triple-norm coefficient; slack_quarter the dt/4
  /// one. Both are identical for BE.
  double slack = 0.0;
  double slack_quarter = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double gcl_residual = 0.0;
  double undershoot_pct = 0.0;
  double overshoot_pct = 0.0;
};

class StabilityLedger {
 public:
  StabilityLedger(double lo, double hi, double tolerance = 1e-9) : lo_(lo), hi_(hi), tol_(tolerance) {}

  /// Appends the record for the step that took `s_n` to `r.next` on `frame`.
  const LedgerRecord& record_step(const StepState& s_n, const StepResult& r, const AleFrame& frame,
                                  const Problem& pb, const StepperConfig& cfg) {
    const auto& s1 = r.next;
    if (s1.step != s_n.step + 1 || std::abs(s1.t - frame.t_np1()) > 1e-12 * std::max(1.0, std::abs(s1.t)) ||
        std::abs(s_n.t - frame.t_n) > 1e-12 * std::max(1.0, std::abs(s_n.t)))
      throw Error("record_step: states are not consecutive");
    if (!records_.empty() && s1.step <= records_.back().step) throw Error("record_step: step index did not advance");

    const auto& space = pb.space;
    const auto& k = pb.coeffs;
    const double dt = frame.dt;
    const auto mid = frame.midpoint();
    const double tm = frame.t_mid();

    LedgerRecord rec;
    rec.step = s1.step;
    rec.t = s1.t;
    const double a0 = l2_norm_squared(s_n.u, space, frame.coords_n);
    const double a1 = l2_norm_squared(s1.u, space, frame.coords_np1);
    rec.l2_n = std::sqrt(a0);
    rec.l2_np1 = std::sqrt(a1);

    const bool cn = cfg.scheme == Scheme::crank_nicolson;
    std::vector<double> probe = s1.u;
    if (cn)
      for (Index i = 0; i < probe.size(); ++i) probe[i] += s_n.u[i];
    const double tri2 = triple_norm_parts(probe, space, mid, k, frame.w_nodes, r.delta, tm).squared();
    rec.triple_mid = std::sqrt(tri2);

    // ||f||^2 on the midpoint geometry and its delta-weighted cellwise sum
    double f2 = 0.0, f2_delta = 0.0;
    const int order = default_quadrature_order(space);
    for (Index cell = 0; cell < space.mesh().cell_count(); ++cell) {
      const auto cq = cell_quadrature(space, mid, {}, cell, order);
      double fc = 0.0;
      for (const auto& p : cq.points) {
        const double f = k.f(tm, p.x);
        fc += p.weight * f * f;
      }
      f2 += fc;
      if (!r.delta.empty()) f2_delta += r.delta[cell] * fc;
    }
    const double f_mu = f2 == 0.0 ? 0.0 : (k.mu > 0.0 ? f2 / k.mu : std::numeric_limits<double>::infinity());

    const auto chk = cn_timestep_check(space.mesh(), frame);
    rec.beta1 = chk.beta1;
    rec.beta2 = chk.beta2;

    if (cn) {
      rec.f_term = dt * f_mu + dt * f2_delta;
      const double rhs = dt * rec.beta1 * a1 + (1.0 + dt * rec.beta2) * a0 + rec.f_term;
      rec.slack = rhs - (a1 + dt / 8.0 * tri2);
      rec.slack_quarter = rhs - (a1 + dt / 4.0 * tri2);
    } else {
      rec.f_term = 2.0 * dt * f_mu + 2.0 * dt * f2_delta;
      rec.slack = a0 + rec.f_term - (a1 + 0.5 * dt * tri2);
      rec.slack_quarter = rec.slack;
    }
    rec.gcl_residual = gcl_residual(space, frame, s1.u);
    const auto ex = overshoot_undershoot(s1.u, lo_, hi_);
    rec.undershoot_pct = ex.undershoot_pct;
    rec.overshoot_pct = ex.overshoot_pct;

    if (rec.slack < -tol_ * std::max(1.0, a0)) ++violations_;
    records_.push_back(rec);
    return records_.back();
  }

  const std::vector<LedgerRecord>& records() const { return records_; }
  Index violations() const { return violations_; }
  double tolerance() const { return tol_; }

  void write_csv(std::ostream& out) const {
    out << "step,t,l2_n,l2_np1,triple_mid,f_term,slack,beta1,beta2,gcl_residual,undershoot_pct,overshoot_pct\n";
    char buf[64];
    auto put = [&](double v, bool last) {
      std::snprintf(buf, sizeof buf, "%.17e", v);
      out << buf << (last ? '\n' : ',');
    };
    for (const auto& r : records_) {
      out << r.step << ',';
      put(r.t, false);
      put(r.l2_n, false);
      put(r.l2_np1, false);
      put(r.triple_mid, false);
      put(r.f_term, false);
      put(r.slack, false);
      put(r.beta1, false);
      put(r.beta2, false);
      put(r.gcl_residual, false);
      put(r.undershoot_pct, false);
      put(r.overshoot_pct, true);
    }
  }

  void write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path + " for writing");
    write_csv(f);
    if (!f) throw IoError("failed writing " + path);
  }

 private:
  double lo_, hi_, tol_;
  std::vector<LedgerRecord> records_;
  Index violations_ = 0;
};

}  // namespace alesupg
