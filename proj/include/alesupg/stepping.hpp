#pragma once

// Fully discrete time stepping on moving meshes.
//
// Backward Euler (midpoint-GCL policy):
//   [M^{n+1}/dt + A^{n+1/2}] u^{n+1} = M^n u^n / dt + F^{n+1/2}
// Crank-Nicolson:
//   [M^{n+1}/dt + A^{n+1/2}/2] u^{n+1} = [M^n/dt - A^{n+1/2}/2] u^n + F^{n+1/2}
//
// M^k is the mass matrix on the geometry at t^k. A and F are assembled on the
// linearly interpolated midpoint geometry with data at t^{n+1/2} and the
// step's constant mesh velocity. The endpoint policy (backward Euler only)
// assembles A and F on the t^{n+1} geometry with data at t^{n+1}.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "alesupg/forms.hpp"
#include "alesupg/linalg.hpp"
#include "alesupg/motion.hpp"
#include "alesupg/space.hpp"

namespace alesupg {

enum class Scheme { backward_euler, crank_nicolson };
enum class EvalPolicy { midpoint_gcl, endpoint };

struct StepperConfig {
  Scheme scheme = Scheme::backward_euler;
  double dt = 0.01;
  EvalPolicy policy = EvalPolicy::midpoint_gcl;
  Stabilization stab;
  /// Abort (instead of warn) when the Crank-Nicolson step restriction fails.
  bool strict_cn_check = false;
  SolveOptions solve;
};

/// The data that stays fixed for a run.
struct Problem {
  const FunctionSpace& space;
  const Coefficients& coeffs;
  const BoundaryCondition& bc;
};

struct StepState {
  Index step = 0;
  double t = 0.0;
  std::vector<double> u;       // DOF vector on the geometry below
  std::vector<Vec2> coords;    // node positions at t
};

/// Assembled, unconstrained per-step system plus what produced it.
struct StepSystem {
  SparseSystem system;
  std::vector<double> delta;        // per cell
  std::vector<Vec2> eval_coords;    // geometry of A and F
  double t_eval = 0.0;
  CsMatrix operator_matrix;         // A (ALE-SUPG operator)
};

struct StepResult {
  StepState next;
  std::vector<double> delta;
  std::vector<Vec2> eval_coords;
  double t_eval = 0.0;
};

/// L2 projection of u0 onto the space on the given geometry. Constrained
/// DOFs (if any) are fixed and the projection is taken over the rest.
inline std::vector<double> project_initial(const std::function<double(Vec2)>& u0, const FunctionSpace& space,
                                           std::span<const Vec2> coords,
                                           std::span<const Constraint> constraints = {},
                                           const SolveOptions& opt = {}) {
  SparseSystem sys{assemble_mass(space, coords), assemble_load(space, coords, u0), {}};
  if (!constraints.empty()) apply_constraints(sys, constraints);
  return solve(sys.op, sys.rhs, opt);
}

inline StepSystem build_step_system(const StepState& s, const AleFrame& frame, const Problem& pb,
                                    const StepperConfig& cfg) {
  if (std::abs(frame.t_n - s.t) > 1e-12 * std::max(1.0, std::abs(s.t)) || frame.dt <= 0.0)
    throw Error("step state and frame disagree on the time level");
  if (s.u.size() != pb.space.dof_count()) throw Error("state vector does not match the DOF count");

  const bool cn = cfg.scheme == Scheme::crank_nicolson;
  if (cn && cfg.policy == EvalPolicy::endpoint)
    throw ConfigError("the endpoint evaluation policy is only defined for backward Euler");

  StepSystem out;
  if (cfg.policy == EvalPolicy::midpoint_gcl) {
    out.eval_coords = frame.midpoint();
    out.t_eval = frame.t_mid();
  } else {
    out.eval_coords = frame.coords_np1;
    out.t_eval = frame.t_np1();
  }
  const double dt = frame.dt;
  out.delta = compute_cell_deltas(pb.space, out.eval_coords, pb.coeffs, frame.w_nodes, cfg.stab, out.t_eval, dt);

  const FormContext ctx{pb.space, out.eval_coords, pb.coeffs, frame.w_nodes, out.delta, out.t_eval};
  out.operator_matrix = assemble_ale_supg(ctx);
  auto F = assemble_rhs(ctx);
  const auto M1 = assemble_mass(pb.space, frame.coords_np1);
  const auto M0 = assemble_mass(pb.space, frame.coords_n);

  const double theta = cn ? 0.5 : 1.0;
  out.system.op = combine(1.0 / dt, M1, theta, out.operator_matrix);
  const auto m0u = matvec(M0, s.u);
  std::vector<double> rhs(F.size());
  if (cn) {
    const auto au = matvec(out.operator_matrix, s.u);
    for (Index i = 0; i < rhs.size(); ++i) rhs[i] = m0u[i] / dt - 0.5 * au[i] + F[i];
  } else {
    for (Index i = 0; i < rhs.size(); ++i) rhs[i] = m0u[i] / dt + F[i];
  }
  out.system.rhs = std::move(rhs);
  return out;
}

inline StepResult advance(const StepState& s, const AleFrame& frame, const Problem& pb, const StepperConfig& cfg) {
  auto st = build_step_system(s, frame, pb, cfg);
  const auto cons = dirichlet_constraints(pb.space, pb.bc, frame.coords_np1, frame.t_np1());
  apply_constraints(st.system, cons);
  StepResult r;
  r.next.step = s.step + 1;
  r.next.t = frame.t_np1();
  r.next.coords = frame.coords_np1;
  r.next.u = solve(st.system.op, st.system.rhs, cfg.solve);
  r.delta = std::move(st.delta);
  r.eval_coords = std::move(st.eval_coords);
  r.t_eval = st.t_eval;
  return r;
}

inline StepResult backward_euler_step(const StepState& s, const AleFrame& frame, const Problem& pb,
                                      StepperConfig cfg) {
  cfg.scheme = Scheme::backward_euler;
  return advance(s, frame, pb, cfg);
}

inline StepResult crank_nicolson_step(const StepState& s, const AleFrame& frame, const Problem& pb,
                                      StepperConfig cfg) {
  cfg.scheme = Scheme::crank_nicolson;
  return advance(s, frame, pb, cfg);
}

/// Outcome of the Crank-Nicolson step restriction dt < 1 / (beta1 + beta2).
struct CnCheck {
  bool ok = true;
  double bound = std::numeric_limits<double>::infinity();
  double beta1 = 0.0;
  double beta2 = 0.0;
  double margin = std::numeric_limits<double>::infinity();  // bound - dt
};

/// beta1 = ||div w||_inf * J1 / 2 and beta2 = ||div w||_inf * J2 / 2, where
/// div w is the per-cell divergence on the midpoint geometry and J1, J2 are
/// the largest cell area ratios |K_mid| / |K_{n+1}| and |K_mid| / |K_n|.
inline CnCheck cn_timestep_check(const Mesh& mesh, const AleFrame& frame) {
  CnCheck r;
  double div_inf = 0.0;
  for (double d : frame.div_w_cells) div_inf = std::max(div_inf, std::abs(d));
  if (div_inf == 0.0) return r;
  const auto mid = frame.midpoint();
  double j1 = 0.0, j2 = 0.0;
  for (const auto& c : mesh.cells()) {
    const double am = cell_area(mid, c);
    j1 = std::max(j1, am / cell_area(frame.coords_np1, c));
    j2 = std::max(j2, am / cell_area(frame.coords_n, c));
  }
  r.beta1 = 0.5 * div_inf * j1;
  r.beta2 = 0.5 * div_inf * j2;
  r.bound = 1.0 / (r.beta1 + r.beta2);
  r.margin = r.bound - frame.dt;
  r.ok = frame.dt < r.bound;
  return r;
}

}  // namespace alesupg
