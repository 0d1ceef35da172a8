#pragma once

// Run orchestration: frame, delta_K, assembly, constraints, solve,
// diagnostics and output for every step of a scenario, plus the
// manufactured-solution convergence harness.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "alesupg/diagnostics.hpp"
#include "alesupg/scenario.hpp"
#include "alesupg/stepping.hpp"
#include "alesupg/vtk.hpp"

namespace alesupg {

struct RunOptions {
  /// Progress and warnings; nullptr keeps the run silent.
  std::ostream* log = nullptr;
  /// Write CSV/VTK files when the scenario names an output directory.
  bool write_outputs = true;
};

struct RunReport {
  Index steps = 0;
  double t_final = 0.0;
  double l2_initial = 0.0;
  double l2_final = 0.0;
  double max_undershoot_pct = 0.0;
  double max_overshoot_pct = 0.0;
  std::pair<double, double> bounds{0.0, 1.0};
  Index ledger_violations = 0;
  Index cn_warnings = 0;
  double min_cn_bound = std::numeric_limits<double>::infinity();
  double max_gcl_residual = 0.0;
  double wall_seconds = 0.0;
  /// L2 error at t_final; NaN without a manufactured solution.
  double final_error = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<double, double>> l2_series;  // (t, ||u||) from t = 0
  std::vector<LedgerRecord> ledger;
  std::vector<LineSample> line;  // at t_final
  std::vector<double> u;
  std::vector<Vec2> coords;
  std::vector<std::string> files;
};

namespace driver_detail {

inline void write_l2_csv(const std::string& path, const std::vector<std::pair<double, double>>& series) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "step,t,l2\n";
  char buf[96];
  for (Index i = 0; i < series.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17e,%.17e\n", i, series[i].first, series[i].second);
    f << buf;
  }
  if (!f) throw IoError("failed writing " + path);
}

inline void write_line_csv(const std::string& path, const std::vector<LineSample>& line) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "x,value\n";
  char buf[96];
  for (const auto& s : line) {
    if (s.value)
      std::snprintf(buf, sizeof buf, "%.17e,%.17e\n", s.x, *s.value);
    else
      std::snprintf(buf, sizeof buf, "%.17e,nan\n", s.x);
    f << buf;
  }
  if (!f) throw IoError("failed writing " + path);
}

inline std::string step_context(Index step, double t) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "step %zu (t=%.6g): ", step, t);
  return buf;
}

}  // namespace driver_detail

/// Runs `s` on the given mesh (reference configuration).
inline RunReport run_scenario(const Scenario& s, const Mesh& mesh, const RunOptions& opt = {}) {
  using namespace driver_detail;
  validate(s);
  const auto t0 = std::chrono::steady_clock::now();

  const FunctionSpace space(mesh, s.degree);
  const auto law = build_motion(s);
  const auto coeffs = build_coefficients(s);
  const auto bc = build_boundary(s, mesh);
  const Problem pb{space, coeffs, bc};
  const StepperConfig cfg = s.stepper_config();

  if (opt.log && s.delta0 > 0.0) {
    const auto adm = check_admissibility(coeffs, space, mesh.nodes(), 0.0);
    if (!adm.ok)
      *opt.log << "warning: c - div(b)/2 >= mu > 0 does not hold (mu = " << coeffs.mu
               << ", min margin " << adm.min_margin << "); SUPG coercivity is not guaranteed\n";
  }

  StepState state;
  state.coords = initial_coordinates(law, mesh, 0.0);
  const auto cons0 = dirichlet_constraints(space, bc, state.coords, 0.0);
  state.u = project_initial(build_initial(s), space, state.coords, cons0, cfg.solve);

  RunReport rep;
  if (s.bounds) {
    rep.bounds = *s.bounds;
  } else {
    const auto [mn, mx] = std::minmax_element(state.u.begin(), state.u.end());
    rep.bounds = {*mn, *mx > *mn ? *mx : *mn + 1.0};
  }
  StabilityLedger ledger(rep.bounds.first, rep.bounds.second);

  // step count; a final partial step lands exactly on T
  Index nsteps = static_cast<Index>(std::llround(s.T / s.dt));
  if (nsteps == 0 || std::abs(double(nsteps) * s.dt - s.T) > 1e-9 * s.T)
    nsteps = static_cast<Index>(std::ceil(s.T / s.dt - 1e-9));

  std::set<Index> snap_steps;
  for (double t : s.snapshots) snap_steps.insert(std::min(nsteps, static_cast<Index>(std::llround(t / s.dt))));

  const bool outputs = opt.write_outputs && !s.out_dir.empty();
  if (outputs) {
    std::error_code ec;
    std::filesystem::create_directories(s.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + s.out_dir + ": " + ec.message());
  }
  auto out_path = [&](const std::string& file) { return (std::filesystem::path(s.out_dir) / file).string(); };
  auto snapshot = [&](const StepState& st) {
    if (!outputs || !snap_steps.count(st.step)) return;
    const auto p = out_path(snapshot_filename(s.name, st.step));
    write_vtk(p, space, st.coords, st.u);
    rep.files.push_back(p);
  };

  rep.l2_initial = l2_norm(state.u, space, state.coords);
  rep.l2_series.push_back({0.0, rep.l2_initial});
  snapshot(state);

  for (Index n = 0; n < nsteps; ++n) {
    const double dt = std::min(s.dt, s.T - state.t);
    try {
      auto next = advance_coordinates(law, mesh, state.coords, state.t, dt);
      const auto frame = make_frame(mesh, state.coords, std::move(next), state.t, dt);
      if (cfg.scheme == Scheme::crank_nicolson) {
        const auto chk = cn_timestep_check(mesh, frame);
        rep.min_cn_bound = std::min(rep.min_cn_bound, chk.bound);
        if (!chk.ok) {
          if (cfg.strict_cn_check)
            throw ConfigError("time step " + std::to_string(dt) + " violates the Crank-Nicolson bound " +
                              std::to_string(chk.bound));
          ++rep.cn_warnings;
          if (opt.log)
            *opt.log << "warning: " << step_context(n + 1, frame.t_np1()) << "dt = " << dt
                     << " exceeds the Crank-Nicolson bound " << chk.bound << "\n";
        }
      }
      auto res = advance(state, frame, pb, cfg);
      const auto& rec = ledger.record_step(state, res, frame, pb, cfg);
      rep.l2_series.push_back({res.next.t, rec.l2_np1});
      rep.max_undershoot_pct = std::max(rep.max_undershoot_pct, rec.undershoot_pct);
      rep.max_overshoot_pct = std::max(rep.max_overshoot_pct, rec.overshoot_pct);
      rep.max_gcl_residual = std::max(rep.max_gcl_residual, rec.gcl_residual);
      state = std::move(res.next);
    } catch (const TangledMeshError& e) {
      throw TangledMeshError(step_context(n + 1, state.t + dt), e);
    } catch (const GeometryError& e) {
      throw GeometryError(step_context(n + 1, state.t + dt), e);
    } catch (const SolverError& e) {
      throw SolverError(step_context(n + 1, state.t + dt) + e.what(), e.residual());
    } catch (const ConfigError& e) {
      throw ConfigError(step_context(n + 1, state.t + dt) + e.what());
    }
    snapshot(state);
    if (opt.log && (n + 1) % 100 == 0)
      *opt.log << "  step " << n + 1 << "/" << nsteps << "  t=" << state.t << "  ||u||=" << rep.l2_series.back().second
               << "\n";
  }

  rep.steps = nsteps;
  rep.t_final = state.t;
  rep.l2_final = rep.l2_series.back().second;
  rep.ledger_violations = ledger.violations();
  rep.ledger = ledger.records();
  if (s.manufactured != Manufactured::none) {
    const auto ex = manufactured_solution(s.manufactured, s.epsilon, s.b, s.c).u;
    const double tf = state.t;
    rep.final_error = l2_error(state.u, space, state.coords, [&](Vec2 x) { return ex(tf, x); });
  }
  if (s.line_y && s.line_samples > 0)
    rep.line = line_sample(state.u, space, state.coords, *s.line_y, s.line_x0, s.line_x1, s.line_samples);

  if (outputs) {
    const auto lp = out_path(s.name + "_ledger.csv");
    ledger.write_csv(lp);
    const auto sp = out_path(s.name + "_l2.csv");
    write_l2_csv(sp, rep.l2_series);
    rep.files.push_back(lp);
    rep.files.push_back(sp);
    if (!rep.line.empty()) {
      const auto pp = out_path(s.name + "_line.csv");
      write_line_csv(pp, rep.line);
      rep.files.push_back(pp);
    }
  }
  rep.u = std::move(state.u);
  rep.coords = std::move(state.coords);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline RunReport run_scenario(const Scenario& s, const RunOptions& opt = {}) {
  validate(s);
  return run_scenario(s, build_mesh(s), opt);
}

// ---------------------------------------------------------------------------
// Convergence

struct ConvergenceRow {
  Index level = 0;
  double h = 0.0;
  double dt = 0.0;
  Index dofs = 0;
  Index steps = 0;
  double error = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();  // against the previous level
};

struct ConvergenceTable {
  Convergence kind = Convergence::space;
  std::vector<ConvergenceRow> rows;
  double last_order() const { return rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().order; }
};

/// Space: the mesh is refined uniformly per level and dt = T / ceil(T /
/// (dt_scaling h^2)). Time: the mesh is fixed and dt halves per level.
/// Orders are log(e_{l-1} / e_l) / log(r_{l-1} / r_l) with r = h or dt.
inline ConvergenceTable run_convergence_study(const Scenario& tmpl, Index levels, const RunOptions& opt = {}) {
  validate(tmpl);
  if (tmpl.manufactured == Manufactured::none) throw ConfigError("convergence study needs scenario.manufactured");
  if (tmpl.convergence == Convergence::none) throw ConfigError("convergence study needs scenario.convergence");
  if (levels < 2) throw ConfigError("convergence study needs at least two levels");

  ConvergenceTable table;
  table.kind = tmpl.convergence;
  Mesh mesh = build_mesh(tmpl);
  RunOptions quiet = opt;
  quiet.write_outputs = false;
  for (Index l = 0; l < levels; ++l) {
    if (l > 0 && tmpl.convergence == Convergence::space) mesh = refine_uniform(mesh);
    Scenario s = tmpl;
    s.snapshots.clear();
    s.line_samples = 0;
    const double h = global_mesh_size(mesh);
    if (tmpl.convergence == Convergence::space) {
      const double steps = std::ceil(s.T / (tmpl.dt_scaling * h * h) - 1e-9);
      s.dt = s.T / steps;
    } else {
      s.dt = tmpl.dt / std::pow(2.0, double(l));
    }
    const auto rep = run_scenario(s, mesh, quiet);
    ConvergenceRow row;
    row.level = l;
    row.h = h;
    row.dt = s.dt;
    row.dofs = FunctionSpace(mesh, s.degree).dof_count();
    row.steps = rep.steps;
    row.error = rep.final_error;
    if (l > 0) {
      const auto& prev = table.rows.back();
      const double ratio = tmpl.convergence == Convergence::space ? prev.h / row.h : prev.dt / row.dt;
      row.order = std::log(prev.error / row.error) / std::log(ratio);
    }
    if (opt.log) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "level %zu  h=%.4e  dt=%.4e  dofs=%zu  error=%.6e  order=%.3f\n", l, row.h,
                    row.dt, row.dofs, row.error, row.order);
      *opt.log << buf;
    }
    table.rows.push_back(row);
  }
  return table;
}

inline void write_convergence_csv(std::ostream& out, const ConvergenceTable& t) {
  out << "level,h,dt,dofs,steps,error,order\n";
  char buf[192];
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17e,%.17e,%zu,%zu,%.17e,%.17e\n", r.level, r.h, r.dt, r.dofs, r.steps,
                  r.error, r.order);
    out << buf;
  }
}

}  // namespace alesupg
