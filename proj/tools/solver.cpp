// Command-line front end.
//
//   solver run <config>
//   solver run --preset example1|example2|example2-d0.1 [--delta0 X] [--scheme be|cn]
//              [--dt X] [--T X] [--out DIR]
//   solver converge <config> --levels N
//   solver check-mesh <file>
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 IO error.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "alesupg/alesupg.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

int report_run(const alesupg::Scenario& s, const alesupg::RunReport& r) {
  std::printf("scenario        %s\n", s.name.c_str());
  std::printf("steps           %zu (t = %.6g)\n", r.steps, r.t_final);
  std::printf("||u|| initial   %.10e\n", r.l2_initial);
  std::printf("||u|| final     %.10e\n", r.l2_final);
  std::printf("bounds          [%g, %g]\n", r.bounds.first, r.bounds.second);
  std::printf("max undershoot  %.4f %%\n", r.max_undershoot_pct);
  std::printf("max overshoot   %.4f %%\n", r.max_overshoot_pct);
  std::printf("max GCL defect  %.3e\n", r.max_gcl_residual);
  std::printf("ledger          %zu violation(s)\n", r.ledger_violations);
  if (s.scheme == alesupg::Scheme::crank_nicolson)
    std::printf("CN check        %zu warning(s), smallest bound %.6g\n", r.cn_warnings, r.min_cn_bound);
  if (s.manufactured != alesupg::Manufactured::none) std::printf("L2 error        %.10e\n", r.final_error);
  std::printf("wall time       %.2f s\n", r.wall_seconds);
  for (const auto& f : r.files) std::printf("wrote           %s\n", f.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conservative ALE-SUPG solver for convection-diffusion-reaction on moving domains"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario from a config file or a preset");
  std::string config, preset, scheme, out;
  std::optional<double> delta0, dt, T;
  run->add_option("config", config, "configuration file");
  run->add_option("--preset", preset, "built-in scenario")
      ->check(CLI::IsMember({"example1", "example2", "example2-d0.1"}));
  run->add_option("--delta0", delta0, "SUPG parameter delta0");
  run->add_option("--scheme", scheme, "time scheme")->check(CLI::IsMember({"be", "cn"}));
  run->add_option("--dt", dt, "time step");
  run->add_option("--T", T, "final time");
  run->add_option("--out", out, "output directory");

  auto* conv = app.add_subcommand("converge", "manufactured-solution convergence study");
  std::string conv_config;
  std::size_t levels = 3;
  conv->add_option("config", conv_config, "configuration file")->required();
  conv->add_option("--levels", levels, "number of levels")->check(CLI::Range(2, 12));

  auto* check = app.add_subcommand("check-mesh", "validate a mesh file and print statistics");
  std::string mesh_file;
  check->add_option("file", mesh_file, "mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      if (config.empty() == preset.empty()) throw alesupg::ConfigError("give either a config file or --preset");
      alesupg::Scenario s = preset.empty() ? alesupg::parse_config(config) : alesupg::preset(preset);
      if (delta0) s.delta0 = *delta0;
      if (!scheme.empty()) s.scheme = scheme == "cn" ? alesupg::Scheme::crank_nicolson : alesupg::Scheme::backward_euler;
      if (dt) s.dt = *dt;
      if (T) {
        s.T = *T;
        std::erase_if(s.snapshots, [&](double t) { return t > s.T; });
      }
      if (!out.empty()) s.out_dir = out;
      alesupg::validate(s);
      const auto r = alesupg::run_scenario(s, {&std::cerr, true});
      return report_run(s, r);
    }
    if (*conv) {
      const auto s = alesupg::parse_config(conv_config);
      const auto table = alesupg::run_convergence_study(s, levels, {&std::cerr, false});
      alesupg::write_convergence_csv(std::cout, table);
      return kOk;
    }
    if (*check) {
      const auto mesh = alesupg::load_mesh(mesh_file);
      std::printf("nodes           %zu\n", mesh.node_count());
      std::printf("cells           %zu\n", mesh.cell_count());
      std::printf("boundary facets %zu\n", mesh.boundary_facets().size());
      std::printf("area            %.17g\n", alesupg::mesh_area(mesh, mesh.nodes()));
      std::printf("h               %.17g\n", alesupg::global_mesh_size(mesh));
      std::map<int, std::size_t> per_tag;
      for (const auto& f : mesh.boundary_facets()) ++per_tag[f.tag];
      for (const auto& [tag, n] : per_tag) std::printf("tag %-11d %zu facets\n", tag, n);
      return kOk;
    }
  } catch (const alesupg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const alesupg::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kConfig;
  } catch (const alesupg::TopologyError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return kConfig;
  } catch (const alesupg::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const alesupg::GeometryError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const alesupg::SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const alesupg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
