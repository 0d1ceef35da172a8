#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "alesupg/alesupg.hpp"

using namespace alesupg;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(# small fixed-mesh run
[scenario]
name = tiny
mesh = unit_square:4
T = 0.05
initial = example1
dirichlet = 1:0, 2:0, 3:0, 4:0

[coefficients]
epsilon = 0.01   # diffusion
b = 1, 0.5
c = 1
mu = 1

[stepper]
scheme = be
dt = 0.01

[stabilization]
delta0 = 1
)";

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("alesupg_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ParsesMinimalFile) {
  const auto s = parse(kMinimal);
  EXPECT_EQ(s.name, "tiny");
  EXPECT_EQ(s.mesh, "unit_square:4");
  EXPECT_EQ(s.initial, InitialKind::example1_bump);
  EXPECT_EQ(s.dirichlet.size(), 4u);
  EXPECT_EQ(s.b, (Vec2{1.0, 0.5}));
  EXPECT_DOUBLE_EQ(s.epsilon, 0.01);
  EXPECT_DOUBLE_EQ(s.dt, 0.01);
  EXPECT_EQ(s.scheme, Scheme::backward_euler);
  EXPECT_EQ(s.policy, EvalPolicy::midpoint_gcl);
}

TEST(Config, RoundTripIsExact) {
  for (auto s : {parse(kMinimal), example1_preset(), example2_preset(), preset("example2-d0.1")}) {
    s.epsilon = 0.1 + 0.2;  // not exactly representable in short decimal form
    std::ostringstream out;
    write_config(out, s);
    EXPECT_EQ(parse(out.str()), s) << out.str();
  }
}

TEST(Config, MissingTimeStepIsAConfigError) {
  try {
    parse(replace(kMinimal, "dt = 0.01\n", ""));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("stepper.dt"), std::string::npos);
  }
}

TEST(Config, MalformedInputIsAParseErrorWithLine) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of(replace(kMinimal, "c = 1\n", "colour = 1\n")), 12u);
  EXPECT_EQ(line_of(std::string(kMinimal) + "[extras]\n"), 21u);
  EXPECT_EQ(line_of(replace(kMinimal, "c = 1\n", "c = one\n")), 12u);
  EXPECT_EQ(line_of(replace(kMinimal, "c = 1\n", "c = 1\nc = 2\n")), 13u);
  EXPECT_EQ(line_of(replace(kMinimal, "scheme = be", "scheme = rk4")), 16u);
  EXPECT_EQ(line_of(replace(kMinimal, "b = 1, 0.5", "b = 1")), 11u);
  EXPECT_EQ(line_of(replace(kMinimal, "dirichlet = 1:0", "dirichlet = 1")), 7u);
  EXPECT_EQ(line_of(replace(kMinimal, "mu = 1\n", "mu 1\n")), 13u);
}

TEST(Config, SemanticChecks) {
  EXPECT_THROW(parse(replace(kMinimal, "dt = 0.01", "dt = -0.01")), ConfigError);
  EXPECT_THROW(parse(replace(kMinimal, "scheme = be", "scheme = cn\npolicy = endpoint")), ConfigError);
  EXPECT_THROW(parse(replace(kMinimal, "epsilon = 0.01", "epsilon = 0")), ConfigError);
  EXPECT_THROW(parse(replace(kMinimal, "initial = example1", "initial = manufactured")), ConfigError);
  EXPECT_THROW(parse(std::string(kMinimal) + "[output]\nsnapshots = 0.5\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string("/nonexistent/dir/x.ini")), IoError);
}

TEST(Config, ShippedSamplesParse) {
  const fs::path dir = ALESUPG_CONFIG_DIR;
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".ini") continue;
    EXPECT_NO_THROW(parse_config(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GE(n, 4);
}

TEST(Presets, ReferenceScenarios) {
  const auto e1 = preset("example1");
  EXPECT_EQ(e1.mesh, "unit_square:64");
  EXPECT_DOUBLE_EQ(e1.epsilon, 0.01);
  EXPECT_DOUBLE_EQ(e1.dt, 0.01);
  EXPECT_DOUBLE_EQ(e1.T, 1.0);
  EXPECT_EQ(e1.b, (Vec2{0, 0}));
  EXPECT_EQ(e1.c, 0.0);
  EXPECT_EQ(e1.degree, 1);
  const auto e2 = preset("example2");
  EXPECT_DOUBLE_EQ(e2.epsilon, 1e-8);
  EXPECT_DOUBLE_EQ(e2.delta0, 10.0);
  EXPECT_EQ(e2.degree, 2);
  EXPECT_EQ(e2.b, (Vec2{1, 0}));
  EXPECT_EQ(e2.neumann, (std::set<int>{kChannelOutflow}));
  EXPECT_DOUBLE_EQ(e2.dirichlet.at(kChannelDisc), 1.0);
  EXPECT_EQ(e2.snapshots, (std::vector<double>{0.05, 4.0, 7.0, 10.0}));
  EXPECT_DOUBLE_EQ(preset("example2-d0.1").delta0, 0.1);
  EXPECT_THROW(preset("example3"), ConfigError);
}

TEST(Presets, DiscMotion) {
  auto s = example2_preset();
  s.mesh = "channel:400";
  const auto mesh = build_mesh(s);
  const auto law = build_motion(s);
  const auto x = advance_coordinates(law, mesh, mesh.nodes(), 0.0, 1.25);
  for (Index v : mesh.nodes_with_tag(kChannelDisc)) {
    EXPECT_NEAR(x[v].x, mesh.nodes()[v].x, 1e-14);
    EXPECT_NEAR(x[v].y, mesh.nodes()[v].y + 0.5, 1e-14);
  }
  for (int tag : {kChannelInlet, kChannelWall, kChannelOutflow})
    for (Index v : mesh.nodes_with_tag(tag)) EXPECT_EQ(x[v], mesh.nodes()[v]);
  EXPECT_EQ(first_inverted_cell(mesh, x), mesh.cell_count());
}

TEST(Manufactured, SourcesMatchFiniteDifferences) {
  const double eps = 0.3, c = 0.7;
  const Vec2 b{1.2, -0.4};
  const double h = 1e-4, k = 1e-6;
  for (auto kind : {Manufactured::sine, Manufactured::linear, Manufactured::dilating}) {
    const auto ex = manufactured_solution(kind, eps, b, c);
    for (double t : {0.0, 0.013, 0.37})
      for (Vec2 x : {Vec2{0.3, 0.4}, Vec2{0.71, 0.18}, Vec2{1.3, 0.9}}) {
        const double ut = (ex.u(t + k, x) - ex.u(t - k, x)) / (2 * k);
        const double ux = (ex.u(t, x + Vec2{h, 0}) - ex.u(t, x - Vec2{h, 0})) / (2 * h);
        const double uy = (ex.u(t, x + Vec2{0, h}) - ex.u(t, x - Vec2{0, h})) / (2 * h);
        const double lap = (ex.u(t, x + Vec2{h, 0}) + ex.u(t, x - Vec2{h, 0}) + ex.u(t, x + Vec2{0, h}) +
                            ex.u(t, x - Vec2{0, h}) - 4.0 * ex.u(t, x)) /
                           (h * h);
        const double f = ut - eps * lap + b.x * ux + b.y * uy + c * ex.u(t, x);
        EXPECT_NEAR(ex.f(t, x), f, 1e-4 * (1.0 + std::abs(f)));
      }
  }
}

TEST(Driver, SingleStepRun) {
  auto s = parse(kMinimal);
  s.T = s.dt;
  const auto r = run_scenario(s);
  EXPECT_EQ(r.steps, 1u);
  EXPECT_EQ(r.ledger.size(), 1u);
  EXPECT_EQ(r.l2_series.size(), 2u);
  EXPECT_DOUBLE_EQ(r.t_final, 0.01);
  EXPECT_TRUE(std::isnan(r.final_error));
}

TEST(Driver, PartialFinalStepLandsOnT) {
  auto s = parse(kMinimal);
  s.T = 0.025;
  const auto r = run_scenario(s);
  EXPECT_EQ(r.steps, 3u);
  EXPECT_NEAR(r.t_final, 0.025, 1e-15);
}

TEST(Driver, DeterministicAndWritesOutputs) {
  auto s = parse(kMinimal);
  s.motion = MotionKind::example1;
  s.snapshots = {0.0, 0.02, 0.05};
  s.line_y = 0.5;
  s.line_samples = 11;
  const auto dir = scratch_dir("driver");
  s.out_dir = dir.string();
  const auto a = run_scenario(s);
  s.out_dir.clear();
  const auto b = run_scenario(s);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.l2_series, b.l2_series);
  EXPECT_EQ(a.ledger_violations, 0u);
  EXPECT_LT(a.max_gcl_residual, 1e-12);
  EXPECT_TRUE(b.files.empty());

  for (const char* f : {"tiny_t000000.vtk", "tiny_t000002.vtk", "tiny_t000005.vtk", "tiny_ledger.csv", "tiny_l2.csv",
                        "tiny_line.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::ifstream l2(dir / "tiny_l2.csv");
  std::string header;
  std::getline(l2, header);
  EXPECT_EQ(header, "step,t,l2");
  int rows = 0;
  for (std::string line; std::getline(l2, line);) ++rows;
  EXPECT_EQ(rows, 6);
  fs::remove_all(dir);
}

TEST(Driver, ConvergenceStudyOnLinearSolution) {
  // the linear-in-space solution is reproduced exactly in space, so a BE
  // study sees first-order error in time
  std::ifstream in(std::string(ALESUPG_CONFIG_DIR) + "/mms_time_be.ini");
  auto s = parse_config(static_cast<std::istream&>(in));
  s.T = 0.1;
  const auto t = run_convergence_study(s, 3);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(t.rows[1].dt, 0.5 * t.rows[0].dt);
  EXPECT_NEAR(t.last_order(), 1.0, 0.15);
  std::ostringstream csv;
  write_convergence_csv(csv, t);
  EXPECT_EQ(csv.str().substr(0, 31), "level,h,dt,dofs,steps,error,ord");
  s.convergence = Convergence::none;
  EXPECT_THROW(run_convergence_study(s, 3), ConfigError);
}

TEST(Driver, ErrorsNameTheStep) {
  auto s = parse(kMinimal);
  s.motion = MotionKind::example1;
  s.scheme = Scheme::crank_nicolson;
  s.strict_cn_check = true;
  s.dt = 0.02;
  s.T = 0.1;
  try {
    run_scenario(s);
    FAIL() << "expected the strict Crank-Nicolson check to fire";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("step "), std::string::npos);
  }
  s.strict_cn_check = false;
  const auto r = run_scenario(s);
  EXPECT_GT(r.cn_warnings, 0u);
}

TEST(Vtk, FileLayout) {
  const auto m = Mesh::create({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}},
                              {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}, {{3, 0}, 1}});
  const FunctionSpace p1(m, 1), p2(m, 2);
  std::ostringstream a, b;
  write_vtk(a, p1, m.nodes(), std::vector<double>{1, 2, 3, 4});
  EXPECT_NE(a.str().find("POINTS 4 double"), std::string::npos);
  EXPECT_NE(a.str().find("CELLS 2 8"), std::string::npos);
  EXPECT_NE(a.str().find("POINT_DATA 4"), std::string::npos);
  write_vtk(b, p2, m.nodes(), std::vector<double>(p2.dof_count(), 0.5));
  EXPECT_NE(b.str().find("POINTS " + std::to_string(p2.dof_count()) + " double"), std::string::npos);
  EXPECT_NE(b.str().find("CELLS 8 32"), std::string::npos);
  EXPECT_THROW(write_vtk(a, p1, m.nodes(), std::vector<double>{1, 2}), Error);
  EXPECT_EQ(snapshot_filename("example2", 400), "example2_t000400.vtk");
}
