#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "alesupg/forms.hpp"
#include "alesupg/meshgen.hpp"
#include "alesupg/motion.hpp"
#include "oracles.hpp"

using namespace alesupg;

namespace {

double max_abs_entry(const CsMatrix& A) {
  double m = 0.0;
  for (double v : A.values()) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Vec2> perturbed(const Mesh& m, double amp, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  auto x = m.nodes();
  const auto bnd = m.boundary_nodes();
  std::vector<char> on_bnd(x.size(), 0);
  for (Index v : bnd) on_bnd[v] = 1;
  for (Index i = 0; i < x.size(); ++i)
    if (!on_bnd[i]) x[i] += Vec2{u(rng), u(rng)};
  return x;
}

}  // namespace

TEST(StabilizationParameter, DeltaK) {
  Stabilization s{1.0, false, 1.0};
  EXPECT_DOUBLE_EQ(compute_delta_K(0.1, 1e-3, 1.0, s, 0.01), 0.1);
  EXPECT_DOUBLE_EQ(compute_delta_K(0.1, 1e-3, 2.0, s, 0.01), 0.05);
  EXPECT_EQ(compute_delta_K(0.1, 1.0, 1.0, s, 0.01), 0.0);   // diffusion dominated
  EXPECT_EQ(compute_delta_K(0.1, 0.1, 1.0, s, 0.01), 0.0);   // eps == h |b - w|
  EXPECT_EQ(compute_delta_K(0.1, 1e-3, 0.0, s, 0.01), 0.0);  // b == w
  s.delta0 = 0.0;
  EXPECT_EQ(compute_delta_K(0.1, 1e-3, 1.0, s, 0.01), 0.0);
}

TEST(StabilizationParameter, TheoryCaps) {
  Stabilization s{10.0, true, 2.0};
  const double inf = std::numeric_limits<double>::infinity();
  // reaction cap mu / (2 c^2)
  EXPECT_DOUBLE_EQ(compute_delta_K(0.1, 1e-6, 1.0, s, inf, {2.0, 1.0, 1}), 0.125);
  // inverse-inequality cap h^2 / (2 eps c_inv^2), P2 only
  EXPECT_DOUBLE_EQ(compute_delta_K(0.1, 1e-2, 1.0, s, inf, {0.0, 1.0, 2}), 0.01 / (2e-2 * 4.0));
  EXPECT_DOUBLE_EQ(compute_delta_K(0.1, 1e-3, 1.0, s, inf, {0.0, 1.0, 1}), 1.0);
  // time step cap dt / 4
  EXPECT_DOUBLE_EQ(compute_delta_K(0.1, 1e-3, 1.0, s, 0.02, {0.0, 1.0, 1}), 0.005);
}

TEST(Assembly, MatchesTextbookFixedDomainP1) {
  const auto mesh = channel_with_hole(300);
  const FunctionSpace space(mesh, 1);
  const Vec2 b{1.0, -0.4};
  const auto k = Coefficients::constant(2e-3, b, 0.7, 1.3, 0.5);
  const Stabilization stab{0.8, false, 1.0};
  const auto delta = compute_cell_deltas(space, mesh.nodes(), k, {}, stab, 0.0, 0.1);
  const FormContext ctx{space, mesh.nodes(), k, {}, delta, 0.0};
  const auto A = assemble_ale_supg(ctx);
  const auto F = assemble_rhs(ctx);
  const auto M = assemble_mass(space, mesh.nodes());
  const auto ref = oracle::fixed_supg_p1(mesh, 2e-3, b, 0.7, 1.3, 0.8);
  const double scale = max_abs_entry(A);
  for (const auto& [ij, v] : ref.A) EXPECT_NEAR(A(ij.first, ij.second), v, 1e-14 * scale);
  for (const auto& [ij, v] : ref.M) EXPECT_NEAR(M(ij.first, ij.second), v, 1e-15);
  EXPECT_EQ(A.nonzeros(), ref.A.size());
  for (Index i = 0; i < F.size(); ++i) EXPECT_NEAR(F[i], ref.F[i], 1e-14);
}

TEST(Assembly, MeshVelocityTermMatchesP1Oracle) {
  // -((div w) u + w . grad u, v) with w piecewise linear: on each cell
  // entry (i, j) = -(div w M_ij + sum_k M_ik w_k . grad phi_j)
  const auto mesh = unit_square(5);
  const FunctionSpace space(mesh, 1);
  const auto x = perturbed(mesh, 0.03, 9);
  std::vector<Vec2> w(mesh.node_count());
  for (Index i = 0; i < w.size(); ++i) w[i] = Vec2{std::sin(3 * x[i].y), x[i].x * x[i].y - 0.2};
  const auto k = Coefficients::constant(1.0, {0, 0}, 0.0, 0.0, 0.0);
  const auto A = assemble_operator({space, x, k, w, {}, 0.0}, kMeshVelocity);

  std::map<std::pair<Index, Index>, double> ref;
  for (const auto& c : mesh.cells()) {
    const auto g = oracle::p1_cell(x[c[0]], x[c[1]], x[c[2]]);
    double div = 0.0;
    for (int i = 0; i < 3; ++i) div += w[c[i]].x * g.grad[i].x + w[c[i]].y * g.grad[i].y;
    auto mloc = [&](int i, int j) { return g.area * (i == j ? 2.0 : 1.0) / 12.0; };
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double conv = 0.0;
        for (int q = 0; q < 3; ++q) conv += mloc(i, q) * (w[c[q]].x * g.grad[j].x + w[c[q]].y * g.grad[j].y);
        ref[{c[i], c[j]}] += -(div * mloc(i, j) + conv);
      }
  }
  const double scale = max_abs_entry(A);
  for (const auto& [ij, v] : ref) EXPECT_NEAR(A(ij.first, ij.second), v, 1e-14 * scale);
}

TEST(Assembly, SupgVanishesWhenConvectionMatchesMeshVelocity) {
  const auto mesh = unit_square(4);
  for (int deg : {1, 2}) {
    const FunctionSpace space(mesh, deg);
    const Vec2 b{0.6, -1.1};
    std::vector<Vec2> w(mesh.node_count(), b);
    const auto k = Coefficients::constant(1e-4, b, 0.0, 1.0, 0.0);
    std::vector<double> delta(mesh.cell_count(), 0.3);
    const FormContext ctx{space, mesh.nodes(), k, w, delta, 0.0};
    const auto S = assemble_operator(ctx, kSupg);
    EXPECT_LT(max_abs_entry(S), 1e-15);
    // for divergence-free w the mesh-velocity term cancels the convection term
    const auto conv = assemble_operator({space, mesh.nodes(), Coefficients::constant(0.0, b, 0.0, 0.0, 0.0), w, {}, 0.0},
                                        kGalerkin | kMeshVelocity);
    EXPECT_LT(max_abs_entry(conv), 1e-15);
    // the SUPG part of the load vanishes too
    const auto F = assemble_rhs(ctx);
    const auto F0 = assemble_rhs({space, mesh.nodes(), k, w, {}, 0.0});
    for (Index i = 0; i < F.size(); ++i) EXPECT_NEAR(F[i], F0[i], 1e-16);
  }
}

TEST(Assembly, LoadOfConstantSource) {
  const auto mesh = channel_with_hole(300);
  const FunctionSpace space(mesh, 1);
  const auto k = Coefficients::constant(1.0, {0, 0}, 0.0, 1.0, 0.0);
  const auto F = assemble_rhs({space, mesh.nodes(), k, {}, {}, 0.0});
  std::vector<double> ref(mesh.node_count(), 0.0);
  for (const auto& c : mesh.cells())
    for (Index v : c) ref[v] += cell_area(mesh.nodes(), c) / 3.0;
  for (Index i = 0; i < F.size(); ++i) EXPECT_NEAR(F[i], ref[i], 1e-15);
  double total = 0.0;
  for (double v : F) total += v;
  EXPECT_NEAR(total, mesh_area(mesh, mesh.nodes()), 1e-12);

  // P2: vertex functions integrate to zero, edge functions to |K| / 3
  const FunctionSpace p2(mesh, 2);
  const auto F2 = assemble_rhs({p2, mesh.nodes(), k, {}, {}, 0.0});
  for (Index i = 0; i < mesh.node_count(); ++i) EXPECT_NEAR(F2[i], 0.0, 1e-15);
  double total2 = 0.0;
  for (double v : F2) total2 += v;
  EXPECT_NEAR(total2, mesh_area(mesh, mesh.nodes()), 1e-12);
}

TEST(Assembly, SupgLoadTerm) {
  const auto mesh = unit_square(3);
  const FunctionSpace space(mesh, 1);
  const Vec2 b{2.0, 1.0};
  const auto k = Coefficients::constant(1e-6, b, 0.0, 1.0, 0.0);
  std::vector<double> delta(mesh.cell_count(), 0.25);
  const auto F = assemble_rhs({space, mesh.nodes(), k, {}, delta, 0.0});
  std::vector<double> ref(mesh.node_count(), 0.0);
  for (const auto& c : mesh.cells()) {
    const auto g = oracle::p1_cell(mesh.nodes()[c[0]], mesh.nodes()[c[1]], mesh.nodes()[c[2]]);
    for (int i = 0; i < 3; ++i) ref[c[i]] += g.area / 3.0 + 0.25 * g.area * (b.x * g.grad[i].x + b.y * g.grad[i].y);
  }
  for (Index i = 0; i < F.size(); ++i) EXPECT_NEAR(F[i], ref[i], 1e-15);
}

TEST(Admissibility, Reports) {
  const auto mesh = unit_square(3);
  const FunctionSpace space(mesh, 1);
  EXPECT_TRUE(check_admissibility(Coefficients::constant(1.0, {1, 0}, 1.0, 0.0, 0.5), space, mesh.nodes(), 0.0).ok);
  EXPECT_FALSE(check_admissibility(Coefficients::constant(1.0, {1, 0}, 0.0, 0.0, 0.0), space, mesh.nodes(), 0.0).ok);
  Coefficients k = Coefficients::constant(1.0, {}, 1.0, 0.0, 0.5);
  k.b = [](double, Vec2 x) { return 2.0 * x; };  // div b = 4
  const auto r = check_admissibility(k, space, mesh.nodes(), 0.0);
  EXPECT_FALSE(r.ok);
  EXPECT_NEAR(r.min_margin, -1.5, 1e-6);
}

TEST(Dirichlet, EliminationIsSymmetricAndIdempotent) {
  const auto mesh = unit_square(4);
  const FunctionSpace space(mesh, 2);
  const auto k = Coefficients::constant(1.0, {0, 0}, 1.0, 1.0, 1.0);
  SparseSystem sys{assemble_operator({space, mesh.nodes(), k, {}, {}, 0.0}, kGalerkin),
                   assemble_rhs({space, mesh.nodes(), k, {}, {}, 0.0}), {}};
  BoundaryCondition bc;
  for (int t : mesh.tags()) bc.dirichlet[t] = [](double, Vec2 x) { return x.x + 2 * x.y; };
  const auto once = apply_dirichlet(sys, space, bc, mesh.nodes(), 0.0);
  const auto twice = apply_dirichlet(once, space, bc, mesh.nodes(), 0.0);
  EXPECT_EQ(once.rhs, twice.rhs);
  EXPECT_EQ(std::vector<double>(once.op.values().begin(), once.op.values().end()),
            std::vector<double>(twice.op.values().begin(), twice.op.values().end()));
  for (Index i = 0; i < once.op.size(); ++i)
    for (Index j = 0; j < once.op.size(); ++j) EXPECT_EQ(once.op(i, j), once.op(j, i));
  const auto x = space.dof_coordinates(mesh.nodes());
  for (const auto& [d, v] : once.constrained) EXPECT_DOUBLE_EQ(v, x[d].x + 2 * x[d].y);
  EXPECT_EQ(once.constrained.size(), 32u);
}

TEST(Dirichlet, EveryTagNeedsACondition) {
  const auto mesh = unit_square(2);
  const FunctionSpace space(mesh, 1);
  BoundaryCondition bc;
  bc.dirichlet[kSquareBottom] = [](double, Vec2) { return 0.0; };
  bc.neumann = {kSquareRight, kSquareTop};
  EXPECT_THROW(dirichlet_constraints(space, bc, mesh.nodes(), 0.0), ConfigError);
  bc.neumann.insert(kSquareLeft);
  EXPECT_EQ(dirichlet_constraints(space, bc, mesh.nodes(), 0.0).size(), 3u);
  bc.neumann.insert(kSquareBottom);
  EXPECT_THROW(dirichlet_constraints(space, bc, mesh.nodes(), 0.0), ConfigError);
}

TEST(Dirichlet, ChannelTags) {
  const auto mesh = channel_with_hole(500);
  const FunctionSpace space(mesh, 2);
  BoundaryCondition bc;
  bc.dirichlet[kChannelInlet] = [](double, Vec2) { return 0.0; };
  bc.dirichlet[kChannelWall] = [](double, Vec2) { return 0.0; };
  bc.dirichlet[kChannelDisc] = [](double, Vec2) { return 1.0; };
  bc.neumann = {kChannelOutflow};
  const auto cons = dirichlet_constraints(space, bc, mesh.nodes(), 0.0);
  const auto disc = space.boundary_dofs(kChannelDisc);
  std::set<Index> expected;
  for (int t : {kChannelInlet, kChannelWall, kChannelDisc})
    for (Index d : space.boundary_dofs(t)) expected.insert(d);
  EXPECT_EQ(cons.size(), expected.size());
  Index ones = 0;
  for (const auto& [d, v] : cons) ones += v == 1.0;
  EXPECT_EQ(ones, disc.size());
  // outflow DOFs stay free, except the corners shared with the walls
  const auto x = space.dof_coordinates(mesh.nodes());
  for (Index d : space.boundary_dofs(kChannelOutflow)) {
    const bool constrained = expected.count(d) > 0;
    const Vec2 p = x[d];
    EXPECT_EQ(constrained, std::abs(std::abs(p.y) - 3.0) < 1e-12);
  }
}
