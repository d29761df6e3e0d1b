#include "gbm/fem.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace gbm;
using gbm::testing::rel_diff;

namespace {

Triangulation reference_triangle() { return Triangulation({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}); }

double sum(const DenseVector &v) { return std::accumulate(v.begin(), v.end(), 0.0); }

} // namespace

TEST(LumpedMass, ReferenceTriangleGetsOneSixthPerVertex) {
  const auto m = assemble_lumped_mass(reference_triangle()).m;
  for (double v : m) EXPECT_DOUBLE_EQ(v, 1.0 / 6.0);
}

TEST(LumpedMass, InteriorNodeOfStructuredMesh) {
  const double h = 0.1;
  const auto mesh = build_structured_mesh(10, 10, 1.0, 1.0);
  const auto m = assemble_lumped_mass(mesh).m;
  EXPECT_NEAR(m[5 * 11 + 5], h * h, 1e-16);
  EXPECT_NEAR(sum(m), 1.0, 1e-14);
}

TEST(Stiffness, ZeroCoefficientGivesZeroMatrix) {
  const auto mesh = build_structured_mesh(3, 3, 1.0, 1.0);
  const auto a = assemble_stiffness(mesh, DenseVector(mesh.num_triangles(), 0.0));
  EXPECT_EQ(a.max_abs(), 0.0);
}

TEST(Stiffness, ReferenceTriangleLocalMatrix) {
  const auto a = assemble_stiffness(reference_triangle(), DenseVector{1.0});
  const double expected[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(a.at(i, j), expected[i][j]);
  }
}

TEST(Stiffness, ConstantsInKernel) {
  const auto mesh = build_structured_mesh(6, 4, 1.0, 1.0);
  const auto a = assemble_stiffness(mesh, DenseVector(mesh.num_triangles(), 1.0));
  for (double v : spmv(a, DenseVector(mesh.num_nodes(), 3.0))) EXPECT_NEAR(v, 0.0, 1e-13);
}

TEST(Stiffness, RejectsBadCoefficients) {
  const auto mesh = build_structured_mesh(2, 2, 1.0, 1.0);
  EXPECT_THROW(assemble_stiffness(mesh, DenseVector(3, 1.0)), DimensionError);
  DenseVector c(mesh.num_triangles(), 1.0);
  c[2] = -1.0;
  EXPECT_THROW(assemble_stiffness(mesh, c), std::invalid_argument);
}

TEST(ConsistentMass, ReferenceTriangleBlock) {
  const auto m = consistent_mass(reference_triangle());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(m.at(i, j), i == j ? 1.0 / 12.0 : 1.0 / 24.0);
  }
}

TEST(ConsistentMass, RowSumsAreLumpedAndTotalIsArea) {
  const auto mesh = build_structured_mesh(7, 5, 2.0, 1.0);
  const auto m = consistent_mass(mesh);
  const auto lumped = assemble_lumped_mass(mesh).m;
  const auto rows = m.row_sums();
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_LE(rel_diff(rows[i], lumped[i]), 1e-12);
  EXPECT_NEAR(sum(spmv(m, DenseVector(mesh.num_nodes(), 1.0))), 2.0, 1e-13);
}

TEST(FemSpace, CachedOperatorsMatchFreeAssembly) {
  std::mt19937_64 rng(4);
  const auto mesh = gbm::testing::jittered_lattice(rng, 6, 6, 0.1);
  const FemSpace space(mesh);
  const auto coeff = gbm::testing::random_field(rng, mesh.num_triangles(), 0.0, 2.0);
  const auto a = space.stiffness(coeff);
  const auto b = assemble_stiffness(mesh, coeff);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    for (std::size_t j = 0; j < mesh.num_nodes(); ++j) EXPECT_NEAR(a.at(i, j), b.at(i, j), 1e-14);
  }
  const auto w = space.weighted_mass(DenseVector(mesh.num_triangles(), 1.0));
  for (std::size_t k = 0; k < w.values().size(); ++k) {
    EXPECT_NEAR(w.values()[k], space.consistent_mass().values()[k], 1e-16);
  }
}

TEST(DiscreteLaplacian, ConstantsMapToZero) {
  const FemSpace space(build_structured_mesh(5, 5, 1.0, 1.0));
  const auto lap = discrete_laplacian_apply(space.lumped_mass(), space.unit_stiffness(), DenseVector(36, 2.0));
  for (double v : lap) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(DiscreteLaplacian, PairingEqualsGradientNorm) {
  std::mt19937_64 rng(8);
  const FemSpace space(gbm::testing::random_tensor_mesh(rng, 9, 7));
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = gbm::testing::random_field(rng, space.num_nodes());
    const auto lap = discrete_laplacian_apply(space.lumped_mass(), space.unit_stiffness(), n);
    double pairing = 0.0;
    for (std::size_t a = 0; a < n.size(); ++a) pairing += space.lumped_mass().m[a] * lap[a] * n[a];
    const double grad = space.norms(n).h1_seminorm;
    EXPECT_LE(rel_diff(pairing, grad * grad), 1e-12);
  }
}

// Gershgorin on m^{-1/2} A m^{-1/2} bounds ||Delta_h n||_h^2 by
// max_a (sum_b |A_ab|)/m_a * |n|_1^2, so h*||Delta_h n||_h <= C |n|_1 with
// C = h*sqrt(max_a sum_b |A_ab| / m_a).
TEST(DiscreteLaplacian, InverseInequalityWithMeshIndependentConstant) {
  std::mt19937_64 rng(12);
  std::vector<double> constants;
  for (std::size_t cells : {8u, 16u, 32u}) {
    const FemSpace space(build_structured_mesh(cells, cells, 1.0, 1.0));
    const auto &a = space.unit_stiffness();
    const auto &m = space.lumped_mass().m;
    double gersh = 0.0;
    const auto &pat = a.pattern();
    for (std::size_t i = 0; i < space.num_nodes(); ++i) {
      double row = 0.0;
      for (std::size_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1]; ++k) row += std::abs(a.values()[k]);
      gersh = std::max(gersh, row / m[i]);
    }
    const double h = 1.0 / static_cast<double>(cells);
    const double c = h * std::sqrt(gersh);
    constants.push_back(c);
    for (int trial = 0; trial < 10; ++trial) {
      const auto n = gbm::testing::random_field(rng, space.num_nodes());
      const auto lap = discrete_laplacian_apply(space.lumped_mass(), a, n);
      const double lap_h = space.norms(lap).norm_h;
      EXPECT_LE(h * lap_h, c * space.norms(n).h1() * (1.0 + 1e-12));
    }
  }
  EXPECT_NEAR(constants.front(), constants.back(), 1e-9 * constants.front());
}

TEST(Norms, ZeroAndConstantFields) {
  const FemSpace space(build_structured_mesh(6, 6, 1.0, 1.0));
  const auto z = space.norms(DenseVector(49, 0.0));
  EXPECT_EQ(z.norm_h, 0.0);
  EXPECT_EQ(z.l2, 0.0);
  EXPECT_EQ(z.h1(), 0.0);
  const auto c = space.norms(DenseVector(49, -0.7));
  EXPECT_NEAR(c.norm_h, 0.7, 1e-14);
  EXPECT_NEAR(c.l2, 0.7, 1e-14);
  EXPECT_NEAR(c.h1_seminorm, 0.0, 1e-14);
}

TEST(Norms, LinearFieldHasExactGradientNorm) {
  const FemSpace space(build_structured_mesh(5, 3, 1.0, 1.0));
  DenseVector u(space.num_nodes());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 2.0 * space.mesh().node(i).x - space.mesh().node(i).y;
  EXPECT_NEAR(space.norms(u).h1_seminorm, std::sqrt(5.0), 1e-13);
  // integral of (2x - y)^2 over the unit square = 4/3 - 1 + 1/3
  EXPECT_NEAR(space.norms(u).l2, std::sqrt(2.0 / 3.0), 1e-13);
}

// Lumped and consistent local mass satisfy M <= M_lumped <= 4 M.
TEST(Norms, LumpedAndL2NormsAreEquivalent) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const FemSpace space(gbm::testing::jittered_lattice(rng, 5, 5, 0.1));
    const auto u = gbm::testing::random_field(rng, space.num_nodes());
    const auto n = space.norms(u);
    EXPECT_LE(n.l2, n.norm_h * (1.0 + 1e-12));
    EXPECT_LE(n.norm_h, 2.0 * n.l2 * (1.0 + 1e-12));
  }
}

TEST(ElementAverages, CentroidValues) {
  const auto mesh = reference_triangle();
  const auto avg = element_averages(mesh, DenseVector{0.0, 3.0, 6.0});
  ASSERT_EQ(avg.size(), 1u);
  EXPECT_DOUBLE_EQ(avg[0], 3.0);
}
