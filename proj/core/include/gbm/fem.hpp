#ifndef GBM_FEM_HPP
#define GBM_FEM_HPP

#include "gbm/linalg.hpp"
#include "gbm/mesh.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace gbm {

/// Diagonal of the lumped mass matrix, m_a = integral of phi_a.
struct LumpedMass {
  DenseVector m;
};

/// Node-to-node sparsity of the P1 space (each node couples to itself and
/// to every node it shares an element with).
std::shared_ptr<const SparsityPattern> p1_pattern(const Triangulation &mesh);

LumpedMass assemble_lumped_mass(const Triangulation &mesh);

/// Stiffness with one nonnegative coefficient per element:
/// A_ab = sum_K c_K * integral_K grad(phi_a).grad(phi_b).
SparseMatrix assemble_stiffness(const Triangulation &mesh, std::span<const double> coeff);

/// Standard P1 mass matrix; local block (area/12)*[[2,1,1],[1,2,1],[1,1,2]].
SparseMatrix consistent_mass(const Triangulation &mesh);

/// -Delta_h n = m^{-1} (A n) with A the unit-coefficient stiffness.
DenseVector discrete_laplacian_apply(const LumpedMass &lumped, const SparseMatrix &unit_stiffness,
                                     std::span<const double> n);

struct FieldNorms {
  double norm_h{0.0};      ///< sqrt(sum_a m_a u_a^2)
  double l2{0.0};          ///< exact L2 norm of the P1 interpolant
  double h1_seminorm{0.0}; ///< exact L2 norm of its gradient

  double h1() const;
};

FieldNorms norms(const Triangulation &mesh, const LumpedMass &lumped, std::span<const double> field);

/// Element averages of a nodal field (the centroid value of its P1 interpolant).
DenseVector element_averages(const Triangulation &mesh, std::span<const double> nodal);

/*!
 * @brief Cached P1 operators on one mesh.
 *
 * All matrices share a single sparsity pattern. Variable-coefficient
 * matrices are rebuilt from per-element local blocks through a precomputed
 * element-to-CSR slot map, in element order, so the assembly is
 * deterministic.
 */
class FemSpace {
public:
  explicit FemSpace(Triangulation mesh);

  const Triangulation &mesh() const { return m_mesh; }
  std::size_t num_nodes() const { return m_mesh.num_nodes(); }
  const std::vector<ElementGeometry> &geometry() const { return m_geometry; }
  const std::shared_ptr<const SparsityPattern> &pattern() const { return m_pattern; }

  const LumpedMass &lumped_mass() const { return m_lumped; }
  const SparseMatrix &consistent_mass() const { return m_consistent; }
  const SparseMatrix &unit_stiffness() const { return m_unit_stiffness; }

  SparseMatrix stiffness(std::span<const double> coeff) const;
  /// sum_K c_K * (local consistent mass block of K).
  SparseMatrix weighted_mass(std::span<const double> coeff) const;
  /// Zero matrix on the shared pattern.
  SparseMatrix zero_matrix() const { return SparseMatrix(m_pattern); }

  FieldNorms norms(std::span<const double> field) const;

private:
  SparseMatrix assemble_blocks(std::span<const double> coeff,
                               const std::vector<std::array<double, 9>> &blocks) const;

  Triangulation m_mesh;
  std::vector<ElementGeometry> m_geometry;
  std::shared_ptr<const SparsityPattern> m_pattern;
  std::vector<std::array<std::size_t, 9>> m_slots;
  std::vector<std::array<double, 9>> m_stiffness_blocks;
  std::vector<std::array<double, 9>> m_mass_blocks;
  LumpedMass m_lumped;
  SparseMatrix m_consistent;
  SparseMatrix m_unit_stiffness;
};

} // namespace gbm

#endif // GBM_FEM_HPP
