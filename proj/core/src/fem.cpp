#include "gbm/fem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gbm {

namespace {

std::array<double, 9> local_stiffness(const ElementGeometry &g) {
  std::array<double, 9> k{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      k[3 * i + j] = g.area * dot(g.grad_basis[i], g.grad_basis[j]);
    }
  }
  return k;
}

std::array<double, 9> local_mass(const ElementGeometry &g) {
  std::array<double, 9> m{};
  const double off = g.area / 12.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      m[3 * i + j] = i == j ? 2.0 * off : off;
    }
  }
  return m;
}

void check_coefficients(const Triangulation &mesh, std::span<const double> coeff) {
  if (coeff.size() != mesh.num_triangles()) {
    throw DimensionError("coefficient vector has " + std::to_string(coeff.size()) +
                         " entries, mesh has " + std::to_string(mesh.num_triangles()) + " elements");
  }
  for (std::size_t t = 0; t < coeff.size(); ++t) {
    if (!(coeff[t] >= 0.0) || !std::isfinite(coeff[t])) {
      throw std::invalid_argument("element coefficient " + std::to_string(t) +
                                  " must be finite and nonnegative");
    }
  }
}

void check_field(const Triangulation &mesh, std::span<const double> field) {
  if (field.size() != mesh.num_nodes()) {
    throw DimensionError("nodal field has " + std::to_string(field.size()) + " entries, mesh has " +
                         std::to_string(mesh.num_nodes()) + " nodes");
  }
}

template <typename LocalBlock>
SparseMatrix assemble_direct(const Triangulation &mesh, std::span<const double> coeff,
                             LocalBlock block) {
  SparseMatrix a(p1_pattern(mesh));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangle(t);
    const auto local = block(element_geometry(mesh, t));
    const double c = coeff.empty() ? 1.0 : coeff[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        a.add(tri[i], tri[j], c * local[3 * i + j]);
      }
    }
  }
  return a;
}

} // namespace

double FieldNorms::h1() const { return std::sqrt(l2 * l2 + h1_seminorm * h1_seminorm); }

std::shared_ptr<const SparsityPattern> p1_pattern(const Triangulation &mesh) {
  std::vector<std::vector<std::size_t>> rows(mesh.num_nodes());
  for (std::size_t a = 0; a < rows.size(); ++a) rows[a].push_back(a);
  for (const auto &tri : mesh.triangles()) {
    for (auto a : tri) {
      rows[a].insert(rows[a].end(), tri.begin(), tri.end());
    }
  }
  return std::make_shared<SparsityPattern>(SparsityPattern::from_rows(std::move(rows)));
}

LumpedMass assemble_lumped_mass(const Triangulation &mesh) {
  LumpedMass lumped{DenseVector(mesh.num_nodes(), 0.0)};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double third = element_geometry(mesh, t).area / 3.0;
    for (auto a : mesh.triangle(t)) lumped.m[a] += third;
  }
  return lumped;
}

SparseMatrix assemble_stiffness(const Triangulation &mesh, std::span<const double> coeff) {
  check_coefficients(mesh, coeff);
  return assemble_direct(mesh, coeff, local_stiffness);
}

SparseMatrix consistent_mass(const Triangulation &mesh) {
  return assemble_direct(mesh, {}, local_mass);
}

DenseVector discrete_laplacian_apply(const LumpedMass &lumped, const SparseMatrix &unit_stiffness,
                                     std::span<const double> n) {
  if (lumped.m.size() != unit_stiffness.rows() || n.size() != lumped.m.size()) {
    throw DimensionError("discrete_laplacian_apply: dimension mismatch");
  }
  DenseVector out = spmv(unit_stiffness, n);
  for (std::size_t a = 0; a < out.size(); ++a) out[a] /= lumped.m[a];
  return out;
}

FieldNorms norms(const Triangulation &mesh, const LumpedMass &lumped, std::span<const double> field) {
  check_field(mesh, field);
  if (lumped.m.size() != field.size()) {
    throw DimensionError("norms: lumped mass length mismatch");
  }
  double h2 = 0.0;
  for (std::size_t a = 0; a < field.size(); ++a) h2 += lumped.m[a] * field[a] * field[a];
  double l2sq = 0.0;
  double gradsq = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangle(t);
    const auto g = element_geometry(mesh, t);
    const double u0 = field[tri[0]];
    const double u1 = field[tri[1]];
    const double u2 = field[tri[2]];
    const double sum = u0 + u1 + u2;
    l2sq += g.area / 12.0 * (u0 * u0 + u1 * u1 + u2 * u2 + sum * sum);
    const Vec2 grad{u0 * g.grad_basis[0].x + u1 * g.grad_basis[1].x + u2 * g.grad_basis[2].x,
                    u0 * g.grad_basis[0].y + u1 * g.grad_basis[1].y + u2 * g.grad_basis[2].y};
    gradsq += g.area * dot(grad, grad);
  }
  return {std::sqrt(h2), std::sqrt(l2sq), std::sqrt(gradsq)};
}

DenseVector element_averages(const Triangulation &mesh, std::span<const double> nodal) {
  check_field(mesh, nodal);
  DenseVector avg(mesh.num_triangles());
  for (std::size_t t = 0; t < avg.size(); ++t) {
    const auto &tri = mesh.triangle(t);
    avg[t] = (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / 3.0;
  }
  return avg;
}

FemSpace::FemSpace(Triangulation mesh) : m_mesh(std::move(mesh)), m_pattern(p1_pattern(m_mesh)) {
  const std::size_t nt = m_mesh.num_triangles();
  m_geometry.reserve(nt);
  m_slots.reserve(nt);
  m_stiffness_blocks.reserve(nt);
  m_mass_blocks.reserve(nt);
  m_lumped.m.assign(m_mesh.num_nodes(), 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto g = element_geometry(m_mesh, t);
    const auto &tri = m_mesh.triangle(t);
    std::array<std::size_t, 9> slots{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) slots[3 * i + j] = m_pattern->find(tri[i], tri[j]);
      m_lumped.m[tri[i]] += g.area / 3.0;
    }
    m_geometry.push_back(g);
    m_slots.push_back(slots);
    m_stiffness_blocks.push_back(local_stiffness(g));
    m_mass_blocks.push_back(local_mass(g));
  }
  m_consistent = assemble_blocks({}, m_mass_blocks);
  m_unit_stiffness = assemble_blocks({}, m_stiffness_blocks);
}

SparseMatrix FemSpace::assemble_blocks(std::span<const double> coeff,
                                       const std::vector<std::array<double, 9>> &blocks) const {
  SparseMatrix a(m_pattern);
  auto values = a.values();
  for (std::size_t t = 0; t < blocks.size(); ++t) {
    const double c = coeff.empty() ? 1.0 : coeff[t];
    const auto &slots = m_slots[t];
    const auto &local = blocks[t];
    for (int k = 0; k < 9; ++k) values[slots[k]] += c * local[k];
  }
  return a;
}

SparseMatrix FemSpace::stiffness(std::span<const double> coeff) const {
  check_coefficients(m_mesh, coeff);
  return assemble_blocks(coeff, m_stiffness_blocks);
}

SparseMatrix FemSpace::weighted_mass(std::span<const double> coeff) const {
  check_coefficients(m_mesh, coeff);
  return assemble_blocks(coeff, m_mass_blocks);
}

FieldNorms FemSpace::norms(std::span<const double> field) const {
  return gbm::norms(m_mesh, m_lumped, field);
}

} // namespace gbm
