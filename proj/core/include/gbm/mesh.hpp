#ifndef GBM_MESH_HPP
#define GBM_MESH_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbm {

struct Point {
  double x{0.0};
  double y{0.0};
};

struct Vec2 {
  double x{0.0};
  double y{0.0};
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

using Triangle = std::array<std::size_t, 3>;

/// Thrown for malformed or degenerate meshes.
class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/*!
 * @brief Immutable 2D conforming triangulation.
 *
 * Construction validates node indices, rejects repeated or collinear
 * vertices, and reorders every triangle counter-clockwise. An edge may be
 * shared by at most two triangles. The hanging-node part of conformity is
 * checked separately by is_conforming() since it needs a geometric search.
 */
class Triangulation {
public:
  Triangulation() = default;
  Triangulation(std::vector<Point> nodes, std::vector<Triangle> triangles);

  const std::vector<Point> &nodes() const { return m_nodes; }
  const std::vector<Triangle> &triangles() const { return m_triangles; }
  const Point &node(std::size_t i) const { return m_nodes[i]; }
  const Triangle &triangle(std::size_t t) const { return m_triangles[t]; }

  std::size_t num_nodes() const { return m_nodes.size(); }
  std::size_t num_triangles() const { return m_triangles.size(); }
  bool empty() const { return m_triangles.empty(); }

  /// Maximum element diameter (longest edge over all triangles).
  double h() const { return m_h; }

  /// Total area of all elements.
  double area() const;

  /// True when no vertex lies in the interior of a boundary edge of
  /// another triangle (no hanging nodes).
  bool is_conforming() const;

private:
  std::vector<Point> m_nodes;
  std::vector<Triangle> m_triangles;
  double m_h{0.0};
};

/// Area and constant P1 basis gradients of one element.
struct ElementGeometry {
  double area{0.0};
  std::array<Vec2, 3> grad_basis{};
};

ElementGeometry element_geometry(const Triangulation &mesh, std::size_t t);

/// Uniform right-triangle mesh of [0,lx]x[0,ly], each cell split along
/// the (i,j)-(i+1,j+1) diagonal. Node (i,j) has index j*(nx+1)+i.
Triangulation build_structured_mesh(std::size_t nx, std::size_t ny, double lx, double ly);

struct AngleReport {
  /// max over all interior angles of -cos(angle); > 0 means obtuse.
  double max_neg_cosine{-1.0};
  std::size_t worst_element{0};
  bool strictly_acute{true};
  bool non_obtuse{true};
};

AngleReport audit_angles(const Triangulation &mesh);

// ASCII mesh format: "nv nt", nv lines "x y", nt lines "i j k" (0-based).
void write_mesh(std::ostream &os, const Triangulation &mesh);
void write_mesh_file(const std::string &path, const Triangulation &mesh);
Triangulation read_mesh(std::istream &is);
Triangulation read_mesh_file(const std::string &path);

} // namespace gbm

#endif // GBM_MESH_HPP
