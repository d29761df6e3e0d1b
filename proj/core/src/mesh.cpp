#include "gbm/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

namespace gbm {

namespace {

double twice_signed_area(const Point &a, const Point &b, const Point &c) {
  return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
}

double distance(const Point &a, const Point &b) { return std::hypot(b.x - a.x, b.y - a.y); }

using Edge = std::pair<std::size_t, std::size_t>;

Edge make_edge(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

std::map<Edge, int> edge_counts(const std::vector<Triangle> &triangles) {
  std::map<Edge, int> counts;
  for (const auto &tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      ++counts[make_edge(tri[e], tri[(e + 1) % 3])];
    }
  }
  return counts;
}

} // namespace

Triangulation::Triangulation(std::vector<Point> nodes, std::vector<Triangle> triangles)
    : m_nodes(std::move(nodes)), m_triangles(std::move(triangles)) {
  const std::size_t nv = m_nodes.size();
  for (const auto &p : m_nodes) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw MeshError("mesh node has non-finite coordinates");
    }
  }
  for (std::size_t t = 0; t < m_triangles.size(); ++t) {
    auto &tri = m_triangles[t];
    for (auto v : tri) {
      if (v >= nv) {
        throw MeshError("triangle " + std::to_string(t) + " references node " + std::to_string(v) +
                        " but the mesh has " + std::to_string(nv) + " nodes");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
    }
    const Point &a = m_nodes[tri[0]];
    const Point &b = m_nodes[tri[1]];
    const Point &c = m_nodes[tri[2]];
    const double longest = std::max({distance(a, b), distance(b, c), distance(c, a)});
    const double area2 = twice_signed_area(a, b, c);
    if (!(std::abs(area2) > 1e-14 * longest * longest)) {
      throw MeshError("triangle " + std::to_string(t) + " is degenerate (zero area)");
    }
    if (area2 < 0.0) {
      std::swap(tri[1], tri[2]);
    }
    m_h = std::max(m_h, longest);
  }
  for (const auto &[edge, count] : edge_counts(m_triangles)) {
    if (count > 2) {
      throw MeshError("edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                      ") is shared by more than two triangles");
    }
  }
}

double Triangulation::area() const {
  double total = 0.0;
  for (const auto &tri : m_triangles) {
    total += 0.5 * twice_signed_area(m_nodes[tri[0]], m_nodes[tri[1]], m_nodes[tri[2]]);
  }
  return total;
}

bool Triangulation::is_conforming() const {
  // Nodes sorted by x so each boundary edge only scans its x-range.
  std::vector<std::size_t> order(m_nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return m_nodes[i].x < m_nodes[j].x; });

  for (const auto &[edge, count] : edge_counts(m_triangles)) {
    if (count != 1) {
      continue;
    }
    const Point &a = m_nodes[edge.first];
    const Point &b = m_nodes[edge.second];
    const double len2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
    const double tol = 1e-12 * std::sqrt(len2);
    const double xlo = std::min(a.x, b.x) - tol;
    const double xhi = std::max(a.x, b.x) + tol;
    auto first = std::lower_bound(order.begin(), order.end(), xlo,
                                  [&](std::size_t i, double x) { return m_nodes[i].x < x; });
    for (auto it = first; it != order.end() && m_nodes[*it].x <= xhi; ++it) {
      if (*it == edge.first || *it == edge.second) {
        continue;
      }
      const Point &p = m_nodes[*it];
      const double cross = twice_signed_area(a, b, p);
      if (std::abs(cross) > tol * std::sqrt(len2)) {
        continue;
      }
      const double s = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / len2;
      if (s > 1e-12 && s < 1.0 - 1e-12) {
        return false;
      }
    }
  }
  return true;
}

ElementGeometry element_geometry(const Triangulation &mesh, std::size_t t) {
  if (t >= mesh.num_triangles()) {
    throw MeshError("element index " + std::to_string(t) + " out of range");
  }
  const auto &tri = mesh.triangle(t);
  const Point &p0 = mesh.node(tri[0]);
  const Point &p1 = mesh.node(tri[1]);
  const Point &p2 = mesh.node(tri[2]);
  const double area2 = twice_signed_area(p0, p1, p2);
  if (!(area2 > 0.0)) {
    throw MeshError("element " + std::to_string(t) + " is degenerate");
  }
  ElementGeometry g;
  g.area = 0.5 * area2;
  g.grad_basis[0] = {(p1.y - p2.y) / area2, (p2.x - p1.x) / area2};
  g.grad_basis[1] = {(p2.y - p0.y) / area2, (p0.x - p2.x) / area2};
  g.grad_basis[2] = {(p0.y - p1.y) / area2, (p1.x - p0.x) / area2};
  return g;
}

Triangulation build_structured_mesh(std::size_t nx, std::size_t ny, double lx, double ly) {
  if (nx == 0 || ny == 0) {
    throw MeshError("structured mesh needs nx, ny >= 1");
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw MeshError("structured mesh needs positive finite lx, ly");
  }
  std::vector<Point> nodes;
  nodes.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    const double y = ly * static_cast<double>(j) / static_cast<double>(ny);
    for (std::size_t i = 0; i <= nx; ++i) {
      nodes.push_back({lx * static_cast<double>(i) / static_cast<double>(nx), y});
    }
  }
  std::vector<Triangle> triangles;
  triangles.reserve(2 * nx * ny);
  const auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Triangulation(std::move(nodes), std::move(triangles));
}

AngleReport audit_angles(const Triangulation &mesh) {
  AngleReport report;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangle(t);
    for (int k = 0; k < 3; ++k) {
      const Point &o = mesh.node(tri[k]);
      const Point &a = mesh.node(tri[(k + 1) % 3]);
      const Point &b = mesh.node(tri[(k + 2) % 3]);
      const Vec2 u{a.x - o.x, a.y - o.y};
      const Vec2 v{b.x - o.x, b.y - o.y};
      const double d = dot(u, v);
      const double neg_cos = -d / (std::hypot(u.x, u.y) * std::hypot(v.x, v.y));
      if (neg_cos > report.max_neg_cosine) {
        report.max_neg_cosine = neg_cos;
        report.worst_element = t;
      }
      // Sign decisions use the raw dot product so exact right angles
      // count as right angles.
      if (d <= 0.0) {
        report.strictly_acute = false;
      }
      if (d < 0.0) {
        report.non_obtuse = false;
      }
    }
  }
  return report;
}

void write_mesh(std::ostream &os, const Triangulation &mesh) {
  os << mesh.num_nodes() << ' ' << mesh.num_triangles() << '\n';
  char buf[64];
  const auto put = [&](double v) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    os.write(buf, end - buf);
  };
  for (const auto &p : mesh.nodes()) {
    put(p.x);
    os << ' ';
    put(p.y);
    os << '\n';
  }
  for (const auto &tri : mesh.triangles()) {
    os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
}

void write_mesh_file(const std::string &path, const Triangulation &mesh) {
  std::ofstream os(path);
  if (!os) {
    throw MeshError("cannot open mesh file for writing: " + path);
  }
  write_mesh(os, mesh);
}

Triangulation read_mesh(std::istream &is) {
  std::string line;
  std::size_t lineno = 0;
  const auto next_line = [&]() -> std::string {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        return line;
      }
    }
    throw MeshError("unexpected end of mesh file after line " + std::to_string(lineno));
  };
  std::size_t nv = 0;
  std::size_t nt = 0;
  {
    std::istringstream header(next_line());
    if (!(header >> nv >> nt)) {
      throw MeshError("line " + std::to_string(lineno) + ": expected 'nv nt'");
    }
  }
  std::vector<Point> nodes(nv);
  for (auto &p : nodes) {
    std::istringstream ls(next_line());
    std::string xs;
    std::string ys;
    if (!(ls >> xs >> ys)) {
      throw MeshError("line " + std::to_string(lineno) + ": expected 'x y'");
    }
    try {
      std::size_t used = 0;
      p.x = std::stod(xs, &used);
      if (used != xs.size()) throw std::invalid_argument(xs);
      p.y = std::stod(ys, &used);
      if (used != ys.size()) throw std::invalid_argument(ys);
    } catch (const std::exception &) {
      throw MeshError("line " + std::to_string(lineno) + ": bad coordinate");
    }
  }
  std::vector<Triangle> triangles(nt);
  for (auto &tri : triangles) {
    std::istringstream ls(next_line());
    long long i = 0;
    long long j = 0;
    long long k = 0;
    if (!(ls >> i >> j >> k) || i < 0 || j < 0 || k < 0) {
      throw MeshError("line " + std::to_string(lineno) + ": expected 'i j k' with 0-based indices");
    }
    tri = {static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k)};
  }
  return Triangulation(std::move(nodes), std::move(triangles));
}

Triangulation read_mesh_file(const std::string &path) {
  std::ifstream is(path);
  if (!is) {
    throw MeshError("cannot open mesh file: " + path);
  }
  return read_mesh(is);
}

} // namespace gbm
