#include "gbm/io.hpp"

#include "gbm/errors.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

namespace gbm {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, end);
}

std::string step_csv_row(const StepDiagnostics &d) {
  std::string row;
  row.reserve(256);
  row += std::to_string(d.step);
  for (double v : {d.time, d.min_T, d.max_T, d.min_N, d.max_N, d.min_Phi, d.max_Phi}) {
    row += ',';
    row += format_double(v);
  }
  row += ',';
  row += std::to_string(d.cg_iterations);
  row += ',';
  row += format_double(d.cg_residual);
  row += ',';
  row += format_double(d.energy);
  return row;
}

void write_step_csv(std::ostream &os, const std::vector<StepDiagnostics> &steps) {
  os << kStepCsvHeader << '\n';
  for (const auto &d : steps) os << step_csv_row(d) << '\n';
}

void write_vtk(std::ostream &os, const Triangulation &mesh, const State &s) {
  os << "# vtk DataFile Version 3.0\n";
  os << "gbmfem step " << s.step << " time " << format_double(s.time) << '\n';
  os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto &p : mesh.nodes()) {
    os << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
  }
  os << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto &t : mesh.triangles()) {
    os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  os << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) os << "5\n";
  os << "POINT_DATA " << mesh.num_nodes() << '\n';
  const auto field = [&](const char *name, const DenseVector &v) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) os << format_double(x) << '\n';
  };
  field("T", s.T);
  field("N", s.N);
  field("Phi", s.Phi);
}

void write_vtk_file(const std::string &path, const Triangulation &mesh, const State &s) {
  std::ofstream os(path);
  if (!os) {
    throw ConfigError("cannot open VTK file for writing: " + path);
  }
  write_vtk(os, mesh, s);
}

} // namespace gbm
