#ifndef GBM_IO_HPP
#define GBM_IO_HPP

#include "gbm/mesh.hpp"
#include "gbm/model.hpp"
#include "gbm/scheme.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gbm {

/// Shortest form that is still 17 significant digits ("%.17g").
std::string format_double(double v);

inline constexpr std::string_view kStepCsvHeader =
    "step,time,minT,maxT,minN,maxN,minPhi,maxPhi,cg_iters,cg_residual,energy_acc";

std::string step_csv_row(const StepDiagnostics &d);
void write_step_csv(std::ostream &os, const std::vector<StepDiagnostics> &steps);

/// Legacy ASCII VTK unstructured grid with POINT_DATA scalars T, N, Phi.
void write_vtk(std::ostream &os, const Triangulation &mesh, const State &s);
void write_vtk_file(const std::string &path, const Triangulation &mesh, const State &s);

} // namespace gbm

#endif // GBM_IO_HPP
