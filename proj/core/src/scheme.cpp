#include "gbm/scheme.hpp"

#include "gbm/errors.hpp"
#include "gbm/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gbm {

std::string_view to_string(SchemeVariant v) {
  switch (v) {
  case SchemeVariant::ImexLumped:
    return "imex-lumped";
  case SchemeVariant::ExplicitLumped:
    return "explicit-lumped";
  case SchemeVariant::ImexConsistent:
    return "imex-consistent";
  }
  return "unknown";
}

SchemeVariant parse_variant(std::string_view name) {
  for (auto v : {SchemeVariant::ImexLumped, SchemeVariant::ExplicitLumped, SchemeVariant::ImexConsistent}) {
    if (name == to_string(v)) return v;
  }
  throw ConfigError("unknown scheme variant '" + std::string(name) +
                    "' (expected imex-lumped, explicit-lumped or imex-consistent)");
}

Profile Profile::constant(double v) {
  Profile p;
  p.kind = Kind::Constant;
  p.value = v;
  return p;
}

Profile Profile::gaussian(double amplitude, double cx, double cy, double width, double background) {
  Profile p;
  p.kind = Kind::Gaussian;
  p.amplitude = amplitude;
  p.center_x = cx;
  p.center_y = cy;
  p.width = width;
  p.background = background;
  return p;
}

double Profile::evaluate(const Point &x, double K) const {
  double v = value;
  if (kind == Kind::Gaussian) {
    const double dx = x.x - center_x;
    const double dy = x.y - center_y;
    v = background + amplitude * std::exp(-(dx * dx + dy * dy) / (width * width));
  }
  return std::clamp(v, 0.0, K);
}

Triangulation MeshSpec::build() const {
  if (kind == Kind::File) {
    return read_mesh_file(file);
  }
  return build_structured_mesh(nx, ny, lx, ly);
}

std::size_t RunConfig::num_steps() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("time step dt must be positive");
  }
  if (!(final_time >= 0.0) || !std::isfinite(final_time)) {
    throw ConfigError("final time must be >= 0");
  }
  const double ratio = final_time / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw ConfigError("final time is not an integral number of time steps");
  }
  return static_cast<std::size_t>(rounded);
}

void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  (void)num_steps();
  if (mesh.kind == MeshSpec::Kind::Structured && (mesh.nx == 0 || mesh.ny == 0)) {
    throw ConfigError("structured mesh needs nx, ny >= 1");
  }
  if (mesh.kind == MeshSpec::Kind::Structured && (!(mesh.lx > 0.0) || !(mesh.ly > 0.0))) {
    throw ConfigError("structured mesh needs positive lx, ly");
  }
  if (mesh.kind == MeshSpec::Kind::File && mesh.file.empty()) {
    throw ConfigError("mesh file path is empty");
  }
  if (!(solver.tol > 0.0)) {
    throw ConfigError("solver tolerance must be positive");
  }
  for (const Profile *p : {&initial.T, &initial.N, &initial.Phi}) {
    if (p->kind == Profile::Kind::Gaussian && !(p->width > 0.0)) {
      throw ConfigError("gaussian initial profile needs a positive width");
    }
  }
  if (threads == 0) {
    throw ConfigError("thread count must be >= 1");
  }
}

StepDiagnostics field_diagnostics(const State &s, double K) {
  StepDiagnostics d;
  d.step = s.step;
  d.time = s.time;
  const auto range = [](const DenseVector &v, double &lo, double &hi) {
    if (v.empty()) {
      lo = hi = 0.0;
      return;
    }
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    lo = *mn;
    hi = *mx;
  };
  range(s.T, d.min_T, d.max_T);
  range(s.N, d.min_N, d.max_N);
  range(s.Phi, d.min_Phi, d.max_Phi);
  d.lower_violation = d.min_T < 0.0 || d.min_Phi < 0.0 || d.min_N < 0.0;
  d.upper_violation = d.max_T > K || d.max_Phi > K;
  return d;
}

DenseVector element_diffusivity(const Triangulation &mesh, const State &s, const ModelParams &p) {
  const auto t_avg = element_averages(mesh, s.T);
  const auto phi_avg = element_averages(mesh, s.Phi);
  DenseVector c(mesh.num_triangles());
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = p.kappa1 * vascular_fraction(phi_avg[k], t_avg[k], p.K) + p.kappa0;
  }
  return c;
}

bool is_m_matrix(const SparseMatrix &a) {
  if (!a.is_symmetric()) return false;
  const auto &pat = a.pattern();
  const auto vals = a.values();
  for (std::size_t i = 0; i < pat.n; ++i) {
    double diag = 0.0;
    double off = 0.0;
    for (std::size_t k = pat.row_offsets[i]; k < pat.row_offsets[i + 1]; ++k) {
      if (pat.col_indices[k] == i) {
        diag = vals[k];
      } else if (vals[k] > 0.0) {
        return false;
      } else {
        off -= vals[k];
      }
    }
    if (!(diag > 0.0) || diag < off) return false;
  }
  return true;
}

Stepper::Stepper(const FemSpace &space, ModelParams params, double dt, SchemeVariant variant,
                 SolverOptions solver, unsigned threads)
    : m_space(space), m_params(params), m_dt(dt), m_variant(variant), m_solver(solver),
      m_threads(std::max(1u, threads)) {
  m_params.validate();
  if (!(dt > 0.0)) {
    throw std::invalid_argument("time step must be positive");
  }
}

std::pair<SparseMatrix, DenseVector> Stepper::tumor_system(const State &s) const {
  const auto &mesh = m_space.mesh();
  const std::size_t n = mesh.num_nodes();
  const auto &m = m_space.lumped_mass().m;
  const auto &p = m_params;

  SparseMatrix a = m_space.stiffness(element_diffusivity(mesh, s, p));
  DenseVector rhs(n);
  DenseVector decay(n, 0.0);
  DenseVector source(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (m_variant == SchemeVariant::ExplicitLumped) {
      source[i] = reactions(s.T[i], s.N[i], s.Phi[i], p).f1;
    } else {
      const auto split = imex_coefficients_T(s.T[i], s.N[i], s.Phi[i], p);
      source[i] = split.source;
      decay[i] = split.decay;
    }
  }

  if (m_variant == SchemeVariant::ImexConsistent) {
    // M/dt + A + R with R the consistent mass weighted by the element
    // average of the nodal decay; rhs = M (T^k/dt + s).
    const auto &mc = m_space.consistent_mass();
    a.add_scaled(1.0 / m_dt, mc);
    a.add_scaled(1.0, m_space.weighted_mass(element_averages(mesh, decay)));
    DenseVector nodal(n);
    for (std::size_t i = 0; i < n; ++i) nodal[i] = s.T[i] / m_dt + source[i];
    spmv(mc, nodal, rhs, m_threads);
  } else {
    DenseVector diag(n);
    for (std::size_t i = 0; i < n; ++i) {
      diag[i] = m[i] / m_dt + m[i] * decay[i];
      rhs[i] = m[i] * (s.T[i] / m_dt + source[i]);
    }
    a.add_to_diagonal(diag);
  }
  return {std::move(a), std::move(rhs)};
}

StepResult Stepper::step(const State &s) const {
  const std::size_t n = m_space.num_nodes();
  if (s.T.size() != n || s.N.size() != n || s.Phi.size() != n) {
    throw DimensionError("state length does not match the mesh");
  }
  const std::size_t next_step = s.step + 1;
  const auto &p = m_params;

  auto [a, rhs] = tumor_system(s);
  if (m_solver.check_matrix && m_variant != SchemeVariant::ImexConsistent && !is_m_matrix(a)) {
    throw SimulationError(next_step, "tumor system matrix is not an M-matrix");
  }

  CgOptions cg;
  cg.tol = m_solver.tol;
  cg.max_iterations = m_solver.max_iterations;
  cg.preconditioner = m_solver.preconditioner;
  cg.threads = m_threads;
  CgResult solved;
  try {
    solved = cg_solve(a, rhs, cg, s.T);
  } catch (const CgNotConverged &e) {
    throw SimulationError(next_step, e.what());
  }

  StepResult out;
  State &next = out.state;
  next.step = next_step;
  next.time = static_cast<double>(next_step) * m_dt;
  next.T = std::move(solved.x);
  next.Phi.resize(n);
  next.N.resize(n);

  if (m_variant == SchemeVariant::ExplicitLumped) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto f = reactions(s.T[i], s.N[i], s.Phi[i], p);
      next.Phi[i] = s.Phi[i] + m_dt * f.f3;
      next.N[i] = s.N[i] + m_dt * f.f2;
    }
  } else {
    // The consistent-mass Phi and N equations carry M on both sides, so
    // they reduce to the same nodal updates as the lumped scheme.
    for (std::size_t i = 0; i < n; ++i) {
      next.Phi[i] = update_phi_node(s.T[i], next.T[i], s.N[i], s.Phi[i], m_dt, p);
      next.N[i] = update_n_node(s.T[i], next.T[i], s.N[i], s.Phi[i], next.Phi[i], m_dt, p);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(next.T[i]) || !std::isfinite(next.N[i]) || !std::isfinite(next.Phi[i])) {
      throw SimulationError(next_step, "non-finite value at node " + std::to_string(i));
    }
  }

  out.diagnostics = field_diagnostics(next, p.K);
  out.diagnostics.cg_iterations = solved.iterations;
  out.diagnostics.cg_residual = solved.relative_residual;
  return out;
}

StepResult step_imex_lumped(const State &s, const FemSpace &space, const ModelParams &p, double dt,
                            const SolverOptions &solver) {
  return Stepper(space, p, dt, SchemeVariant::ImexLumped, solver).step(s);
}

StepResult step_explicit_lumped(const State &s, const FemSpace &space, const ModelParams &p, double dt,
                                const SolverOptions &solver) {
  return Stepper(space, p, dt, SchemeVariant::ExplicitLumped, solver).step(s);
}

StepResult step_imex_consistent(const State &s, const FemSpace &space, const ModelParams &p, double dt,
                                const SolverOptions &solver) {
  return Stepper(space, p, dt, SchemeVariant::ImexConsistent, solver).step(s);
}

State initial_state(const Triangulation &mesh, const InitialConditions &ic, double K) {
  State s;
  const std::size_t n = mesh.num_nodes();
  s.T.resize(n);
  s.N.resize(n);
  s.Phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.T[i] = ic.T.evaluate(mesh.node(i), K);
    s.N[i] = ic.N.evaluate(mesh.node(i), K);
    s.Phi[i] = ic.Phi.evaluate(mesh.node(i), K);
  }
  return s;
}

namespace {

std::string snapshot_name(std::size_t step) {
  std::ostringstream os;
  os << "snapshot_" << std::setw(6) << std::setfill('0') << step << ".vtk";
  return os.str();
}

} // namespace

RunReport run(const RunConfig &config, const StepObserver &observer) {
  config.validate();
  const std::size_t num_steps = config.num_steps();

  Triangulation mesh = config.mesh.build();
  if (mesh.empty()) {
    throw ConfigError("mesh has no elements");
  }
  RunReport report;
  report.config = config;
  report.mesh_audit = audit_angles(mesh);
  report.h = mesh.h();
  report.num_nodes = mesh.num_nodes();
  if (config.variant != SchemeVariant::ImexConsistent && !report.mesh_audit.non_obtuse) {
    throw ConfigError("mesh element " + std::to_string(report.mesh_audit.worst_element) +
                      " has an obtuse angle (-cos = " + format_double(report.mesh_audit.max_neg_cosine) +
                      "); lumped schemes require a non-obtuse triangulation");
  }
  const auto &p = config.params;
  report.dt_regime_ok = config.dt * (p.beta1 + p.beta2) * p.K < 1.0;

  const FemSpace space(std::move(mesh));
  const Stepper stepper(space, p, config.dt, config.variant, config.solver, config.threads);

  State state = initial_state(space.mesh(), config.initial, p.K);
  report.initial_state = state;
  report.steps.push_back(field_diagnostics(state, p.K));

  std::ofstream csv;
  std::filesystem::path outdir;
  const bool write = !config.output.directory.empty();
  if (write) {
    outdir = config.output.directory;
    std::filesystem::create_directories(outdir);
    csv.open(outdir / "steps.csv");
    if (!csv) {
      throw ConfigError("cannot write " + (outdir / "steps.csv").string());
    }
    csv << kStepCsvHeader << '\n' << step_csv_row(report.steps.back()) << '\n';
    if (config.output.snapshot_every > 0) {
      write_vtk_file((outdir / snapshot_name(0)).string(), space.mesh(), state);
    }
  }

  double energy = 0.0;
  for (std::size_t k = 0; k < num_steps; ++k) {
    StepResult next = stepper.step(state);
    const double h1 = space.norms(next.state.T).h1();
    energy += config.dt * h1 * h1;
    next.diagnostics.energy = energy;
    if (observer) observer(state, next.state, next.diagnostics);
    report.steps.push_back(next.diagnostics);
    if (write) {
      csv << step_csv_row(next.diagnostics) << '\n';
      const std::size_t every = config.output.snapshot_every;
      if (every > 0 && next.state.step % every == 0) {
        write_vtk_file((outdir / snapshot_name(next.state.step)).string(), space.mesh(), next.state);
      }
    }
    state = std::move(next.state);
  }
  report.energy = energy;
  report.final_state = std::move(state);
  return report;
}

} // namespace gbm
