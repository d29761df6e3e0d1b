#ifndef GBM_SCHEME_HPP
#define GBM_SCHEME_HPP

#include "gbm/fem.hpp"
#include "gbm/linalg.hpp"
#include "gbm/mesh.hpp"
#include "gbm/model.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gbm {

enum class SchemeVariant {
  ImexLumped,     ///< IMEX reactions, lumped mass
  ExplicitLumped, ///< explicit reactions, implicit lumped diffusion
  ImexConsistent  ///< IMEX reactions, consistent mass
};

std::string_view to_string(SchemeVariant v);
/// Accepts "imex-lumped", "explicit-lumped", "imex-consistent".
SchemeVariant parse_variant(std::string_view name);

/// Analytic initial profile sampled at the nodes and clipped to [0,K].
struct Profile {
  enum class Kind { Constant, Gaussian };
  Kind kind{Kind::Constant};
  double value{0.0};      ///< Constant
  double background{0.0}; ///< Gaussian: background + amplitude*exp(-|x-c|^2/width^2)
  double amplitude{1.0};
  double center_x{0.5};
  double center_y{0.5};
  double width{0.1};

  static Profile constant(double v);
  static Profile gaussian(double amplitude, double cx, double cy, double width, double background = 0.0);

  double evaluate(const Point &x, double K) const;
  bool operator==(const Profile &) const = default;
};

struct InitialConditions {
  Profile T{Profile::gaussian(1.0, 0.5, 0.5, 0.1)};
  Profile N{Profile::gaussian(1.0, 0.5, 0.5, 0.05)};
  Profile Phi{Profile::constant(0.5)};
  bool operator==(const InitialConditions &) const = default;
};

struct MeshSpec {
  enum class Kind { Structured, File };
  Kind kind{Kind::Structured};
  std::size_t nx{40};
  std::size_t ny{40};
  double lx{1.0};
  double ly{1.0};
  std::string file;

  Triangulation build() const;
  bool operator==(const MeshSpec &) const = default;
};

struct SolverOptions {
  double tol{1e-10};
  std::size_t max_iterations{0}; ///< 0 means 10*n
  Preconditioner preconditioner{Preconditioner::None};
  /// Verify the M-matrix structure of every lumped system matrix.
  bool check_matrix{false};
  bool operator==(const SolverOptions &) const = default;
};

struct OutputOptions {
  std::string directory; ///< empty: nothing is written
  std::size_t snapshot_every{0};
  bool operator==(const OutputOptions &) const = default;
};

struct RunConfig {
  std::string name{"run"};
  MeshSpec mesh;
  ModelParams params;
  double dt{1e-2};
  double final_time{1.0};
  SchemeVariant variant{SchemeVariant::ImexLumped};
  InitialConditions initial;
  SolverOptions solver;
  OutputOptions output;
  unsigned threads{1};

  /// K_f = final_time / dt; throws ConfigError unless integral within 1e-9.
  std::size_t num_steps() const;
  void validate() const;
  bool operator==(const RunConfig &) const = default;
};

struct StepDiagnostics {
  std::size_t step{0};
  double time{0.0};
  double min_T{0.0};
  double max_T{0.0};
  double min_N{0.0};
  double max_N{0.0};
  double min_Phi{0.0};
  double max_Phi{0.0};
  std::size_t cg_iterations{0};
  double cg_residual{0.0};
  /// dt * sum_{j=1..step} ||T^j||_{H^1}^2
  double energy{0.0};
  bool lower_violation{false}; ///< some T, Phi or N < 0
  bool upper_violation{false}; ///< some T or Phi > K
};

StepDiagnostics field_diagnostics(const State &s, double K);

struct StepResult {
  State state;
  StepDiagnostics diagnostics;
};

/*!
 * @brief Advances one time level with the selected variant.
 *
 * T is solved first from one SPD linear system, then Phi and finally N from
 * nodal updates. The stepper keeps a reference to the FEM space.
 */
class Stepper {
public:
  Stepper(const FemSpace &space, ModelParams params, double dt, SchemeVariant variant,
          SolverOptions solver = {}, unsigned threads = 1);

  StepResult step(const State &s) const;

  /// Assembled T-system matrix and right-hand side for the given state.
  std::pair<SparseMatrix, DenseVector> tumor_system(const State &s) const;

  SchemeVariant variant() const { return m_variant; }
  double dt() const { return m_dt; }

private:
  const FemSpace &m_space;
  ModelParams m_params;
  double m_dt;
  SchemeVariant m_variant;
  SolverOptions m_solver;
  unsigned m_threads;
};

/// Per-element diffusivity kappa1*P(avg Phi, avg T) + kappa0.
DenseVector element_diffusivity(const Triangulation &mesh, const State &s, const ModelParams &p);

/// Symmetric, positive diagonal, nonpositive off-diagonals, weakly row
/// diagonally dominant.
bool is_m_matrix(const SparseMatrix &a);

StepResult step_imex_lumped(const State &s, const FemSpace &space, const ModelParams &p, double dt,
                            const SolverOptions &solver = {});
StepResult step_explicit_lumped(const State &s, const FemSpace &space, const ModelParams &p, double dt,
                                const SolverOptions &solver = {});
StepResult step_imex_consistent(const State &s, const FemSpace &space, const ModelParams &p, double dt,
                                const SolverOptions &solver = {});

State initial_state(const Triangulation &mesh, const InitialConditions &ic, double K);

struct RunReport {
  RunConfig config;
  AngleReport mesh_audit;
  double h{0.0};
  std::size_t num_nodes{0};
  std::vector<StepDiagnostics> steps; ///< steps[0] is the initial state
  State initial_state;
  State final_state;
  double energy{0.0};
  /// dt * (beta1 + beta2) * K < 1, the regime of the discrete Gronwall arguments.
  bool dt_regime_ok{true};
};

using StepObserver = std::function<void(const State &previous, const State &next, const StepDiagnostics &)>;

/// Runs K_f steps; writes CSV and VTK output when config.output.directory is set.
RunReport run(const RunConfig &config, const StepObserver &observer = {});

} // namespace gbm

#endif // GBM_SCHEME_HPP
