#ifndef GBM_CONFIG_HPP
#define GBM_CONFIG_HPP

#include "gbm/scheme.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gbm {

/*!
 * @brief INI run configuration.
 *
 * Sections and keys (all optional, defaults from RunConfig):
 *
 *   [mesh]    type = structured|file, nx, ny, lx, ly, h, file
 *   [params]  kappa1, kappa0, rho, alpha, beta1, beta2, gamma, delta, K
 *   [time]    dt, steps, Tf
 *   [scheme]  variant = imex-lumped|explicit-lumped|imex-consistent
 *   [initial] X_kind = gaussian|constant, X_value, X_amplitude, X_cx, X_cy,
 *             X_width, X_background for X in {T, N, Phi}
 *   [solver]  tol, maxit, preconditioner = none|jacobi, check_matrix, threads
 *   [output]  name, directory, snapshot_every
 *
 * `h` sets nx = round(lx/h) and ny = round(ly/h). `steps` sets dt = Tf/steps.
 * Unknown sections or keys are errors. A relative mesh file is resolved
 * against the directory of the config file.
 */
RunConfig parse_config(std::string_view text, const std::string &source = "<config>",
                       const std::string &base_dir = "");
RunConfig load_config(const std::string &path);

/// Writes every field explicitly; parse_config(write) reproduces the config.
void write_config(std::ostream &os, const RunConfig &c);
std::string config_to_string(const RunConfig &c);

struct ExperimentPreset {
  std::string name;
  std::string description;
  std::vector<RunConfig> runs;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ExperimentPreset make_preset(std::string_view name);

/// Parameter sets of the three reference experiments.
ModelParams bounds_params();
ModelParams energy_params();
ModelParams lumping_params();

} // namespace gbm

#endif // GBM_CONFIG_HPP
