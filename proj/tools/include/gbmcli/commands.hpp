#ifndef GBMCLI_COMMANDS_HPP
#define GBMCLI_COMMANDS_HPP

#include "gbm/config.hpp"
#include "gbm/scheme.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gbmcli {

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kInputError = 2 };

/// Command-line overrides applied on top of a config file or preset.
struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::size_t> snapshot_every;
  std::optional<unsigned> threads;
};

void apply_overrides(gbm::RunConfig &c, const RunOverrides &o);

/// Runs one config, writes steps.csv, summary.json and snapshots.
int cmd_run(const gbm::RunConfig &config, const RunOverrides &o, std::ostream &out, std::ostream &err);
int cmd_run_file(const std::string &path, const RunOverrides &o, std::ostream &out, std::ostream &err);

/// Runs every config of a preset into <output>/<preset>/<run>/ and writes the
/// preset-level comparison files.
int cmd_run_preset(const std::string &name, const RunOverrides &o, std::ostream &out, std::ostream &err);

/// 0 if every angle is <= 90 degrees, 1 naming the worst element, 2 on bad input.
int cmd_check_mesh(const std::string &path, std::ostream &out, std::ostream &err);

/// Joined per-step CSV of two runs; written to <output>/compare.csv or `out`.
int cmd_compare(const std::string &path_a, const std::string &path_b, const RunOverrides &o, std::ostream &out,
                std::ostream &err);

/// Writes one config file per preset run into `dir`.
int cmd_export_preset(const std::string &name, const std::string &dir, std::ostream &out, std::ostream &err);

/// Joined CSV: step,time then X_a,X_b,X_diff for each diagnostic. Throws
/// gbm::ConfigError when the step grids differ.
void write_joined_csv(std::ostream &os, const gbm::RunReport &a, const gbm::RunReport &b);

/// Envelope and equilibrium diagnostics in report mode, then summary.json.
void write_summary(const std::string &path, const gbm::RunReport &run);

int main_entry(int argc, char **argv, std::ostream &out, std::ostream &err);

} // namespace gbmcli

#endif // GBMCLI_COMMANDS_HPP
