#include "gbmcli/commands.hpp"

#include "gbm/diagnostics.hpp"
#include "gbm/errors.hpp"
#include "gbm/io.hpp"
#include "gbm/linalg.hpp"
#include "gbm/mesh.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

namespace gbmcli {

namespace fs = std::filesystem;
using namespace gbm;

namespace {

constexpr double kEquilibriumTol = 1e-6;
constexpr const char *kDefaultOutput = "gbmsim-output";

/// Maps the library's exception families onto exit codes.
template <typename F> int guarded(std::ostream &err, F &&body) {
  try {
    return body();
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const MeshError &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DimensionError &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const SimulationError &e) {
    err << "simulation failed at " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const DiagnosticFailure &e) {
    err << "diagnostic failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::filesystem::filesystem_error &e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

void print_run_line(std::ostream &out, const RunReport &r) {
  double min_T = 0.0;
  double max_T = 0.0;
  for (const auto &d : r.steps) {
    min_T = std::min(min_T, d.min_T);
    max_T = std::max(max_T, d.max_T);
  }
  out << r.config.name << ": " << to_string(r.config.variant) << ", " << r.num_nodes << " nodes, "
      << (r.steps.size() - 1) << " steps, min T " << format_double(min_T) << ", max T " << format_double(max_T)
      << ", energy " << format_double(r.energy) << '\n';
}

RunReport run_into(RunConfig config, const fs::path &dir) {
  config.output.directory = dir.string();
  RunReport r = run(config);
  write_summary((dir / "summary.json").string(), r);
  return r;
}

} // namespace

void apply_overrides(RunConfig &c, const RunOverrides &o) {
  if (o.output_dir) c.output.directory = *o.output_dir;
  if (o.snapshot_every) c.output.snapshot_every = *o.snapshot_every;
  if (o.threads) c.threads = *o.threads;
}

void write_summary(const std::string &path, const RunReport &run) {
  std::vector<EnvelopeReport> envelopes;
  envelopes.push_back(envelope_check_far(run, run.config.params, 0.0, CheckMode::Report));
  const double eps = run.config.params.K - run.steps.front().min_N;
  envelopes.push_back(envelope_check_near_K(run, run.config.params, eps, CheckMode::Report));
  write_run_summary(path, run, envelopes, classify_equilibrium(run.final_state, run.config.params, kEquilibriumTol));
}

int cmd_run(const RunConfig &config, const RunOverrides &o, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    RunConfig c = config;
    apply_overrides(c, o);
    if (c.output.directory.empty()) c.output.directory = kDefaultOutput;
    const RunReport r = run_into(c, c.output.directory);
    print_run_line(out, r);
    return int{kSuccess};
  });
}

int cmd_run_file(const std::string &path, const RunOverrides &o, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] { return cmd_run(load_config(path), o, out, err); });
}

int cmd_run_preset(const std::string &name, const RunOverrides &o, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    const ExperimentPreset preset = make_preset(name);
    const fs::path root = fs::path(o.output_dir.value_or(kDefaultOutput)) / preset.name;
    std::vector<RunReport> reports;
    for (RunConfig c : preset.runs) {
      apply_overrides(c, o);
      reports.push_back(run_into(c, root / c.name));
      print_run_line(out, reports.back());
    }
    if (preset.name == "energy-sweep") {
      std::ofstream csv(root / "energy.csv");
      if (!csv) throw ConfigError("cannot write " + (root / "energy.csv").string());
      csv << "kf,dt,imex_energy,explicit_energy\n";
      const std::size_t half = reports.size() / 2;
      for (std::size_t i = 0; i < half; ++i) {
        const auto &a = reports[i];
        const auto &b = reports[half + i];
        csv << a.config.num_steps() << ',' << format_double(a.config.dt) << ',' << format_double(a.energy) << ','
            << format_double(b.energy) << '\n';
      }
    } else {
      std::ofstream csv(root / "compare.csv");
      if (!csv) throw ConfigError("cannot write " + (root / "compare.csv").string());
      write_joined_csv(csv, reports[0], reports[1]);
    }
    out << "wrote " << root.string() << '\n';
    return int{kSuccess};
  });
}

int cmd_check_mesh(const std::string &path, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    const Triangulation mesh = read_mesh_file(path);
    const AngleReport a = audit_angles(mesh);
    if (a.non_obtuse) {
      out << path << ": " << mesh.num_triangles() << " elements, non-obtuse"
          << (a.strictly_acute ? " (strictly acute)" : "") << '\n';
      return int{kSuccess};
    }
    err << path << ": element " << a.worst_element << " has an obtuse angle (-cos = "
        << format_double(a.max_neg_cosine) << ")\n";
    return int{kNumericalFailure};
  });
}

void write_joined_csv(std::ostream &os, const RunReport &a, const RunReport &b) {
  if (a.steps.size() != b.steps.size()) {
    throw ConfigError("runs have different numbers of steps (" + std::to_string(a.steps.size() - 1) + " vs " +
                      std::to_string(b.steps.size() - 1) + ")");
  }
  if (a.num_nodes != b.num_nodes || !(a.config.mesh == b.config.mesh)) {
    throw ConfigError("runs use different meshes");
  }
  struct Column {
    const char *name;
    double StepDiagnostics::*field;
  };
  static constexpr Column columns[] = {
      {"minT", &StepDiagnostics::min_T},     {"maxT", &StepDiagnostics::max_T},
      {"minN", &StepDiagnostics::min_N},     {"maxN", &StepDiagnostics::max_N},
      {"minPhi", &StepDiagnostics::min_Phi}, {"maxPhi", &StepDiagnostics::max_Phi},
      {"energy", &StepDiagnostics::energy},
  };
  os << "step,time";
  for (const auto &c : columns) os << ',' << c.name << "_a," << c.name << "_b," << c.name << "_diff";
  os << '\n';
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    const auto &da = a.steps[k];
    const auto &db = b.steps[k];
    if (da.time != db.time) {
      throw ConfigError("runs have different time grids at step " + std::to_string(k));
    }
    os << da.step << ',' << format_double(da.time);
    for (const auto &c : columns) {
      const double x = da.*c.field;
      const double y = db.*c.field;
      os << ',' << format_double(x) << ',' << format_double(y) << ',' << format_double(x - y);
    }
    os << '\n';
  }
}

int cmd_compare(const std::string &path_a, const std::string &path_b, const RunOverrides &o, std::ostream &out,
                std::ostream &err) {
  return guarded(err, [&] {
    RunConfig a = load_config(path_a);
    RunConfig b = load_config(path_b);
    if (a.dt != b.dt || a.num_steps() != b.num_steps()) {
      throw ConfigError("configs do not share a time grid");
    }
    if (!(a.mesh == b.mesh)) {
      throw ConfigError("configs do not share a mesh");
    }
    for (RunConfig *c : {&a, &b}) {
      c->output.directory.clear();
      c->output.snapshot_every = 0;
      if (o.threads) c->threads = *o.threads;
    }
    const RunReport ra = run(a);
    const RunReport rb = run(b);
    if (o.output_dir) {
      fs::create_directories(*o.output_dir);
      const fs::path path = fs::path(*o.output_dir) / "compare.csv";
      std::ofstream csv(path);
      if (!csv) throw ConfigError("cannot write " + path.string());
      write_joined_csv(csv, ra, rb);
      out << "wrote " << path.string() << '\n';
    } else {
      write_joined_csv(out, ra, rb);
    }
    return int{kSuccess};
  });
}

int cmd_export_preset(const std::string &name, const std::string &dir, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    const ExperimentPreset preset = make_preset(name);
    fs::create_directories(dir);
    for (const auto &c : preset.runs) {
      const fs::path path = fs::path(dir) / (c.name + ".ini");
      std::ofstream os(path);
      if (!os) throw ConfigError("cannot write " + path.string());
      os << "; " << preset.name << ": " << preset.description << '\n';
      write_config(os, c);
      out << path.string() << '\n';
    }
    return int{kSuccess};
  });
}

int main_entry(int argc, char **argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"gbmsim: P1 mass-lumped IMEX simulator for a glioblastoma PDE-ODE model"};
  app.require_subcommand(1);

  std::string output_dir;
  std::size_t snapshot_every = 0;
  unsigned threads = 1;
  unsigned long seed = 0;
  app.add_option("--output-dir", output_dir, "Output directory");
  app.add_option("--snapshot-every", snapshot_every, "Write a VTK snapshot every N steps (0: none)");
  app.add_option("--threads", threads, "Threads for assembly and spmv")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Reserved; the model is deterministic");

  auto *run_cmd = app.add_subcommand("run", "Run a config file or a named preset")->fallthrough();
  std::string config_path;
  std::string preset;
  auto *cfg_opt = run_cmd->add_option("config", config_path, "INI config file");
  auto *preset_opt = run_cmd->add_option("--preset", preset, "bounds-comparison, energy-sweep or lumping-comparison");
  cfg_opt->excludes(preset_opt);

  auto *check_cmd = app.add_subcommand("check-mesh", "Audit a mesh file for obtuse angles")->fallthrough();
  std::string mesh_path;
  check_cmd->add_option("mesh", mesh_path, "Mesh file")->required();

  auto *compare_cmd = app.add_subcommand("compare", "Run two configs and join their per-step diagnostics")->fallthrough();
  std::string path_a;
  std::string path_b;
  compare_cmd->add_option("config_a", path_a)->required();
  compare_cmd->add_option("config_b", path_b)->required();

  auto *export_cmd = app.add_subcommand("export-preset", "Write the config files of a preset")->fallthrough();
  std::string export_name;
  std::string export_dir;
  export_cmd->add_option("preset", export_name)->required();
  export_cmd->add_option("directory", export_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? int{kSuccess} : int{kInputError};
  }

  RunOverrides o;
  if (!output_dir.empty()) o.output_dir = output_dir;
  if (app.count("--snapshot-every") > 0) o.snapshot_every = snapshot_every;
  if (app.count("--threads") > 0) o.threads = threads;

  if (*run_cmd) {
    if (!preset.empty()) return cmd_run_preset(preset, o, out, err);
    if (config_path.empty()) {
      err << "run: give a config file or --preset\n";
      return kInputError;
    }
    return cmd_run_file(config_path, o, out, err);
  }
  if (*check_cmd) return cmd_check_mesh(mesh_path, out, err);
  if (*compare_cmd) return cmd_compare(path_a, path_b, o, out, err);
  return cmd_export_preset(export_name, export_dir, out, err);
}

} // namespace gbmcli
