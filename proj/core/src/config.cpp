#include "gbm/config.hpp"

#include "gbm/errors.hpp"
#include "gbm/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gbm {

namespace {

namespace pt = boost::property_tree;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Line number of every "section.key", for error messages.
std::map<std::string, std::size_t> index_lines(std::string_view text) {
  std::map<std::string, std::size_t> lines;
  std::string section;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == ';' || line.front() == '#') continue;
    if (line.front() == '[') {
      section = std::string(trim(line.substr(1, line.find(']') - 1)));
      lines.emplace(section, lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq != std::string_view::npos) {
      lines.emplace(section + "." + std::string(trim(line.substr(0, eq))), lineno);
    }
  }
  return lines;
}

class Reader {
public:
  Reader(const pt::ptree &tree, std::map<std::string, std::size_t> lines, std::string source)
      : m_tree(tree), m_lines(std::move(lines)), m_source(std::move(source)) {}

  [[noreturn]] void fail(const std::string &field, const std::string &msg) const {
    std::string where = m_source;
    if (auto it = m_lines.find(field); it != m_lines.end()) {
      where += ":" + std::to_string(it->second);
    }
    throw ConfigError(where + ": " + field + ": " + msg);
  }

  const std::string *raw(const std::string &section, const std::string &key) {
    m_used.insert(section + "." + key);
    const auto sec = m_tree.get_child_optional(section);
    if (!sec) return nullptr;
    const auto it = sec->find(key);
    if (it == sec->not_found()) return nullptr;
    return &it->second.data();
  }

  bool has(const std::string &section, const std::string &key) { return raw(section, key) != nullptr; }

  void number(const std::string &section, const std::string &key, double &out) {
    const std::string *v = raw(section, key);
    if (!v) return;
    const std::string_view s = trim(*v);
    double x = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(x)) {
      fail(section + "." + key, "expected a finite number, got '" + *v + "'");
    }
    out = x;
  }

  template <typename U> void integer(const std::string &section, const std::string &key, U &out) {
    const std::string *v = raw(section, key);
    if (!v) return;
    const std::string_view s = trim(*v);
    U x = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || end != s.data() + s.size()) {
      fail(section + "." + key, "expected a nonnegative integer, got '" + *v + "'");
    }
    out = x;
  }

  void flag(const std::string &section, const std::string &key, bool &out) {
    const std::string *v = raw(section, key);
    if (!v) return;
    const std::string_view s = trim(*v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
      out = true;
    } else if (s == "false" || s == "0" || s == "no" || s == "off") {
      out = false;
    } else {
      fail(section + "." + key, "expected true or false, got '" + *v + "'");
    }
  }

  void text(const std::string &section, const std::string &key, std::string &out) {
    if (const std::string *v = raw(section, key)) out = std::string(trim(*v));
  }

  void reject_unknown() const {
    static const std::set<std::string> sections{"mesh",    "params", "time",  "scheme",
                                                 "initial", "solver", "output"};
    for (const auto &[name, sec] : m_tree) {
      if (sec.empty() && !sec.data().empty()) {
        fail(name, "keys must belong to a section");
      }
      if (!sections.count(name)) {
        fail(name, "unknown section");
      }
      for (const auto &kv : sec) {
        const std::string field = name + "." + kv.first;
        if (!m_used.count(field)) fail(field, "unknown key");
      }
    }
  }

private:
  const pt::ptree &m_tree;
  std::map<std::string, std::size_t> m_lines;
  std::string m_source;
  std::set<std::string> m_used;
};

void read_profile(Reader &r, const std::string &prefix, Profile &p) {
  std::string kind;
  r.text("initial", prefix + "_kind", kind);
  if (kind == "gaussian") {
    p.kind = Profile::Kind::Gaussian;
  } else if (kind == "constant") {
    p.kind = Profile::Kind::Constant;
  } else if (!kind.empty()) {
    r.fail("initial." + prefix + "_kind", "expected gaussian or constant, got '" + kind + "'");
  }
  r.number("initial", prefix + "_value", p.value);
  r.number("initial", prefix + "_amplitude", p.amplitude);
  r.number("initial", prefix + "_cx", p.center_x);
  r.number("initial", prefix + "_cy", p.center_y);
  r.number("initial", prefix + "_width", p.width);
  r.number("initial", prefix + "_background", p.background);
}

std::size_t cells_for(Reader &r, double length, double h) {
  const double n = std::round(length / h);
  if (!(n >= 1.0) || n > 1e7) {
    r.fail("mesh.h", "cell size gives an invalid number of cells");
  }
  return static_cast<std::size_t>(n);
}

} // namespace

RunConfig parse_config(std::string_view text, const std::string &source, const std::string &base_dir) {
  pt::ptree tree;
  {
    std::istringstream is{std::string(text)};
    try {
      pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error &e) {
      throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
  }
  Reader r(tree, index_lines(text), source);
  RunConfig c;

  std::string mesh_type;
  r.text("mesh", "type", mesh_type);
  if (mesh_type == "file") {
    c.mesh.kind = MeshSpec::Kind::File;
  } else if (!mesh_type.empty() && mesh_type != "structured") {
    r.fail("mesh.type", "expected structured or file, got '" + mesh_type + "'");
  }
  r.number("mesh", "lx", c.mesh.lx);
  r.number("mesh", "ly", c.mesh.ly);
  if (r.has("mesh", "h")) {
    if (r.has("mesh", "nx") || r.has("mesh", "ny")) {
      r.fail("mesh.h", "give either h or nx/ny, not both");
    }
    double h = 0.0;
    r.number("mesh", "h", h);
    if (!(h > 0.0)) r.fail("mesh.h", "must be positive");
    c.mesh.nx = cells_for(r, c.mesh.lx, h);
    c.mesh.ny = cells_for(r, c.mesh.ly, h);
  }
  r.integer("mesh", "nx", c.mesh.nx);
  r.integer("mesh", "ny", c.mesh.ny);
  r.text("mesh", "file", c.mesh.file);
  if (c.mesh.kind == MeshSpec::Kind::File) {
    if (c.mesh.file.empty()) r.fail("mesh.file", "required when type = file");
    std::filesystem::path f(c.mesh.file);
    if (f.is_relative() && !base_dir.empty()) c.mesh.file = (std::filesystem::path(base_dir) / f).string();
  }

  r.number("params", "kappa1", c.params.kappa1);
  r.number("params", "kappa0", c.params.kappa0);
  r.number("params", "rho", c.params.rho);
  r.number("params", "alpha", c.params.alpha);
  r.number("params", "beta1", c.params.beta1);
  r.number("params", "beta2", c.params.beta2);
  r.number("params", "gamma", c.params.gamma);
  r.number("params", "delta", c.params.delta);
  r.number("params", "K", c.params.K);

  r.number("time", "Tf", c.final_time);
  if (r.has("time", "steps")) {
    if (r.has("time", "dt")) r.fail("time.steps", "give either dt or steps, not both");
    std::size_t steps = 0;
    r.integer("time", "steps", steps);
    if (steps == 0) r.fail("time.steps", "must be at least 1");
    c.dt = c.final_time / static_cast<double>(steps);
  }
  r.number("time", "dt", c.dt);

  std::string variant;
  r.text("scheme", "variant", variant);
  if (!variant.empty()) {
    try {
      c.variant = parse_variant(variant);
    } catch (const ConfigError &e) {
      r.fail("scheme.variant", e.what());
    }
  }

  read_profile(r, "T", c.initial.T);
  read_profile(r, "N", c.initial.N);
  read_profile(r, "Phi", c.initial.Phi);

  r.number("solver", "tol", c.solver.tol);
  r.integer("solver", "maxit", c.solver.max_iterations);
  std::string pre;
  r.text("solver", "preconditioner", pre);
  if (pre == "jacobi") {
    c.solver.preconditioner = Preconditioner::Jacobi;
  } else if (!pre.empty() && pre != "none") {
    r.fail("solver.preconditioner", "expected none or jacobi, got '" + pre + "'");
  }
  r.flag("solver", "check_matrix", c.solver.check_matrix);
  r.integer("solver", "threads", c.threads);

  r.text("output", "name", c.name);
  r.text("output", "directory", c.output.directory);
  r.integer("output", "snapshot_every", c.output.snapshot_every);

  r.reject_unknown();
  try {
    c.validate();
  } catch (const ConfigError &e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

RunConfig load_config(const std::string &path) {
  std::ifstream is(path);
  if (!is) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str(), path, std::filesystem::path(path).parent_path().string());
}

namespace {

void write_profile(std::ostream &os, const std::string &prefix, const Profile &p) {
  os << prefix << "_kind = " << (p.kind == Profile::Kind::Gaussian ? "gaussian" : "constant") << '\n';
  os << prefix << "_value = " << format_double(p.value) << '\n';
  os << prefix << "_amplitude = " << format_double(p.amplitude) << '\n';
  os << prefix << "_cx = " << format_double(p.center_x) << '\n';
  os << prefix << "_cy = " << format_double(p.center_y) << '\n';
  os << prefix << "_width = " << format_double(p.width) << '\n';
  os << prefix << "_background = " << format_double(p.background) << '\n';
}

} // namespace

void write_config(std::ostream &os, const RunConfig &c) {
  os << "[mesh]\n";
  if (c.mesh.kind == MeshSpec::Kind::File) {
    os << "type = file\nfile = " << c.mesh.file << '\n';
  } else {
    os << "type = structured\n";
  }
  os << "nx = " << c.mesh.nx << "\nny = " << c.mesh.ny << '\n';
  os << "lx = " << format_double(c.mesh.lx) << "\nly = " << format_double(c.mesh.ly) << "\n\n";

  const auto &p = c.params;
  os << "[params]\n";
  os << "kappa1 = " << format_double(p.kappa1) << '\n';
  os << "kappa0 = " << format_double(p.kappa0) << '\n';
  os << "rho = " << format_double(p.rho) << '\n';
  os << "alpha = " << format_double(p.alpha) << '\n';
  os << "beta1 = " << format_double(p.beta1) << '\n';
  os << "beta2 = " << format_double(p.beta2) << '\n';
  os << "gamma = " << format_double(p.gamma) << '\n';
  os << "delta = " << format_double(p.delta) << '\n';
  os << "K = " << format_double(p.K) << "\n\n";

  os << "[time]\n";
  os << "dt = " << format_double(c.dt) << "\nTf = " << format_double(c.final_time) << "\n\n";

  os << "[scheme]\nvariant = " << to_string(c.variant) << "\n\n";

  os << "[initial]\n";
  write_profile(os, "T", c.initial.T);
  write_profile(os, "N", c.initial.N);
  write_profile(os, "Phi", c.initial.Phi);
  os << '\n';

  os << "[solver]\n";
  os << "tol = " << format_double(c.solver.tol) << '\n';
  os << "maxit = " << c.solver.max_iterations << '\n';
  os << "preconditioner = " << (c.solver.preconditioner == Preconditioner::Jacobi ? "jacobi" : "none") << '\n';
  os << "check_matrix = " << (c.solver.check_matrix ? "true" : "false") << '\n';
  os << "threads = " << c.threads << "\n\n";

  os << "[output]\n";
  os << "name = " << c.name << '\n';
  if (!c.output.directory.empty()) os << "directory = " << c.output.directory << '\n';
  os << "snapshot_every = " << c.output.snapshot_every << '\n';
}

std::string config_to_string(const RunConfig &c) {
  std::ostringstream os;
  write_config(os, c);
  return os.str();
}

ModelParams bounds_params() {
  ModelParams p;
  p.kappa1 = 8e-5;
  p.kappa0 = 8e-5;
  p.rho = 1.0;
  p.alpha = 0.8;
  p.beta1 = 0.8;
  p.beta2 = 0.8;
  p.gamma = 0.008;
  p.delta = 0.8;
  p.K = 1.0;
  return p;
}

ModelParams energy_params() {
  ModelParams p;
  p.kappa1 = 2.9e-7;
  p.kappa0 = 2.9e-7;
  p.rho = 1.0;
  p.alpha = 0.0029;
  p.beta1 = 0.0029;
  p.beta2 = 0.0;
  p.gamma = 0.0029;
  p.delta = 0.00029;
  p.K = 1.0;
  return p;
}

ModelParams lumping_params() {
  ModelParams p;
  p.kappa1 = 8e-4;
  p.kappa0 = 8e-4;
  p.rho = 1.0;
  p.K = 1.0;
  return p;
}

std::vector<std::string> preset_names() { return {"bounds-comparison", "energy-sweep", "lumping-comparison"}; }

namespace {

RunConfig base_run(const std::string &name, const ModelParams &p, std::size_t cells, double dt, double tf,
                   SchemeVariant v) {
  RunConfig c;
  c.name = name;
  c.params = p;
  c.mesh.nx = cells;
  c.mesh.ny = cells;
  c.dt = dt;
  c.final_time = tf;
  c.variant = v;
  return c;
}

} // namespace

ExperimentPreset make_preset(std::string_view name) {
  ExperimentPreset preset;
  preset.name = std::string(name);
  if (name == "bounds-comparison") {
    preset.description = "pointwise bounds of IMEX vs explicit reactions, h=0.025, dt=0.01, Tf=1";
    for (auto v : {SchemeVariant::ImexLumped, SchemeVariant::ExplicitLumped}) {
      preset.runs.push_back(
          base_run("bounds-" + std::string(to_string(v)), bounds_params(), 40, 1e-2, 1.0, v));
    }
  } else if (name == "energy-sweep") {
    preset.description = "dt * sum ||T||_H1^2 for K_f = 10, 60, ..., 510 at Tf=0.01, h=0.025";
    for (auto v : {SchemeVariant::ImexLumped, SchemeVariant::ExplicitLumped}) {
      for (std::size_t kf = 10; kf <= 510; kf += 50) {
        const double dt = 0.01 / static_cast<double>(kf);
        preset.runs.push_back(base_run("energy-" + std::string(to_string(v)) + "-kf" + std::to_string(kf),
                                       energy_params(), 40, dt, 0.01, v));
      }
    }
  } else if (name == "lumping-comparison") {
    preset.description = "IMEX with and without mass lumping, h=0.1, dt=0.01, 100 steps";
    for (auto v : {SchemeVariant::ImexLumped, SchemeVariant::ImexConsistent}) {
      preset.runs.push_back(
          base_run("lumping-" + std::string(to_string(v)), lumping_params(), 10, 1e-2, 1.0, v));
    }
  } else {
    throw ConfigError("unknown preset '" + std::string(name) +
                      "' (expected bounds-comparison, energy-sweep or lumping-comparison)");
  }
  return preset;
}

} // namespace gbm
