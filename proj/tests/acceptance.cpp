#include "gbm/config.hpp"
#include "gbm/diagnostics.hpp"
#include "gbm/fem.hpp"
#include "gbm/model.hpp"
#include "gbm/scheme.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gbm;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

RunConfig quiet(RunConfig c) {
  c.output.directory.clear();
  return c;
}

const RunConfig &bounds_run() {
  static const RunConfig c = quiet(make_preset("bounds-comparison").runs.at(0));
  return c;
}

Outcome criterion1() {
  const auto &c = bounds_run();
  const double K = c.params.K;
  std::size_t bad = 0;
  std::size_t first_bad = 0;
  double min_T = 1.0, max_T = 0.0, min_Phi = 1.0, max_Phi = 0.0, min_N = 1.0;
  const auto check = [&](const State &s) {
    for (std::size_t a = 0; a < s.T.size(); ++a) {
      min_T = std::min(min_T, s.T[a]);
      max_T = std::max(max_T, s.T[a]);
      min_Phi = std::min(min_Phi, s.Phi[a]);
      max_Phi = std::max(max_Phi, s.Phi[a]);
      min_N = std::min(min_N, s.N[a]);
      if (s.T[a] < 0.0 || s.T[a] > K || s.Phi[a] < 0.0 || s.Phi[a] > K || s.N[a] < 0.0) {
        if (bad++ == 0) first_bad = s.step;
      }
    }
  };
  const auto r = run(c, [&](const State &prev, const State &next, const StepDiagnostics &) {
    if (next.step == 1) check(prev);
    check(next);
  });
  std::ostringstream os;
  os << r.steps.size() - 1 << " steps, min T " << min_T << ", max T " << max_T << ", min Phi " << min_Phi
     << ", max Phi " << max_Phi << ", min N " << min_N;
  if (bad) os << "; " << bad << " nodal violations, first at step " << first_bad;
  return {bad == 0, os.str()};
}

Outcome criterion2() {
  RunConfig c = quiet(make_preset("bounds-comparison").runs.at(1));
  c.final_time = 10 * c.dt;
  const auto r = run(c);
  double min_T = 1.0, max_T = 0.0;
  std::size_t hit = 0;
  for (const auto &d : r.steps) {
    min_T = std::min(min_T, d.min_T);
    max_T = std::max(max_T, d.max_T);
    if (hit == 0 && d.step > 0 && (d.min_T < 0.0 || d.max_T > c.params.K)) hit = d.step;
  }
  std::ostringstream os;
  os << "explicit-lumped, steps 1..10: min T " << min_T << ", max T " << max_T;
  if (hit) os << ", first violation at step " << hit;
  else os << ", no bound violated";
  return {hit != 0, os.str()};
}

Outcome criterion3() {
  const auto preset = make_preset("lumping-comparison");
  const auto lumped = run(quiet(preset.runs.at(0)));
  const auto consistent = run(quiet(preset.runs.at(1)));
  double lumped_min = 1.0, consistent_min = 1.0;
  std::size_t at = 0;
  for (const auto &d : lumped.steps) lumped_min = std::min(lumped_min, d.min_T);
  for (const auto &d : consistent.steps) {
    if (d.min_T < consistent_min) {
      consistent_min = d.min_T;
      at = d.step;
    }
  }
  std::ostringstream os;
  os << "consistent min T " << consistent_min << " (step " << at << "), lumped min T " << lumped_min;
  return {consistent_min < 0.0 && lumped_min >= 0.0, os.str()};
}

Outcome criterion4() {
  const auto &c = bounds_run();
  std::vector<double> n0;
  std::size_t decreases = 0;
  std::size_t above = 0;
  double worst = -1.0;
  run(c, [&](const State &prev, const State &next, const StepDiagnostics &) {
    if (n0.empty()) n0 = prev.N;
    for (std::size_t a = 0; a < next.N.size(); ++a) {
      if (next.N[a] < prev.N[a]) ++decreases;
      const double ceiling = necrosis_ceiling(c.params, n0[a], next.time);
      worst = std::max(worst, next.N[a] - ceiling);
      if (next.N[a] > ceiling) ++above;
    }
  });
  std::ostringstream os;
  os << decreases << " nodal decreases, " << above << " ceiling violations, max N - ceiling " << worst;
  return {decreases == 0 && above == 0, os.str()};
}

Outcome criterion5() {
  const auto sweep = make_preset("energy-sweep");
  std::vector<double> imex, expl;
  std::vector<std::size_t> steps;
  for (const auto &c : sweep.runs) {
    const double e = run(quiet(c)).energy;
    if (c.variant == SchemeVariant::ImexLumped) {
      imex.push_back(e);
      steps.push_back(c.num_steps());
    } else {
      expl.push_back(e);
    }
  }
  const auto [lo, hi] = std::minmax_element(imex.begin(), imex.end());
  const double variation = (*hi - *lo) / *lo;
  const double finest = imex.back();
  const bool bounded = *hi <= 2.0 * finest;
  const bool ordered = expl.front() >= imex.front();
  std::ostringstream os;
  os.precision(10);
  os << "imex energy " << *lo << ".." << *hi << " (variation " << variation * 100.0 << "%), K_f=" << steps.back()
     << " value " << finest << "; K_f=" << steps.front() << ": explicit " << expl.front() << " vs imex "
     << imex.front();
  if (!ordered) os << " (explicit below imex)";
  return {variation < 0.1 && bounded && ordered, os.str()};
}

Outcome criterion6() {
  const auto &c = bounds_run();
  const auto r = run(c);
  bool envelope_ok = true;
  std::string envelope_detail;
  try {
    const auto e = envelope_check_far(r, c.params, 0.0, CheckMode::Assert);
    envelope_ok = e.spec.applicable && e.holds;
    envelope_detail = fmt("far envelope holds, min T margin %.3g", e.min_T_margin) +
                      fmt(", min Phi margin %.3g", e.min_Phi_margin);
  } catch (const DiagnosticFailure &ex) {
    envelope_ok = false;
    envelope_detail = ex.what();
  }

  RunConfig longer = c;
  longer.final_time = 10.0;
  const auto lr = run(longer);
  const auto eq = classify_equilibrium(lr.final_state, c.params, 1e-6);
  const bool eq_ok = eq.label == Equilibrium::P2 && eq.max_residual() <= 1e-6;
  std::ostringstream os;
  os << envelope_detail << "; Tf=10: label " << to_string(eq.label) << ", residual " << eq.max_residual()
     << ", max T " << eq.max_T << ", max Phi " << eq.max_Phi;
  return {envelope_ok && eq_ok, os.str()};
}

double triangle_area_sum(const Triangulation &m) {
  double total = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto &tri = m.triangle(t);
    const Point a = m.node(tri[0]), b = m.node(tri[1]), c = m.node(tri[2]);
    total += 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  }
  return total;
}

Outcome criterion7() {
  std::mt19937_64 rng(20240607);
  std::size_t failures = 0;
  double worst_mass = 0.0, worst_rows = 0.0, worst_stiff = 0.0, worst_pairing = 0.0, max_offdiag = -1.0;
  for (int mesh_id = 0; mesh_id < 20; ++mesh_id) {
    const Triangulation mesh = mesh_id % 2 == 0 ? gbm::testing::random_tensor_mesh(rng, 6 + mesh_id / 2, 5 + mesh_id % 7)
                                                : gbm::testing::jittered_lattice(rng, 5 + mesh_id / 2, 6, 0.08);
    if (!audit_angles(mesh).non_obtuse) ++failures;
    const FemSpace space(mesh);
    const auto &m = space.lumped_mass().m;

    double total = 0.0;
    for (double v : m) total += v;
    const double mass_err = gbm::testing::rel_diff(total, triangle_area_sum(mesh));
    worst_mass = std::max(worst_mass, mass_err);
    if (mass_err > 1e-12) ++failures;

    const auto rows = space.consistent_mass().row_sums();
    for (std::size_t a = 0; a < m.size(); ++a) {
      const double d = gbm::testing::rel_diff(rows[a], m[a]);
      worst_rows = std::max(worst_rows, d);
      if (d > 1e-12) ++failures;
    }

    const auto &A = space.unit_stiffness();
    const double scale = A.max_abs();
    for (double s : A.row_sums()) {
      worst_stiff = std::max(worst_stiff, std::abs(s) / scale);
      if (std::abs(s) > 1e-12 * scale) ++failures;
    }
    const auto &pat = A.pattern();
    for (std::size_t i = 0; i < pat.n; ++i) {
      for (std::size_t p = pat.row_offsets[i]; p < pat.row_offsets[i + 1]; ++p) {
        if (pat.col_indices[p] == i) continue;
        max_offdiag = std::max(max_offdiag, A.values()[p] / scale);
        if (A.values()[p] > 0.0) ++failures;
      }
    }

    for (int f = 0; f < 100; ++f) {
      const auto n = gbm::testing::random_field(rng, space.num_nodes());
      const auto lap = discrete_laplacian_apply(space.lumped_mass(), A, n);
      double pairing = 0.0;
      for (std::size_t a = 0; a < n.size(); ++a) pairing += m[a] * lap[a] * n[a];
      const double grad = space.norms(n).h1_seminorm;
      const double d = gbm::testing::rel_diff(pairing, grad * grad);
      worst_pairing = std::max(worst_pairing, d);
      if (d > 1e-12) ++failures;
    }
  }
  std::ostringstream os;
  os << "20 meshes x 100 fields: mass " << worst_mass << ", row sums " << worst_rows << ", stiffness rows "
     << worst_stiff << ", max off-diagonal/max|A| " << max_offdiag << ", pairing " << worst_pairing << "; "
     << failures << " failures";
  return {failures == 0, os.str()};
}

double bisect(const std::function<double(double)> &g, double lo, double hi) {
  double glo = g(lo);
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Outcome criterion8() {
  ModelParams p = bounds_params();
  p.beta1 = 0.0;
  RunConfig c = bounds_run();
  c.params = p;
  c.mesh.nx = 10;
  c.mesh.ny = 10;
  c.initial.T = Profile::constant(1.0);
  c.initial.N = Profile::constant(0.0);
  c.initial.Phi = Profile::constant(0.0);
  c.final_time = 50 * c.dt;
  c.solver.tol = 1e-13;
  double expected = 1.0;
  double recursion_err = 0.0;
  run(c, [&](const State &, const State &next, const StepDiagnostics &) {
    expected /= 1.0 + p.alpha * c.dt;
    for (double t : next.T) recursion_err = std::max(recursion_err, std::abs(t - expected));
  });

  const ModelParams q = bounds_params();
  const double dt = 0.01;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double phi_err = 0.0, n_err = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double tk = u(rng), tk1 = u(rng), nk = 2.0 * u(rng), phik = u(rng);
    const double phi1 = update_phi_node(tk, tk1, nk, phik, dt, q);
    const double phi_root = bisect(
        [&](double x) { return (x - phik) / dt - imex_reactions(tk, tk1, nk, phik, x, q).f3; }, -1.0, 2.0);
    phi_err = std::max(phi_err, std::abs(phi1 - phi_root));
    const double n1 = update_n_node(tk, tk1, nk, phik, phi1, dt, q);
    const double n_root = bisect(
        [&](double x) { return (x - nk) / dt - imex_reactions(tk, tk1, nk, phik, phi1, q).f2; }, nk - 1.0, nk + 1.0);
    n_err = std::max(n_err, std::abs(n1 - n_root));
  }

  double ode_err = 0.0;
  const std::vector<double> times{0.25, 1.0, 2.5, 10.0};
  for (const ComparisonOde ode : {ComparisonOde{0.5, 0.16, 0.64, 1.0}, ComparisonOde{0.4, 0.8, 0.8, 0.5},
                                  ComparisonOde{2.0, 1.5, 0.1, 0.0}}) {
    const auto y = scalar_comparison_oracle(ode, times);
    const auto f = [&](double t, double v) { return ode.a * std::exp(-ode.b * t) - ode.c * v; };
    for (std::size_t k = 0; k < times.size(); ++k) {
      const int n = 40000;
      const double h = times[k] / n;
      double v = ode.y0, t = 0.0;
      for (int s = 0; s < n; ++s) {
        const double k1 = f(t, v);
        const double k2 = f(t + h / 2, v + h / 2 * k1);
        const double k3 = f(t + h / 2, v + h / 2 * k2);
        const double k4 = f(t + h, v + h * k3);
        v += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
      }
      ode_err = std::max(ode_err, std::abs(y[k] - v));
    }
  }
  std::ostringstream os;
  os << "uniform recursion " << recursion_err << ", Phi root " << phi_err << ", N root " << n_err
     << ", comparison ODE vs RK4 " << ode_err;
  return {recursion_err <= 1e-10 && phi_err <= 1e-12 && n_err <= 1e-12 && ode_err <= 1e-10, os.str()};
}

} // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
