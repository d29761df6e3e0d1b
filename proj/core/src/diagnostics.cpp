#include "gbm/diagnostics.hpp"

#include "gbm/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace gbm {

double ComparisonOde::value(double t) const {
  if (b == c) {
    return (y0 + a * t) * std::exp(-c * t);
  }
  // (e^{-bt} - e^{-ct}) / (c - b), written with expm1 so that c close to b
  // or tiny rates do not cancel.
  const double transfer = std::exp(-b * t) * (-std::expm1(-(c - b) * t)) / (c - b);
  return y0 * std::exp(-c * t) + a * transfer;
}

std::vector<double> scalar_comparison_oracle(const ComparisonOde &ode, std::span<const double> times) {
  if (!(ode.a >= 0.0) || !(ode.b >= 0.0) || !(ode.c >= 0.0)) {
    throw std::invalid_argument("comparison ODE needs a, b, c >= 0");
  }
  std::vector<double> y;
  y.reserve(times.size());
  for (double t : times) y.push_back(ode.value(t));
  return y;
}

namespace {

void fill_margins(const RunReport &run, EnvelopeReport &r, CheckMode mode,
                  const std::function<double(double)> &t_bound,
                  const std::function<double(double)> &phi_bound) {
  r.min_T_margin = std::numeric_limits<double>::infinity();
  r.min_Phi_margin = std::numeric_limits<double>::infinity();
  for (const auto &d : run.steps) {
    const double tb = t_bound(d.time);
    const double pb = phi_bound(d.time);
    r.times.push_back(d.time);
    r.T_bound.push_back(tb);
    r.Phi_bound.push_back(pb);
    r.T_margin.push_back(tb - d.max_T);
    r.Phi_margin.push_back(pb - d.max_Phi);
    r.min_T_margin = std::min(r.min_T_margin, r.T_margin.back());
    r.min_Phi_margin = std::min(r.min_Phi_margin, r.Phi_margin.back());
  }
  r.holds = r.min_T_margin >= 0.0 && r.min_Phi_margin >= 0.0;
  if (mode == CheckMode::Assert && !r.holds) {
    throw DiagnosticFailure("asymptotic envelope violated (min T margin " + std::to_string(r.min_T_margin) +
                            ", min Phi margin " + std::to_string(r.min_Phi_margin) + ")");
  }
}

} // namespace

EnvelopeReport envelope_check_far(const RunReport &run, const ModelParams &p, double N0_min,
                                  CheckMode mode) {
  EnvelopeReport r;
  auto &spec = r.spec;
  spec.kind = EnvelopeKind::FarFromK;
  if (run.steps.empty()) {
    spec.reason = "run has no recorded steps";
    return r;
  }
  const auto &d0 = run.steps.front();
  spec.N0_min = N0_min > 0.0 ? N0_min : d0.min_N;
  spec.T0_max = std::max(std::abs(d0.min_T), std::abs(d0.max_T));
  spec.Phi0_max = std::max(std::abs(d0.min_Phi), std::abs(d0.max_Phi));
  spec.rate_T = p.beta1 * spec.N0_min;
  spec.rate_Phi = p.beta2 * spec.N0_min;
  if (p.delta < p.gamma / p.K) {
    spec.reason = "requires delta >= gamma/K";
    return r;
  }
  if (!(spec.N0_min > 0.0)) {
    spec.reason = "requires min N0 > 0";
    return r;
  }
  if (spec.N0_min > d0.min_N) {
    spec.reason = "N0_min exceeds the nodal minimum of N0";
    return r;
  }
  spec.applicable = true;
  const ComparisonOde ode{p.rho * spec.Phi0_max, spec.rate_Phi, spec.rate_T, spec.T0_max};
  fill_margins(
      run, r, mode, [&](double t) { return ode.value(t); },
      [&](double t) { return spec.Phi0_max * std::exp(-spec.rate_Phi * t); });
  return r;
}

EnvelopeReport envelope_check_near_K(const RunReport &run, const ModelParams &p, double eps,
                                     CheckMode mode) {
  EnvelopeReport r;
  auto &spec = r.spec;
  spec.kind = EnvelopeKind::NearK;
  spec.eps = eps;
  if (run.steps.empty()) {
    spec.reason = "run has no recorded steps";
    return r;
  }
  const auto &d0 = run.steps.front();
  spec.N0_min = d0.min_N;
  spec.T0_max = std::max(std::abs(d0.min_T), std::abs(d0.max_T));
  spec.Phi0_max = std::max(std::abs(d0.min_Phi), std::abs(d0.max_Phi));
  spec.rate_T = p.beta1 * (p.K - eps) - p.rho * eps / p.K;
  spec.rate_Phi = p.beta2 * (p.K - eps) - p.gamma * eps / p.K;
  spec.n_bounded = spec.rate_T > 0.0 && spec.rate_Phi > 0.0;
  if (!(eps >= 0.0) || eps > p.K) {
    spec.reason = "requires 0 <= eps <= K";
    return r;
  }
  if (d0.min_N < p.K - eps) {
    spec.reason = "requires N0 >= K - eps at every node";
    return r;
  }
  spec.applicable = true;
  fill_margins(
      run, r, mode, [&](double t) { return spec.T0_max * std::exp(-spec.rate_T * t); },
      [&](double t) { return spec.Phi0_max * std::exp(-spec.rate_Phi * t); });
  return r;
}

std::string_view to_string(Equilibrium e) {
  switch (e) {
  case Equilibrium::P1:
    return "P1";
  case Equilibrium::P2:
    return "P2";
  case Equilibrium::P3:
    return "P3";
  case Equilibrium::None:
    return "none";
  }
  return "none";
}

double EquilibriumReport::max_residual() const {
  return std::max({residual.f1, residual.f2, residual.f3});
}

EquilibriumReport classify_equilibrium(const State &s, const ModelParams &p, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("classification tolerance must be positive");
  }
  EquilibriumReport r;
  const auto sup = [](const DenseVector &v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  r.max_T = sup(s.T);
  r.max_N = sup(s.N);
  r.max_Phi = sup(s.Phi);
  for (std::size_t i = 0; i < s.T.size(); ++i) {
    const auto f = reactions(s.T[i], s.N[i], s.Phi[i], p);
    r.residual.f1 = std::max(r.residual.f1, std::abs(f.f1));
    r.residual.f2 = std::max(r.residual.f2, std::abs(f.f2));
    r.residual.f3 = std::max(r.residual.f3, std::abs(f.f3));
  }
  const bool t0 = r.max_T <= tol;
  const bool n0 = r.max_N <= tol;
  const bool phi0 = r.max_Phi <= tol;
  if (t0 && n0 && phi0) {
    r.label = Equilibrium::P1;
  } else if (t0 && phi0) {
    r.label = Equilibrium::P2;
  } else if (t0 && n0) {
    r.label = Equilibrium::P3;
  }
  return r;
}

double necrosis_ceiling(const ModelParams &p, double n0, double t) {
  const double c1 = (p.beta1 + p.beta2) * p.K;
  const double c2 = (p.alpha + p.delta * p.K) * p.K;
  if (c1 == 0.0) {
    return n0 + c2 * t;
  }
  return n0 * std::exp(c1 * t) + c2 * std::expm1(c1 * t) / c1;
}

namespace {

nlohmann::json envelope_json(const EnvelopeReport &r) {
  nlohmann::json j;
  j["kind"] = r.spec.kind == EnvelopeKind::FarFromK ? "far-from-K" : "near-K";
  j["applicable"] = r.spec.applicable;
  if (!r.spec.applicable) {
    j["status"] = "not applicable";
    j["reason"] = r.spec.reason;
    return j;
  }
  j["status"] = r.holds ? "holds" : "violated";
  j["N0_min"] = r.spec.N0_min;
  j["eps"] = r.spec.eps;
  j["T0_max"] = r.spec.T0_max;
  j["Phi0_max"] = r.spec.Phi0_max;
  j["rate_T"] = r.spec.rate_T;
  j["rate_Phi"] = r.spec.rate_Phi;
  j["min_T_margin"] = r.min_T_margin;
  j["min_Phi_margin"] = r.min_Phi_margin;
  if (r.spec.kind == EnvelopeKind::NearK) j["n_bounded"] = r.spec.n_bounded;
  return j;
}

} // namespace

void write_run_summary(const std::string &path, const RunReport &run,
                       const std::vector<EnvelopeReport> &envelopes,
                       const std::optional<EquilibriumReport> &equilibrium) {
  nlohmann::json j;
  const auto &c = run.config;
  j["name"] = c.name;
  j["variant"] = std::string(to_string(c.variant));
  j["dt"] = c.dt;
  j["final_time"] = c.final_time;
  j["steps"] = run.steps.empty() ? 0 : run.steps.back().step;
  j["num_nodes"] = run.num_nodes;
  j["h"] = run.h;
  j["params"] = {{"kappa1", c.params.kappa1}, {"kappa0", c.params.kappa0}, {"rho", c.params.rho},
                 {"alpha", c.params.alpha},   {"beta1", c.params.beta1},   {"beta2", c.params.beta2},
                 {"gamma", c.params.gamma},   {"delta", c.params.delta},   {"K", c.params.K}};
  j["mesh_audit"] = {{"non_obtuse", run.mesh_audit.non_obtuse},
                     {"strictly_acute", run.mesh_audit.strictly_acute},
                     {"max_neg_cosine", run.mesh_audit.max_neg_cosine},
                     {"worst_element", run.mesh_audit.worst_element}};
  j["energy"] = run.energy;
  j["dt_regime_ok"] = run.dt_regime_ok;

  bool lower = false;
  bool upper = false;
  double min_T = 0.0;
  double max_T = 0.0;
  for (const auto &d : run.steps) {
    lower = lower || d.lower_violation;
    upper = upper || d.upper_violation;
    min_T = std::min(min_T, d.min_T);
    max_T = std::max(max_T, d.max_T);
  }
  j["bounds"] = {{"lower_violation", lower}, {"upper_violation", upper}, {"min_T", min_T}, {"max_T", max_T}};
  if (!run.steps.empty()) {
    const auto &f = run.steps.back();
    j["final"] = {{"min_T", f.min_T},     {"max_T", f.max_T},    {"min_N", f.min_N},
                  {"max_N", f.max_N},     {"min_Phi", f.min_Phi}, {"max_Phi", f.max_Phi},
                  {"cg_iters", f.cg_iterations}};
  }
  j["envelopes"] = nlohmann::json::array();
  for (const auto &e : envelopes) j["envelopes"].push_back(envelope_json(e));
  if (equilibrium) {
    j["equilibrium"] = {{"label", std::string(to_string(equilibrium->label))},
                        {"max_T", equilibrium->max_T},
                        {"max_N", equilibrium->max_N},
                        {"max_Phi", equilibrium->max_Phi},
                        {"residual_f1", equilibrium->residual.f1},
                        {"residual_f2", equilibrium->residual.f2},
                        {"residual_f3", equilibrium->residual.f3}};
  }
  std::ofstream os(path);
  if (!os) {
    throw ConfigError("cannot write run summary: " + path);
  }
  os << j.dump(2) << '\n';
}

} // namespace gbm
