#include "gbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gbm {

void ModelParams::validate() const {
  const auto nonneg = [](double v, const char *name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("parameter ") + name + " must be finite and >= 0");
    }
  };
  nonneg(kappa1, "kappa1");
  nonneg(rho, "rho");
  nonneg(alpha, "alpha");
  nonneg(beta1, "beta1");
  nonneg(beta2, "beta2");
  nonneg(gamma, "gamma");
  nonneg(delta, "delta");
  if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) {
    throw std::invalid_argument("parameter kappa0 must be finite and > 0");
  }
  if (!(K > 0.0) || !std::isfinite(K)) {
    throw std::invalid_argument("parameter K must be finite and > 0");
  }
}

double truncate(double v, double K) { return std::min(K, std::max(0.0, v)); }

double vascular_fraction(double phi, double t, double K) {
  const double phi_k = truncate(phi, K);
  const double t_k = truncate(t, K);
  return phi_k / (0.5 * (phi_k + K) + t_k);
}

double hypoxia_factor(double p) { return std::sqrt(std::clamp(1.0 - p * p, 0.0, 1.0)); }

Reactions reactions(double t, double n, double phi, const ModelParams &p) {
  const double P = vascular_fraction(phi, t, p.K);
  const double hyp = hypoxia_factor(P);
  const double logistic = 1.0 - (t + n + phi) / p.K;
  Reactions r;
  r.f1 = p.rho * t * P * logistic - p.alpha * t * hyp - p.beta1 * n * t;
  r.f2 = p.alpha * t * hyp + p.beta1 * n * t + p.delta * t * phi + p.beta2 * n * phi;
  r.f3 = p.gamma * t * hyp * (phi / p.K) * logistic - p.delta * t * phi - p.beta2 * n * phi;
  return r;
}

TumorSplit imex_coefficients_T(double tk, double nk, double phik, const ModelParams &p) {
  const double P = vascular_fraction(phik, tk, p.K);
  TumorSplit s;
  s.source = p.rho * P * tk;
  s.decay = p.rho * P * (tk + nk + phik) / p.K + p.alpha * hypoxia_factor(P) + p.beta1 * nk;
  return s;
}

double update_phi_node(double tk, double tk1, double nk, double phik, double dt, const ModelParams &p) {
  const double P = vascular_fraction(phik, tk, p.K);
  const double growth = p.gamma * (tk1 / p.K) * hypoxia_factor(P);
  const double numerator = phik * (1.0 + dt * growth);
  const double denominator =
      1.0 + dt * (growth * (phik + tk + nk) / p.K + p.delta * tk1 + p.beta2 * nk);
  return numerator / denominator;
}

double update_n_node(double tk, double tk1, double nk, double phik, double phik1, double dt,
                     const ModelParams &p) {
  const double hyp = hypoxia_factor(vascular_fraction(phik, tk, p.K));
  return nk + dt * (p.alpha * tk1 * hyp + p.beta1 * nk * tk1 + p.delta * tk1 * phik1 +
                    p.beta2 * nk * phik1);
}

Reactions imex_reactions(double tk, double tk1, double nk, double phik, double phik1,
                         const ModelParams &p) {
  const double P = vascular_fraction(phik, tk, p.K);
  const double hyp = hypoxia_factor(P);
  Reactions r;
  r.f1 = p.rho * P * (tk * (1.0 - tk1 / p.K) - tk1 * (nk + phik) / p.K) - p.alpha * tk1 * hyp -
         p.beta1 * nk * tk1;
  r.f2 = p.alpha * tk1 * hyp + p.beta1 * nk * tk1 + p.delta * tk1 * phik1 + p.beta2 * nk * phik1;
  r.f3 = p.gamma * (tk1 / p.K) * hyp * (phik * (1.0 - phik1 / p.K) - phik1 * (tk + nk) / p.K) -
         p.delta * tk1 * phik1 - p.beta2 * nk * phik1;
  return r;
}

} // namespace gbm
