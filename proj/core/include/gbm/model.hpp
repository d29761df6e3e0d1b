#ifndef GBM_MODEL_HPP
#define GBM_MODEL_HPP

#include "gbm/linalg.hpp"

#include <cstddef>

namespace gbm {

/// Coefficients of the tumor / necrosis / vasculature model.
struct ModelParams {
  double kappa1{0.0}; ///< vasculature-driven diffusion (cm^2/day)
  double kappa0{0.0}; ///< isotropic diffusion (cm^2/day)
  double rho{0.0};    ///< tumor proliferation (1/day)
  double alpha{0.0};  ///< hypoxic death
  double beta1{0.0};  ///< tumor -> necrosis (1/day)
  double beta2{0.0};  ///< vasculature -> necrosis (1/day)
  double gamma{0.0};  ///< vasculature proliferation (1/day)
  double delta{0.0};  ///< vasculature destruction by tumor (1/day)
  double K{1.0};      ///< carrying capacity

  /// Throws std::invalid_argument unless all rates are >= 0, K > 0 and kappa0 > 0.
  void validate() const;
  bool operator==(const ModelParams &) const = default;
};

/// Nodal fields at one time level.
struct State {
  DenseVector T;
  DenseVector N;
  DenseVector Phi;
  std::size_t step{0};
  double time{0.0};
};

/// min{K, max{0, v}}
double truncate(double v, double K);

/// P(phi, t) = phi_+ / ((phi_+ + K)/2 + t_+), both arguments truncated to [0,K].
double vascular_fraction(double phi, double t, double K);

/// sqrt(1 - P^2) with the argument clamped at 0.
double hypoxia_factor(double p);

struct Reactions {
  double f1{0.0};
  double f2{0.0};
  double f3{0.0};
};

/// Continuous reaction terms at one point.
Reactions reactions(double t, double n, double phi, const ModelParams &p);

/// IMEX split of the tumor reaction: f1~ = source - decay * T^{k+1}.
struct TumorSplit {
  double source{0.0};
  double decay{0.0};
};

TumorSplit imex_coefficients_T(double tk, double nk, double phik, const ModelParams &p);

/// Closed-form solution of the nodal vasculature equation of the IMEX scheme.
double update_phi_node(double tk, double tk1, double nk, double phik, double dt, const ModelParams &p);

/// Nodal necrosis update of the IMEX scheme (uses T^{k+1} and Phi^{k+1}).
double update_n_node(double tk, double tk1, double nk, double phik, double phik1, double dt,
                     const ModelParams &p);

/// Semi-discrete reaction terms evaluated at all five time-level arguments.
Reactions imex_reactions(double tk, double tk1, double nk, double phik, double phik1,
                         const ModelParams &p);

} // namespace gbm

#endif // GBM_MODEL_HPP
