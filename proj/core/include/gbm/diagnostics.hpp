#ifndef GBM_DIAGNOSTICS_HPP
#define GBM_DIAGNOSTICS_HPP

#include "gbm/model.hpp"
#include "gbm/scheme.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gbm {

/// Assert mode throws DiagnosticFailure on a violated envelope; report mode
/// only records margins.
enum class CheckMode { Assert, Report };

class DiagnosticFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Linear scalar ODE y' = a*exp(-b t) - c*y, y(0) = y0, with a, b, c >= 0.
struct ComparisonOde {
  double a{0.0};
  double b{0.0};
  double c{0.0};
  double y0{0.0};

  /// Closed-form solution.
  double value(double t) const;
};

std::vector<double> scalar_comparison_oracle(const ComparisonOde &ode, std::span<const double> times);

enum class EnvelopeKind { FarFromK, NearK };

struct EnvelopeSpec {
  EnvelopeKind kind{EnvelopeKind::FarFromK};
  double N0_min{0.0}; ///< far-from-K estimate
  double eps{0.0};    ///< near-K estimate
  double T0_max{0.0};
  double Phi0_max{0.0};
  double rate_T{0.0};   ///< exponential rate of the T envelope
  double rate_Phi{0.0}; ///< exponential rate of the Phi envelope
  bool applicable{false};
  std::string reason; ///< why the envelope does not apply
  /// Near-K only: rho*eps/K < beta1*(K-eps) and gamma*eps/K < beta2*(K-eps).
  bool n_bounded{false};
};

struct EnvelopeReport {
  EnvelopeSpec spec;
  std::vector<double> times;
  std::vector<double> T_bound;
  std::vector<double> Phi_bound;
  /// bound - observed max; negative means violated.
  std::vector<double> T_margin;
  std::vector<double> Phi_margin;
  double min_T_margin{0.0};
  double min_Phi_margin{0.0};
  bool holds{true};
};

/// Exponential envelope valid when delta >= gamma/K and N0 >= N0_min > 0.
/// Pass N0_min <= 0 to take the nodal minimum of N at step 0.
EnvelopeReport envelope_check_far(const RunReport &run, const ModelParams &p, double N0_min = 0.0,
                                  CheckMode mode = CheckMode::Report);

/// Exponential envelope valid when N0 >= K - eps.
EnvelopeReport envelope_check_near_K(const RunReport &run, const ModelParams &p, double eps,
                                     CheckMode mode = CheckMode::Report);

enum class Equilibrium { P1, P2, P3, None };
std::string_view to_string(Equilibrium e);

struct EquilibriumReport {
  Equilibrium label{Equilibrium::None};
  double max_T{0.0};
  double max_N{0.0};
  double max_Phi{0.0};
  Reactions residual; ///< max nodal |f1|, |f2|, |f3|

  double max_residual() const;
};

EquilibriumReport classify_equilibrium(const State &s, const ModelParams &p, double tol);

/// Pointwise necrosis ceiling N0*e^{C1 t} + C2 (e^{C1 t}-1)/C1 with
/// C1 = (beta1+beta2) K and C2 = (alpha + delta K) K.
double necrosis_ceiling(const ModelParams &p, double n0, double t);

/// JSON run summary: configuration echo, final diagnostics, envelopes,
/// equilibrium classification.
void write_run_summary(const std::string &path, const RunReport &run,
                       const std::vector<EnvelopeReport> &envelopes,
                       const std::optional<EquilibriumReport> &equilibrium);

} // namespace gbm

#endif // GBM_DIAGNOSTICS_HPP
