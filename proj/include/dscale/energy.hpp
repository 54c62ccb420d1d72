#pragma once

#include <map>
#include <string>
#include <vector>

namespace dscale {

/// Itemized energy functional. Which fields are populated depends on the
/// producer: wave-side energies fill kinetic/confinement/potential, fluid-side
/// energies additionally fill gradient (the capillary part) and the named
/// regularization terms in `extras`. `total` is always the sum of every
/// populated energy component; `dissipation_total` sums the itemized
/// dissipation map (each entry nonnegative up to roundoff).
struct EnergyBreakdown {
  double kinetic = 0.0;      ///< velocity / wave-gradient part
  double gradient = 0.0;     ///< eps^2 capillary part (fluid side)
  double confinement = 0.0;  ///< |y|^2 confinement part
  double potential = 0.0;    ///< pressure / nonlinear-potential part
  std::map<std::string, double> extras;  ///< named regularization terms
  double total = 0.0;

  std::map<std::string, double> dissipation;  ///< itemized dissipation
  double dissipation_total = 0.0;

  /// For the regularized fluid identity d/dt total + dissipation_total = RHS:
  /// the actually computed right-hand side and its certified upper bound.
  double rhs_actual = 0.0;
  double rhs_bound = 0.0;

  /// Recompute `total` and `dissipation_total` from the itemized entries.
  void finalize() {
    total = kinetic + gradient + confinement + potential;
    for (const auto& kv : extras) total += kv.second;
    dissipation_total = 0.0;
    for (const auto& kv : dissipation) dissipation_total += kv.second;
  }
};

/// Time series of energy breakdowns plus the conserved/monitored columns that
/// go to the run ledger CSV.
struct EnergyLedger {
  std::vector<double> times;
  std::vector<EnergyBreakdown> rows;
  std::vector<double> mass;
  std::vector<double> moment2;
  std::vector<double> min_density;  ///< fluid runs only; NaN for wave runs
  std::vector<double> h4_bound;     ///< filled after fitting, may stay empty

  void append(double t, const EnergyBreakdown& e, double m, double m2,
              double min_rho) {
    times.push_back(t);
    rows.push_back(e);
    mass.push_back(m);
    moment2.push_back(m2);
    min_density.push_back(min_rho);
  }
  std::size_t size() const { return times.size(); }
};

/// Least-squares fit of log(value) against log(tau(t)) over a window.
struct DecayFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double residual = 0.0;  ///< rms of log-log fit residuals
  std::size_t count = 0;  ///< samples used
};

/// Large-time profile-convergence verdict: W1 distances of each snapshot to
/// the final one, and whether they form a Cauchy-like (settling) sequence.
struct ProfileConvergence {
  double reference_time = 0.0;
  std::vector<double> times;
  std::vector<double> distances;
  bool cauchy_flag = false;
  double last_decade_max = 0.0;  ///< max distance over the final decade in t
};

/// Momentum-corrected functional B = (1/2)Int(rho|u - x/t|^2
/// + eps^2|grad sqrt(rho)|^2) + (gamma-1)^{-1} Int rho^gamma, and A = t^2 B.
struct BFunctional {
  double kinetic = 0.0;   ///< (1/2) Int rho |u - x/t|^2
  double gradient = 0.0;  ///< (eps^2/2) Int |grad sqrt(rho)|^2
  double pressure = 0.0;  ///< (gamma-1)^{-1} Int rho^gamma
  double b = 0.0;
  double a = 0.0;
};

}  // namespace dscale
