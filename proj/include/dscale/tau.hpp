#pragma once
// The scaling factor tau(t): solution of
//     tau'' = alpha / (2 tau^{1+alpha}),   tau(0) = 1,  tau'(0) = 0,
// which carries the exact first integral  (tau')^2 = 1 - tau^{-alpha}.
// The solver integrates the ODE form (the square-root form is degenerate at
// t = 0), bootstrapping the first step with the even Taylor expansion
// tau(h) = 1 + (alpha/4) h^2 + O(h^4) and then running classical RK4 with
// step-doubling error control plus two solution-quality gates per step: the
// first-integral residual at the accepted knot and the dense-output
// interpolation error probed at the step midpoint.  Dense output stores
// (t, tau, tau') knots; between knots tau is a quintic Hermite (tau'' comes
// free from the ODE) and tau' a cubic Hermite, so interpolated values satisfy
// the first integral to a small multiple of the solve tolerance.

#include <cstddef>
#include <vector>

#include "dscale/errors.hpp"

namespace dscale {

struct TauPoint {
  double tau;
  double taudot;
  double tauddot;
};

class TauTrajectory {
 public:
  struct Knot {
    double t, tau, taudot;
  };

  double alpha() const { return alpha_; }
  double tol() const { return tol_; }
  double t_max() const { return t_max_; }
  int interp_order() const { return 5; }
  const std::vector<Knot>& knots() const { return knots_; }

  /// Dense evaluation; throws OutOfRangeError outside [0, t_max].
  TauPoint eval(double t) const;

  /// |tau'^2 - (1 - tau^{-alpha})| at t, from the dense output.
  double residual(double t) const;

  /// ∫_{t1}^{t2} tau(s)^{-p} ds by per-knot-interval Gauss-Legendre
  /// quadrature of the dense output; requires 0 <= t1 <= t2 <= t_max.
  double phase_integral(double t1, double t2, double p) const;

 private:
  friend TauTrajectory solve_tau(double, double, double);
  double alpha_ = 0, tol_ = 0, t_max_ = 0;
  std::vector<Knot> knots_;
  std::size_t locate(double t) const;
};

/// Integrate the scaling ODE over [0, t_max].
TauTrajectory solve_tau(double alpha, double t_max, double tol = 1e-10);

}  // namespace dscale
