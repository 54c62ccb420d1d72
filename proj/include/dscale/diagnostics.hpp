#pragma once
// Run-level functionals and estimators: original-frame and momentum-corrected
// energies, the rescaled fluid pseudo-energy with its dissipation bracket,
// moment monitors, decay-exponent fitting against the dilation, the
// large-time energy envelope, and 1D Wasserstein-based profile convergence.
// Everything here is a pure function of its arguments; quadratures match the
// solvers (trapezoid-on-torus sums, spectral derivatives) so that discrete
// identities telescope.

#include <array>
#include <vector>

#include "dscale/energy.hpp"
#include "dscale/grid.hpp"
#include "dscale/madelung.hpp"
#include "dscale/tau.hpp"

namespace dscale {

/// Original-frame energy of a fluid-side state:
///   E = (1/2) Int(rho |u|^2 + eps^2 |grad sqrt(rho)|^2)
///     + (gamma-1)^{-1} Int rho^gamma
/// itemized as kinetic / gradient / potential. Velocities are vacuum-masked;
/// the gradient term uses the regularized square root of the density.
/// Throws InvalidInputError unless the state is original-frame, eps >= 0 and
/// gamma > 1.
EnergyBreakdown energy_original(SpectralWorkspace& W, const MadelungState& s,
                                double eps, double gamma);

/// Momentum-corrected functional at time t > 0:
///   B = (1/2) Int(rho |u - x/t|^2 + eps^2 |grad sqrt(rho)|^2)
///     + (gamma-1)^{-1} Int rho^gamma,     A = t^2 B.
/// The correction uses true (non-periodized) coordinates. Throws
/// InvalidInputError for t <= 0, a rescaled-frame state, eps < 0 or
/// gamma <= 1.
BFunctional b_functional(SpectralWorkspace& W, const MadelungState& s,
                         double t, double eps, double gamma);

/// Rescaled-frame pseudo-energy of a fluid-side state at time t:
///   kinetic      (1/2 tau^2) Int R |U|^2
///   gradient     (eps^2/2 tau^2) Int |grad sqrt(R)|^2
///   confinement  (alpha/4 tau^alpha) Int |y|^2 R   (periodized |y|^2 table)
///   potential    tau^{-d(gamma-1)}/(gamma-1) Int R^gamma
/// with the dissipation map itemizing the expansion bracket
///   (taudot/tau) * [2(kin+grad) + alpha*conf + d(gamma-1)*pot]
/// and the viscous term (nu/tau^4) Int R |grad U|^2 computed from the
/// vacuum-masked velocity. d(total)/dt + dissipation_total = 0 along exact
/// inviscid solutions. Throws InvalidInputError unless the state is
/// rescaled-frame, t >= 0, eps >= 0, nu >= 0, gamma > 1 and alpha matches
/// the trajectory.
EnergyBreakdown pseudo_energy_fluid(SpectralWorkspace& W,
                                    const MadelungState& s,
                                    const TauTrajectory& traj, double t,
                                    double eps, double nu, double gamma,
                                    double alpha);

/// Least-squares fit of log(value) against log(tau(t)) over samples with
/// t_lo <= t <= t_hi. Requires >= 8 samples in the window, all positive,
/// and t_lo < t_hi; throws InvalidInputError otherwise.
DecayFit fit_decay(const std::vector<double>& times,
                   const std::vector<double>& values,
                   const TauTrajectory& traj, double t_lo, double t_hi);

/// Wasserstein-1 distance of two 1D densities: both are normalized to unit
/// mass internally, cumulative distributions are built by trapezoidal
/// cumulation, and W1 = Int |CDF1 - CDF2| by the trapezoid rule. Throws
/// InvalidInputError on dimension/size mismatch or nonpositive total mass.
double wasserstein1_1d(const std::vector<double>& rho1,
                       const std::vector<double>& rho2, const Grid& g);

/// Settling detector for a snapshot sequence of rescaled densities:
/// distances[i] = W1(rho_i, rho_last), and cauchy_flag is true iff the
/// distances are nonincreasing within 10% slack and their maximum over the
/// last decade in t stays below `threshold`. Requires >= 4 snapshots with
/// strictly increasing positive times spanning at least one decade; throws
/// InvalidInputError otherwise.
ProfileConvergence profile_converge(
    const std::vector<double>& times,
    const std::vector<std::vector<double>>& densities, const Grid& g,
    double threshold = 0.05);

/// {mass, first moment, second moment} of a density:
///   Int rho,  Int y rho (1D, signed; 2D: norm of the center-of-mass
///   vector),  Int |y|^2 rho,
/// all with true (non-periodized) coordinates.
std::array<double, 3> moments(const std::vector<double>& density,
                              const Grid& g);

/// Shape of the large-time energy envelope
///   (1+t)^{-alpha} + nu (1+t)^{-1} * (alpha == 1 ? log(1+t) : 1),
/// with alpha the decay exponent min(2, d(gamma-1)) of the run.
double h4_shape(double t, double alpha_decay, double nu);

/// Fit the envelope constant C0 = max over the ledger of total/shape, fill
/// led.h4_bound with C0 * shape(t), and return C0. By construction every
/// row satisfies total <= h4_bound with equality at the fitted maximum.
/// Throws InvalidInputError on an empty ledger.
double h4_envelope(EnergyLedger& led, double alpha_decay, double nu);

}  // namespace dscale
