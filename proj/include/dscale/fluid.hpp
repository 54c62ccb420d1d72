#pragma once
/// One-dimensional regularized compressible flow on the periodic box, posed
/// in the self-similar frame: density R and momentum M = R*U evolve under
/// transport, barotropic + cold pressure, quadratic confinement, the quantum
/// (Bohm) stress, density-weighted viscosity, drag, and small parabolic /
/// hyperviscous / high-order capillary regularizations.  The cold pressure
/// keeps R strictly positive, so U = M/R is always well defined.
///
/// Spatial derivatives are Fourier pseudo-spectral (shared with the wave
/// module); nonlinear fluxes are 2/3-dealiased; time stepping is explicit
/// strong-stability-preserving RK3 with a stability-bound guard.

#include <vector>

#include "dscale/energy.hpp"
#include "dscale/grid.hpp"
#include "dscale/tau.hpp"

namespace dscale {

struct RegParams {
  double gamma = 2.0;    ///< adiabatic exponent, > 1
  double nu = 0.1;       ///< viscosity coefficient
  double eps = 0.0;      ///< quantum scale; 0 switches the Bohm stress off
  double alpha = 1.0;    ///< confinement strength (see default_alpha)
  double r0 = 1e-6;      ///< linear drag
  double r1 = 1e-6;      ///< cubic drag
  double delta1 = 1e-4;  ///< parabolic density diffusion; must stay < nu
  double delta2 = 1e-6;  ///< velocity hyperviscosity
  double eta1 = 1e-6;    ///< cold-pressure strength (vacuum repulsion)
  double eta2 = 1e-8;    ///< high-order capillarity strength
  double k_cold = 4.0;   ///< cold-pressure exponent, > 0
  int m = 1;             ///< capillarity half-order >= 1; force R d^{4m+3}R
  bool dealias = true;   ///< 2/3-filter the nonlinear fluxes

  /// Throws InvalidInputError on out-of-range or incompatible coefficients
  /// (notably delta1 > 0 with delta1 >= nu).
  void validate() const;

  /// Confinement exponent matched to the pressure law: min(2, dim*(gamma-1)).
  static double default_alpha(double gamma, int dim = 1);
};

struct FluidGridState {
  Grid grid;              // dim 1
  std::vector<double> R;  ///< density, strictly positive
  std::vector<double> M;  ///< momentum R*U
  double time = 0.0;
  explicit FluidGridState(const Grid& g);
};

/// Total mass of the density.
double mass(const FluidGridState& s);
/// Minimum density over the grid.
double min_density(const FluidGridState& s);
/// Fraction of mass outside the central half |y| <= L/2.  Runs are flagged
/// non-conforming when this exceeds 1e-6 (the confinement coordinate is a
/// sawtooth, so mass near the seam sees an unphysical force).
double boundary_mass_fraction(const FluidGridState& s);

/// Semi-discrete right-hand side (dR, dM) with every term of the regularized
/// system, weighted by the trajectory at the state's time:
///   dR = -div(M)/tau^2 + delta1*Lap(R)/tau^2
///   dM = -div(M U)/tau^2 - (alpha/2tau^alpha) y R - grad(R^gamma -
///        eta1 R^-k)/tau^{d(gamma-1)} - r0 U/tau^2 - r1 R U^3/tau^2
///        - delta1 (dR.dU)/tau^2 + (eps^2/2tau^2) R d(Lap sqrt(R)/sqrt(R))
///        + (nu/tau^2) d(R dU) + (nu taudot/tau) dR - (delta2/tau^2) d^4 U
///        + (eta2/tau^2) R d^{4m+3} R
/// Throws PositivityError if min R <= 0 and BlowUpError on non-finite output.
void fluid_rhs(SpectralWorkspace& W, const FluidGridState& s,
               const TauTrajectory& traj, const RegParams& p,
               std::vector<double>& dR, std::vector<double>& dM);

/// Stability limit for an explicit SSP-RK3 step at the current state: the
/// most restrictive of the advective/acoustic, dispersive (quantum,
/// capillary), diffusive (delta1, nu) and hyperviscous (delta2) bounds.
double stable_dt(SpectralWorkspace& W, const FluidGridState& s,
                 const TauTrajectory& traj, const RegParams& p);

/// One SSP-RK3 step.  dt = 0 returns the state unchanged.  Throws
/// StepRejectedError (with a suggested dt) when dt exceeds stable_dt,
/// PositivityError when a stage loses min R > 0, BlowUpError on NaN/Inf.
/// Mass is conserved to roundoff: every density term is in divergence form.
FluidGridState fluid_step(SpectralWorkspace& W, const FluidGridState& s,
                          const TauTrajectory& traj, const RegParams& p,
                          double dt);

/// BD entropy at time t: the pseudo-energy with the effective velocity
/// V = U + nu*grad(log R) in the kinetic term,
///   (1/2tau^2) Int(R V^2 + eps^2 |d sqrt R|^2)
///   + (alpha/4tau^alpha) Int y^2 R + Int R^gamma / ((gamma-1) tau^{d(gamma-1)}).
double bd_entropy(SpectralWorkspace& W, const FluidGridState& s,
                  const TauTrajectory& traj, const RegParams& p, double t);

/// Itemized energy/dissipation report at time t. `extras` carries the
/// cold-pressure and capillarity energies; `dissipation` itemizes the
/// expansion bracket, viscous/hyperviscous/drag dissipations, and the
/// delta1-weighted pressure, capillarity and quantum-entropy dissipations.
/// rhs_actual/rhs_bound are the exact and Young-split source terms of the
/// energy balance  d(total)/dt + dissipation_total = rhs_actual <= rhs_bound.
/// rhs_actual is measured through discrete transposes, so it includes the
/// seam contributions of the periodized coordinate tables; on spectrally
/// resolved states the balance then closes to the order of the time
/// integrator alone.  States that carry grid-scale structure near the seam
/// (any long run whose density floor reaches the boundary) additionally
/// leak energy through the discrete chain rules of the nonlinear terms;
/// that leak is covered by the dissipation slack in rhs_bound, which is the
/// inequality such runs are checked against.
EnergyBreakdown reg_energy_report(SpectralWorkspace& W,
                                  const FluidGridState& s,
                                  const TauTrajectory& traj,
                                  const RegParams& p, double t);

}  // namespace dscale
