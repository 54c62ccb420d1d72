#pragma once

#include <vector>

#include "dscale/energy.hpp"
#include "dscale/grid.hpp"
#include "dscale/tau.hpp"

namespace dscale {

/// Which set of variables a field lives in: the original lab frame, or the
/// self-similar frame obtained by the time-dependent dilation tau(t).
enum class Frame { original, rescaled };

/// Complex wave function sampled on a periodic grid (row-major).
struct WaveField {
  Grid grid;
  std::vector<cplx> values;
  double eps = 1.0;  ///< semiclassical parameter, > 0
  Frame frame = Frame::original;
  double time = 0.0;

  WaveField(const Grid& g, double eps_, Frame fr)
      : grid(g), values(g.size(), cplx(0.0, 0.0)), eps(eps_), frame(fr) {}
};

/// Parameters of the defocusing power-law Schroedinger equation
///   i eps d_t psi + (eps^2/2) Lap psi = lambda |psi|^{2 sigma} psi.
/// In the rescaled frame the coupling becomes mu = lambda * mass0^sigma and
/// the confinement strength is set by the dilation exponent alpha.
struct NlsParams {
  double sigma = 1.0;   ///< nonlinearity power, > 0
  double lambda = 0.0;  ///< defocusing coupling, >= 0
  double eps = 1.0;     ///< semiclassical parameter, > 0
  double mu = 0.0;      ///< rescaled coupling lambda * ||psi0||^{2 sigma}
  double alpha = 1.0;   ///< dilation exponent, > 0
  bool dealias = false; ///< 2/3-rule filter after the nonlinear sub-step

  /// Throws InvalidInputError on out-of-range parameters. The power
  /// nonlinearity is energy-subcritical automatically for dim in {1, 2}.
  void validate(int dim) const;

  /// mu for rescaled-frame runs started from data of the given discrete mass.
  static double rescaled_mu(double lambda, double sigma, double mass0);
};

/// Discrete mass  sum |values|^2 * spacing^d.
double mass(const WaveField& f);

/// Throws BlowUpError (stamped with f.time) if any value is non-finite.
void check_finite(const WaveField& f);

/// One Strang step of the original-frame equation, in place:
/// half kinetic / full nonlinear phase / half kinetic. Mass is preserved to
/// roundoff; dt = 0 is an exact identity.
void step_original(SpectralWorkspace& W, WaveField& f, double dt,
                   const NlsParams& p);

/// One Strang step of the rescaled-frame equation
///   i eps d_t Psi + (eps^2 / (2 tau^2)) Lap Psi
///     = (alpha / (4 tau^alpha)) |y|^2 Psi + (mu / tau^{d sigma}) |Psi|^{2 sigma} Psi
/// over [t, t + dt], in place. The confinement coefficient is
/// tau_ddot * tau / 2, the exact image of the original-frame dynamics under
/// the dilation gauge. All time-dependent coefficients are integrated exactly
/// across their sub-steps via TauTrajectory::phase_integral, so the kinetic
/// sub-flows and the combined confinement+nonlinear phase rotation are exact;
/// the splitting error is the only source of time discretization error
/// (order 2, self-adjoint).
void step_rescaled(SpectralWorkspace& W, WaveField& f,
                   const TauTrajectory& traj, double t, double dt,
                   const NlsParams& p);

/// Exact free propagator exp(i*eps*t*Lap/2) on the periodic grid, in place.
/// t may be negative (used to estimate scattering data by back-propagation).
void free_evolution(SpectralWorkspace& W, WaveField& f, double t);

/// Large-time dispersive density (eps*t)^{-d} |FT(psi_plus)(x/(eps*t))|^2
/// sampled at the grid points of plus_state. The Fourier transform uses the
/// unitary convention (2 pi)^{-d/2} Int e^{-i x xi} and is evaluated off-grid
/// by direct trigonometric summation; frequencies beyond the resolved band
/// |xi| <= pi/h (reached near the box edge when eps*t < 2L/(pi/h)) evaluate
/// to zero rather than to the aliased periodic extension.
std::vector<double> dispersive_profile(SpectralWorkspace& W,
                                       const WaveField& plus_state, double t);

/// Itemized rescaled-frame pseudo-energy at time t:
///   kinetic      (eps^2 / (2 tau^2)) ||grad Psi||^2
///   confinement  (alpha / (4 tau^alpha)) Int |y|^2 |Psi|^2
///   potential    (mu / ((sigma+1) tau^{d sigma})) Int |Psi|^{2 sigma + 2}
/// plus the matching dissipation bracket (tau_dot/tau) * (2*kinetic
/// + alpha*confinement + d*sigma*potential), so that
/// d(total)/dt + dissipation_total = 0 along exact solutions. The decay
/// exponent of the total is min(2, alpha, d*sigma) by the same bracket.
EnergyBreakdown nls_energy(SpectralWorkspace& W, const WaveField& f,
                           const TauTrajectory& traj, double t,
                           const NlsParams& p);

/// Conserved original-frame energy: (eps^2/2) ||grad psi||^2
/// + lambda/(sigma+1) Int |psi|^{2 sigma + 2}.
EnergyBreakdown nls_energy_original(SpectralWorkspace& W, const WaveField& f,
                                    const NlsParams& p);

/// Gaussian packet (pi w^2)^{-d/4} exp(-|x - c|^2 / (2 w^2))
///                 * exp(i q |x - c|^2 / eps)
/// optionally normalized to exact discrete unit mass. center shifts every
/// axis by the same amount in 2D.
WaveField gaussian_packet(const Grid& g, double eps, double width = 1.0,
                          double center = 0.0, double phase_quad = 0.0,
                          bool normalize = true);

}  // namespace dscale
