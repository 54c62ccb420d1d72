#pragma once

#include <array>
#include <vector>

#include "dscale/grid.hpp"
#include "dscale/wave.hpp"

namespace dscale {

/// Fluid-side representation (density and momentum) of a quantum state.
/// momentum[axis] holds rho*u_axis; only momentum[0] is populated in 1D.
struct MadelungState {
  Grid grid;
  std::vector<double> rho;
  std::array<std::vector<double>, 2> momentum;
  std::vector<double> sqrt_rho;
  double eps = 1.0;
  Frame frame = Frame::original;
  double time = 0.0;

  MadelungState(const Grid& g, double eps_, Frame fr)
      : grid(g), rho(g.size(), 0.0), sqrt_rho(g.size(), 0.0), eps(eps_),
        frame(fr) {
    for (int a = 0; a < g.dim; ++a) momentum[a].assign(g.size(), 0.0);
  }
};

/// Vacuum threshold below which momentum/velocity are defined to vanish:
/// 1e-12 times the density maximum.
double vacuum_floor(const std::vector<double>& rho);

/// Pointwise velocity u = momentum / rho with vacuum masking (u = 0 where
/// rho < vacuum_floor).
std::vector<double> velocity(const MadelungState& s, int axis);

/// rho = |psi|^2, momentum = eps * Im(conj(psi) grad psi) with a spectral
/// gradient, vacuum-masked. Mass matches the wave mass exactly.
MadelungState madelung_forward(SpectralWorkspace& W, const WaveField& f);

/// Self-similar change of fluid variables at dilation (tau, tau_dot):
///   R(y)   = tau^d rho(tau y)
///   (RU)(y) = tau^{d+1} (rho u)(tau y) - tau_dot * tau * y * R(y)
/// computed without dividing by the density. For tau > 1 the output window
/// shrinks to |y| <= L/tau and the wrapped remainder is zeroed; a stretch
/// (tau < 1 here, tau > 1 in the inverse map) throws DomainOverflowError
/// when more than 1e-6 of the mass would land outside the box.
MadelungState rescale_fluid(SpectralWorkspace& W, const MadelungState& s,
                            double tau, double taudot);

/// Inverse of rescale_fluid.
MadelungState rescale_fluid_inverse(SpectralWorkspace& W,
                                    const MadelungState& s, double tau,
                                    double taudot);

/// Self-similar change of wave variables:
///   Psi(y) = tau^{d/2} psi(tau y) exp(-i tau_dot tau |y|^2 / (2 eps)) / norm
/// where norm = ||psi|| makes the output unit-mass (frame = rescaled).
WaveField rescale_wave(SpectralWorkspace& W, const WaveField& f, double tau,
                       double taudot);

/// Inverse of rescale_wave; `norm` is the original-frame L2 norm that was
/// divided out on the way in.
WaveField rescale_wave_inverse(SpectralWorkspace& W, const WaveField& f,
                               double tau, double taudot, double norm);

/// Relative gap between eps^2 Int |grad Psi|^2 and
/// Int (eps^2 |grad sqrt(R)|^2 + R |U|^2) with vacuum-masked fluid fields.
/// Zero analytically for smooth vacuum-free states.
double kinetic_identity_residual(SpectralWorkspace& W, const WaveField& f);

/// sqrt(rho) regularized near vacuum: sqrt(rho + floor^2) - floor, which has
/// bounded gradients where rho vanishes and matches sqrt(rho) to O(floor).
void sqrt_reg(const std::vector<double>& rho, double floor,
              std::vector<double>& out);

/// Self-similar density profile tau * rho(tau * y) evaluated at arbitrary 1D
/// window points. Requires tau * max|y| <= L and reads the original samples
/// directly, so it keeps full resolution at large tau where the same-grid
/// rescale_fluid squeezes the field onto ever fewer points.
std::vector<double> rescaled_profile_1d(const std::vector<double>& rho,
                                        const Grid& g, double tau,
                                        const std::vector<double>& points);

}  // namespace dscale
