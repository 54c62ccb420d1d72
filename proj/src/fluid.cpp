#include "dscale/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dscale/errors.hpp"
#include "dscale/kernels.hpp"

namespace dscale {

namespace {

thread_local std::vector<double> t_U, t_flux, t_work, t_dRx, t_dUx, t_sR;
thread_local std::vector<cplx> t_hat;

void require_1d(const Grid& g, const char* op) {
  if (g.dim != 1) throw InvalidInputError(std::string(op) + ": 1D grids only");
}

void require_positive(const FluidGridState& s, const char* op) {
  const double mn = min_density(s);
  if (!(mn > 0.0))
    throw PositivityError(std::string(op) + ": density lost strict positivity",
                          s.time, mn);
}

// The confinement exponent enters both the force and the trajectory; using a
// trajectory solved for a different exponent is almost surely a mistake.
void require_matching_alpha(const TauTrajectory& traj, const RegParams& p,
                            const char* op) {
  if (std::abs(p.alpha - traj.alpha()) > 1e-12 * (1.0 + std::abs(p.alpha)))
    throw InvalidInputError(std::string(op) +
                            ": params.alpha must match the trajectory");
}

// d^order/dy^order with the 2/3 mask folded into the spectral pass.
void deriv_masked(SpectralWorkspace& W, const std::vector<double>& f, int order,
                  bool filt, std::vector<double>& out) {
  W.spectrum(f, t_hat);
  if (filt) {
    const std::vector<double>& mk = W.dealias_mask();
    for (std::size_t i = 0; i < t_hat.size(); ++i) t_hat[i] *= mk[i];
  }
  W.deriv_from_spectrum(t_hat, 0, order, out);
}

}  // namespace

void RegParams::validate() const {
  auto bad = [](const char* msg) { throw InvalidInputError(msg); };
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    bad("RegParams: gamma must be > 1");
  if (!(nu >= 0.0) || !std::isfinite(nu)) bad("RegParams: nu must be >= 0");
  if (!(eps >= 0.0) || !std::isfinite(eps)) bad("RegParams: eps must be >= 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    bad("RegParams: alpha must be > 0");
  if (!(r0 >= 0.0) || !(r1 >= 0.0)) bad("RegParams: drags must be >= 0");
  if (!(delta1 >= 0.0) || !(delta2 >= 0.0) || !(eta1 >= 0.0) || !(eta2 >= 0.0))
    bad("RegParams: regularization coefficients must be >= 0");
  if (delta1 > 0.0 && !(delta1 < nu))
    bad("RegParams: delta1 must stay below nu when active");
  if (!(k_cold > 0.0) || !std::isfinite(k_cold))
    bad("RegParams: k_cold must be > 0");
  if (m < 1) bad("RegParams: m must be >= 1");
}

double RegParams::default_alpha(double gamma, int dim) {
  return std::min(2.0, dim * (gamma - 1.0));
}

FluidGridState::FluidGridState(const Grid& g)
    : grid(g), R(g.size(), 1.0), M(g.size(), 0.0) {
  require_1d(g, "FluidGridState");
}

double mass(const FluidGridState& s) { return integrate(s.R, s.grid); }

double min_density(const FluidGridState& s) {
  double mn = std::numeric_limits<double>::infinity();
  for (double v : s.R) mn = std::min(mn, v);
  return mn;
}

double boundary_mass_fraction(const FluidGridState& s) {
  const double cut = 0.5 * s.grid.half_length;
  double outer = 0.0, total = 0.0;
  for (int i = 0; i < s.grid.n; ++i) {
    total += s.R[i];
    if (std::abs(s.grid.coord1d(i)) > cut) outer += s.R[i];
  }
  return total > 0.0 ? outer / total : 0.0;
}

void fluid_rhs(SpectralWorkspace& W, const FluidGridState& s,
               const TauTrajectory& traj, const RegParams& p,
               std::vector<double>& dR, std::vector<double>& dM) {
  require_1d(s.grid, "fluid_rhs");
  p.validate();
  require_positive(s, "fluid_rhs");
  require_matching_alpha(traj, p, "fluid_rhs");

  const TauPoint tp = traj.eval(s.time);
  const double tau = tp.tau;
  const double w2 = 1.0 / (tau * tau);
  const double wconf = 0.5 * p.alpha * std::pow(tau, -p.alpha);
  const double wpress = std::pow(tau, -(p.gamma - 1.0));  // d = 1
  const bool flt = p.dealias;

  const std::size_t n = s.R.size();
  dR.assign(n, 0.0);
  dM.assign(n, 0.0);
  t_U.resize(n);
  t_flux.resize(n);
  for (std::size_t i = 0; i < n; ++i) t_U[i] = s.M[i] / s.R[i];

  // ---- density: transport + parabolic diffusion (divergence form) ----
  deriv_masked(W, s.M, 1, false, t_work);
  for (std::size_t i = 0; i < n; ++i) dR[i] -= w2 * t_work[i];
  if (p.delta1 > 0.0) {
    deriv_masked(W, s.R, 2, false, t_work);
    for (std::size_t i = 0; i < n; ++i) dR[i] += p.delta1 * w2 * t_work[i];
  }

  // ---- momentum ----
  // advective flux
  for (std::size_t i = 0; i < n; ++i) t_flux[i] = s.M[i] * t_U[i];
  deriv_masked(W, t_flux, 1, flt, t_work);
  for (std::size_t i = 0; i < n; ++i) dM[i] -= w2 * t_work[i];

  // quadratic confinement (odd sawtooth coordinate)
  const std::vector<double>& y = W.coord(0);
  for (std::size_t i = 0; i < n; ++i) dM[i] -= wconf * y[i] * s.R[i];

  // barotropic + cold pressure
  for (std::size_t i = 0; i < n; ++i)
    t_flux[i] = std::pow(s.R[i], p.gamma) -
                p.eta1 * std::pow(s.R[i], -p.k_cold);
  deriv_masked(W, t_flux, 1, flt, t_work);
  for (std::size_t i = 0; i < n; ++i) dM[i] -= wpress * t_work[i];

  // drags
  if (p.r0 > 0.0)
    for (std::size_t i = 0; i < n; ++i) dM[i] -= p.r0 * w2 * t_U[i];
  if (p.r1 > 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      t_flux[i] = s.M[i] * t_U[i] * t_U[i];  // R U^3
    if (flt) W.filter23_real(t_flux);
    for (std::size_t i = 0; i < n; ++i) dM[i] -= p.r1 * w2 * t_flux[i];
  }

  // first derivatives shared by the cross, viscous and expansion terms
  deriv_masked(W, s.R, 1, false, t_dRx);
  deriv_masked(W, t_U, 1, false, t_dUx);

  if (p.delta1 > 0.0) {
    for (std::size_t i = 0; i < n; ++i) t_flux[i] = t_dRx[i] * t_dUx[i];
    if (flt) W.filter23_real(t_flux);
    for (std::size_t i = 0; i < n; ++i) dM[i] -= p.delta1 * w2 * t_flux[i];
  }

  // quantum (Bohm) stress  (eps^2/2) R d( d2 sqrt(R) / sqrt(R) )
  if (p.eps > 0.0) {
    t_sR.resize(n);
    for (std::size_t i = 0; i < n; ++i) t_sR[i] = std::sqrt(s.R[i]);
    deriv_masked(W, t_sR, 2, false, t_work);
    for (std::size_t i = 0; i < n; ++i) t_work[i] /= t_sR[i];
    deriv_masked(W, t_work, 1, false, t_work);
    for (std::size_t i = 0; i < n; ++i) t_flux[i] = s.R[i] * t_work[i];
    if (flt) W.filter23_real(t_flux);
    const double cq = 0.5 * p.eps * p.eps * w2;
    for (std::size_t i = 0; i < n; ++i) dM[i] += cq * t_flux[i];
  }

  // density-weighted viscosity and the expansion pressure it induces
  if (p.nu > 0.0) {
    for (std::size_t i = 0; i < n; ++i) t_flux[i] = s.R[i] * t_dUx[i];
    deriv_masked(W, t_flux, 1, flt, t_work);
    for (std::size_t i = 0; i < n; ++i) dM[i] += p.nu * w2 * t_work[i];
    const double ce = p.nu * tp.taudot / tau;
    for (std::size_t i = 0; i < n; ++i) dM[i] += ce * t_dRx[i];
  }

  // hyperviscosity
  if (p.delta2 > 0.0) {
    deriv_masked(W, t_U, 4, false, t_work);
    for (std::size_t i = 0; i < n; ++i) dM[i] -= p.delta2 * w2 * t_work[i];
  }

  // high-order capillarity  eta2 R d^{4m+3} R
  if (p.eta2 > 0.0) {
    deriv_masked(W, s.R, 4 * p.m + 3, false, t_work);
    for (std::size_t i = 0; i < n; ++i) t_flux[i] = s.R[i] * t_work[i];
    if (flt) W.filter23_real(t_flux);
    for (std::size_t i = 0; i < n; ++i) dM[i] += p.eta2 * w2 * t_flux[i];
  }

  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(dR[i]) || !std::isfinite(dM[i]))
      throw BlowUpError("fluid_rhs: non-finite right-hand side", s.time);
}

double stable_dt(SpectralWorkspace& W, const FluidGridState& s,
                 const TauTrajectory& traj, const RegParams& p) {
  require_1d(s.grid, "stable_dt");
  require_positive(s, "stable_dt");
  (void)W;

  const TauPoint tp = traj.eval(s.time);
  const double tau2 = tp.tau * tp.tau;
  const double kmax =
      (std::numbers::pi / s.grid.half_length) * (s.grid.n / 2);

  double maxU = 0.0, maxR = 0.0;
  double minR = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.R.size(); ++i) {
    maxU = std::max(maxU, std::abs(s.M[i] / s.R[i]));
    maxR = std::max(maxR, s.R[i]);
    minR = std::min(minR, s.R[i]);
  }

  // oscillatory rates: advection, acoustics (barotropic + cold), quantum and
  // capillary dispersion
  const double c0 = std::sqrt(p.gamma * std::pow(maxR, p.gamma - 1.0) +
                              p.eta1 * p.k_cold *
                                  std::pow(minR, -p.k_cold - 1.0));
  double im = (maxU / tau2) * kmax +
              c0 * std::pow(tp.tau, -(1.0 + 0.5 * (p.gamma - 1.0))) * kmax;
  im += 0.5 * p.eps * kmax * kmax / tau2;
  if (p.eta2 > 0.0)
    im += std::sqrt(p.eta2 * maxR) * std::pow(kmax, 2.0 * p.m + 2.0) / tau2;

  // decaying rates: parabolic diffusion, viscosity, hyperviscosity, drag
  double re = (p.delta1 + p.nu) * kmax * kmax / tau2 +
              p.delta2 * std::pow(kmax, 4.0) / (tau2 * minR) +
              p.r0 / (tau2 * minR) + p.r1 * maxU * maxU / tau2;

  // SSP-RK3 stability radii: ~sqrt(3) on the imaginary axis, ~2.51 real
  const double inf = std::numeric_limits<double>::infinity();
  const double dt_im = im > 0.0 ? std::numbers::sqrt3 / im : inf;
  const double dt_re = re > 0.0 ? 2.51 / re : inf;
  return std::min(dt_im, dt_re);
}

FluidGridState fluid_step(SpectralWorkspace& W, const FluidGridState& s,
                          const TauTrajectory& traj, const RegParams& p,
                          double dt) {
  require_1d(s.grid, "fluid_step");
  if (!std::isfinite(dt) || dt < 0.0)
    throw InvalidInputError("fluid_step: dt must be finite and nonnegative");
  if (dt == 0.0) return s;

  const double limit = stable_dt(W, s, traj, p);
  if (dt > limit)
    throw StepRejectedError("fluid_step: dt exceeds the stability bound",
                            0.8 * limit);

  const std::size_t n = s.R.size();
  std::vector<double> dR, dM;
  FluidGridState u1(s.grid), u2(s.grid), out(s.grid);

  fluid_rhs(W, s, traj, p, dR, dM);
  u1.time = s.time + dt;
  for (std::size_t i = 0; i < n; ++i) {
    u1.R[i] = s.R[i] + dt * dR[i];
    u1.M[i] = s.M[i] + dt * dM[i];
  }

  fluid_rhs(W, u1, traj, p, dR, dM);
  u2.time = s.time + 0.5 * dt;
  for (std::size_t i = 0; i < n; ++i) {
    u2.R[i] = 0.75 * s.R[i] + 0.25 * (u1.R[i] + dt * dR[i]);
    u2.M[i] = 0.75 * s.M[i] + 0.25 * (u1.M[i] + dt * dM[i]);
  }

  fluid_rhs(W, u2, traj, p, dR, dM);
  out.time = s.time + dt;
  const double c = 2.0 / 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.R[i] = s.R[i] / 3.0 + c * (u2.R[i] + dt * dR[i]);
    out.M[i] = s.M[i] / 3.0 + c * (u2.M[i] + dt * dM[i]);
  }

  require_positive(out, "fluid_step");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(out.R[i]) || !std::isfinite(out.M[i]))
      throw BlowUpError("fluid_step: non-finite state", out.time);
  return out;
}

double bd_entropy(SpectralWorkspace& W, const FluidGridState& s,
                  const TauTrajectory& traj, const RegParams& p, double t) {
  require_1d(s.grid, "bd_entropy");
  p.validate();
  require_positive(s, "bd_entropy");
  require_matching_alpha(traj, p, "bd_entropy");

  const TauPoint tp = traj.eval(t);
  const double w2 = 1.0 / (tp.tau * tp.tau);
  const std::size_t sz = s.R.size();

  // effective velocity V = U + nu * d(log R)
  t_work.resize(sz);
  for (std::size_t i = 0; i < sz; ++i) t_work[i] = std::log(s.R[i]);
  deriv_masked(W, t_work, 1, false, t_work);
  double kin = 0.0;
  for (std::size_t i = 0; i < sz; ++i) {
    const double v = s.M[i] / s.R[i] + p.nu * t_work[i];
    kin += s.R[i] * v * v;
  }
  kin *= 0.5 * w2 * s.grid.cell_volume();

  t_sR.resize(sz);
  for (std::size_t i = 0; i < sz; ++i) t_sR[i] = std::sqrt(s.R[i]);
  const double grad = 0.5 * p.eps * p.eps * w2 * W.grad_norm_sq_real(t_sR);

  const double conf = 0.25 * p.alpha * std::pow(tp.tau, -p.alpha) *
                      integrate_prod(W.ysq(), s.R, s.grid);

  t_flux.resize(sz);
  pow_array(s.R, p.gamma, t_flux);
  const double pot = std::pow(tp.tau, -(p.gamma - 1.0)) / (p.gamma - 1.0) *
                     integrate(t_flux, s.grid);

  return kin + grad + conf + pot;
}

EnergyBreakdown reg_energy_report(SpectralWorkspace& W,
                                  const FluidGridState& s,
                                  const TauTrajectory& traj,
                                  const RegParams& p, double t) {
  require_1d(s.grid, "reg_energy_report");
  p.validate();
  require_positive(s, "reg_energy_report");
  require_matching_alpha(traj, p, "reg_energy_report");

  const TauPoint tp = traj.eval(t);
  const double tau = tp.tau;
  const double r = tp.taudot / tau;
  const double w2 = 1.0 / (tau * tau);
  const double w4 = w2 * w2;
  const double wpress = std::pow(tau, -(p.gamma - 1.0));  // d = 1
  const double h = s.grid.cell_volume();
  const std::size_t n = s.R.size();

  EnergyBreakdown e;
  t_U.resize(n);
  for (std::size_t i = 0; i < n; ++i) t_U[i] = s.M[i] / s.R[i];

  // ---- energies ----
  double ru2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) ru2 += s.M[i] * t_U[i];
  ru2 *= h;
  e.kinetic = 0.5 * w2 * ru2;

  t_sR.resize(n);
  for (std::size_t i = 0; i < n; ++i) t_sR[i] = std::sqrt(s.R[i]);
  const double gsq = W.grad_norm_sq_real(t_sR);
  e.gradient = 0.5 * p.eps * p.eps * w2 * gsq;

  const double y2r = integrate_prod(W.ysq(), s.R, s.grid);
  e.confinement = 0.25 * p.alpha * std::pow(tau, -p.alpha) * y2r;

  t_flux.resize(n);
  pow_array(s.R, p.gamma, t_flux);
  const double rg = integrate(t_flux, s.grid);
  e.potential = wpress / (p.gamma - 1.0) * rg;

  double rmk = 0.0;
  if (p.eta1 > 0.0) {
    pow_array(s.R, -p.k_cold, t_flux);
    rmk = integrate(t_flux, s.grid);
    e.extras["cold_pressure"] = p.eta1 * wpress / (p.k_cold + 1.0) * rmk;
  }
  double capg = 0.0;
  if (p.eta2 > 0.0) {
    deriv_masked(W, s.R, 2 * p.m + 1, false, t_work);
    for (std::size_t i = 0; i < n; ++i) capg += t_work[i] * t_work[i];
    capg *= h;
    e.extras["capillarity"] = 0.5 * p.eta2 * w2 * capg;
  }

  // ---- dissipations ----
  // expansion bracket (time dependence of the tau weights)
  e.dissipation["bracket_kinetic"] =
      r * w2 * (ru2 + p.eps * p.eps * gsq);
  e.dissipation["bracket_confinement"] =
      r * 0.25 * p.alpha * p.alpha * std::pow(tau, -p.alpha) * y2r;
  e.dissipation["bracket_pressure"] = r * wpress * rg;  // d = 1
  if (p.eta1 > 0.0)
    e.dissipation["bracket_cold"] =
        r * (p.gamma - 1.0) * p.eta1 * wpress / (p.k_cold + 1.0) * rmk;
  if (p.eta2 > 0.0)
    e.dissipation["bracket_capillarity"] = r * p.eta2 * w2 * capg;

  deriv_masked(W, t_U, 1, false, t_dUx);
  double rdu = 0.0, rdu2 = 0.0, du2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rdu += s.R[i] * t_dUx[i];
    rdu2 += s.R[i] * t_dUx[i] * t_dUx[i];
    du2 += t_U[i] * t_U[i];
  }
  rdu *= h;
  rdu2 *= h;
  du2 *= h;
  if (p.nu > 0.0) e.dissipation["viscous"] = p.nu * w4 * rdu2;
  if (p.delta2 > 0.0) {
    deriv_masked(W, t_U, 2, false, t_work);
    double d2u2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2u2 += t_work[i] * t_work[i];
    e.dissipation["hyperviscous"] = p.delta2 * w4 * d2u2 * h;
  }
  if (p.r0 > 0.0) e.dissipation["drag0"] = p.r0 * w4 * du2;
  if (p.r1 > 0.0) {
    double ru4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u2 = t_U[i] * t_U[i];
      ru4 += s.R[i] * u2 * u2;
    }
    e.dissipation["drag1"] = p.r1 * w4 * ru4 * h;
  }
  if (p.delta1 > 0.0) {
    deriv_masked(W, s.R, 1, false, t_dRx);
    double press = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double c = p.gamma * std::pow(s.R[i], p.gamma - 2.0);
      if (p.eta1 > 0.0)
        c += p.eta1 * p.k_cold * std::pow(s.R[i], -p.k_cold - 2.0);
      press += c * t_dRx[i] * t_dRx[i];
    }
    e.dissipation["diffusion_pressure"] = p.delta1 * w2 * wpress * press * h;
    if (p.eta2 > 0.0) {
      deriv_masked(W, s.R, 2 * p.m + 2, false, t_work);
      double hi = 0.0;
      for (std::size_t i = 0; i < n; ++i) hi += t_work[i] * t_work[i];
      e.dissipation["diffusion_capillarity"] = p.delta1 * p.eta2 * w4 * hi * h;
    }
    if (p.eps > 0.0) {
      // d/dt of the capillary energy under the parabolic diffusion:
      // Int (d2 sqrt R / sqrt R) d2 R = (1/2) Int R (d2 log R)^2
      for (std::size_t i = 0; i < n; ++i) t_work[i] = std::log(s.R[i]);
      deriv_masked(W, t_work, 2, false, t_work);
      double ent = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        ent += s.R[i] * t_work[i] * t_work[i];
      e.dissipation["diffusion_quantum"] =
          0.25 * p.delta1 * p.eps * p.eps * w4 * ent * h;
    }
  }
  e.finalize();

  // ---- energy-balance source:  d(total)/dt + dissipation_total = rhs ----
  // Both confinement sources are evaluated through exact discrete transposes
  // so the reported rhs is what the semi-discrete system actually produces.
  // The periodized |y|^2 has a kink at the seam, so d2|y|^2 is not the
  // constant 2 and d|y|^2 is not exactly twice the sawtooth table; for data
  // with mass near the boundary the difference is a real energy source of the
  // discretization, not a time-stepping error.
  double c2r = 0.0;
  if (p.delta1 > 0.0) {
    deriv_masked(W, W.ysq(), 2, false, t_work);
    for (std::size_t i = 0; i < n; ++i) c2r += t_work[i] * s.R[i];
    c2r *= h;
  }
  double seam = 0.0;
  {
    deriv_masked(W, W.ysq(), 1, false, t_work);
    const std::vector<double>& y = W.coord(0);
    for (std::size_t i = 0; i < n; ++i)
      seam += (t_work[i] - 2.0 * y[i]) * s.M[i];
    seam *= h;
  }
  const double m0 = mass(s);
  e.rhs_actual =
      0.25 * p.alpha * std::pow(tau, -(2.0 + p.alpha)) *
          (p.delta1 * c2r + seam) -
      p.nu * tp.taudot / (tau * tau * tau) * rdu;
  e.rhs_bound = (p.alpha * p.delta1 * std::pow(tau, -(2.0 + p.alpha)) +
                 p.nu * r * r) *
                    m0 +
                0.5 * e.dissipation_total;
  return e;
}

}  // namespace dscale
