#include "dscale/wave.hpp"

#include <cmath>
#include <cstddef>

#include "dscale/errors.hpp"
#include "dscale/kernels.hpp"

namespace dscale {

namespace {

// Per-thread scratch so the stepping functions allocate only on first use.
thread_local std::vector<double> t_rho;    // |psi|^2
thread_local std::vector<double> t_pow;    // |psi|^{2 sigma}
thread_local std::vector<double> t_theta;  // accumulated pointwise phase
thread_local std::vector<cplx> t_cis;      // exp(i theta)

// values *= exp(i * theta) pointwise.
void apply_phase(std::vector<cplx>& values, const std::vector<double>& theta) {
  const std::size_t n = values.size();
  t_cis.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s, c;
    sincos(theta[i], &s, &c);
    t_cis[i] = cplx(c, s);
  }
  kernels::cmul(values.data(), t_cis.data(), n);
}

void require_frame(const WaveField& f, Frame expect, const char* op) {
  if (f.frame != expect)
    throw InvalidInputError(std::string(op) + ": field is in the wrong frame");
}

}  // namespace

void NlsParams::validate(int dim) const {
  if (dim < 1 || dim > 2) throw InvalidInputError("dim must be 1 or 2");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidInputError("sigma must be positive and finite");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidInputError("lambda must be nonnegative (defocusing equation)");
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw InvalidInputError("eps must be positive");
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw InvalidInputError("mu must be nonnegative");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidInputError("alpha must be positive");
}

double NlsParams::rescaled_mu(double lambda, double sigma, double mass0) {
  if (!(mass0 > 0.0)) throw InvalidInputError("initial mass must be positive");
  // ||psi0||^{2 sigma} = (mass0)^{sigma} with mass0 the discrete L2 mass.
  return lambda * std::pow(mass0, sigma);
}

double mass(const WaveField& f) { return integrate_abs2(f.values, f.grid); }

void check_finite(const WaveField& f) {
  // A single NaN/Inf anywhere poisons the reduction, so one number suffices.
  const double s = kernels::reduce_abs2(f.values.data(), f.values.size());
  if (!std::isfinite(s))
    throw BlowUpError("non-finite wave field", f.time);
}

void step_original(SpectralWorkspace& W, WaveField& f, double dt,
                   const NlsParams& p) {
  require_frame(f, Frame::original, "step_original");
  p.validate(f.grid.dim);
  if (!(dt >= 0.0) || !std::isfinite(dt))
    throw InvalidInputError("dt must be nonnegative");
  if (dt == 0.0) return;

  const std::size_t n = f.values.size();
  // Half kinetic: exp(i eps (dt/2) Lap / 2) -> phase -(eps dt/4) |k|^2.
  W.kinetic_phase(f.values, p.eps * dt / 4.0);

  if (p.lambda != 0.0) {
    t_rho.resize(n);
    kernels::abs2(f.values.data(), t_rho.data(), n);
    pow_array(t_rho, p.sigma, t_pow);
    t_theta.resize(n);
    const double c = -p.lambda * dt / p.eps;
    for (std::size_t i = 0; i < n; ++i) t_theta[i] = c * t_pow[i];
    apply_phase(f.values, t_theta);
    if (p.dealias) W.filter23(f.values);
  }

  W.kinetic_phase(f.values, p.eps * dt / 4.0);
  f.time += dt;
  check_finite(f);
}

void step_rescaled(SpectralWorkspace& W, WaveField& f,
                   const TauTrajectory& traj, double t, double dt,
                   const NlsParams& p) {
  require_frame(f, Frame::rescaled, "step_rescaled");
  p.validate(f.grid.dim);
  if (!(dt >= 0.0) || !std::isfinite(dt))
    throw InvalidInputError("dt must be nonnegative");
  if (dt == 0.0) return;

  const int d = f.grid.dim;
  const std::size_t n = f.values.size();
  const double tm = t + 0.5 * dt;
  const double te = t + dt;

  // Exact coefficient integrals across the sub-steps (throws OutOfRangeError
  // if [t, t+dt] leaves the trajectory range). The confinement potential is
  // (tau_ddot * tau / 2) |y|^2 = (alpha / (4 tau^alpha)) |y|^2, the exact
  // image of the free/defocusing dynamics under the dilation gauge; its
  // closed-form check is the alpha = 2 lens transform, where the Gaussian
  // ground state is stationary with potential |y|^2 / (2 tau^2).
  const double kin1 = traj.phase_integral(t, tm, 2.0);
  const double kin2 = traj.phase_integral(tm, te, 2.0);
  const double conf = traj.phase_integral(t, te, p.alpha);
  const double nonl =
      p.mu != 0.0 ? traj.phase_integral(t, te, double(d) * p.sigma) : 0.0;

  W.kinetic_phase(f.values, 0.5 * p.eps * kin1);

  // Combined confinement + nonlinear rotation; |Psi| is constant along this
  // sub-flow, so integrating the coefficients gives the exact phase.
  t_theta.resize(n);
  const double cy = -0.25 * p.alpha * conf / p.eps;
  const std::vector<double>& ysq = W.ysq();
  for (std::size_t i = 0; i < n; ++i) t_theta[i] = cy * ysq[i];
  if (p.mu != 0.0) {
    t_rho.resize(n);
    kernels::abs2(f.values.data(), t_rho.data(), n);
    pow_array(t_rho, p.sigma, t_pow);
    const double cn = -p.mu * nonl / p.eps;
    for (std::size_t i = 0; i < n; ++i) t_theta[i] += cn * t_pow[i];
  }
  apply_phase(f.values, t_theta);
  if (p.dealias) W.filter23(f.values);

  W.kinetic_phase(f.values, 0.5 * p.eps * kin2);
  f.time = te;
  check_finite(f);
}

void free_evolution(SpectralWorkspace& W, WaveField& f, double t) {
  require_frame(f, Frame::original, "free_evolution");
  if (!std::isfinite(t)) throw InvalidInputError("t must be finite");
  if (t == 0.0) return;
  W.kinetic_phase(f.values, 0.5 * f.eps * t);
  f.time += t;
  check_finite(f);
}

std::vector<double> dispersive_profile(SpectralWorkspace& W,
                                       const WaveField& plus_state, double t) {
  require_frame(plus_state, Frame::original, "dispersive_profile");
  if (!(t > 0.0)) throw InvalidInputError("dispersive_profile: t must be > 0");
  check_finite(plus_state);
  (void)W;  // evaluation is off-grid; no transform workspace needed

  const Grid& g = plus_state.grid;
  const double et = plus_state.eps * t;
  const int n = g.n;

  // Frequencies xi_m = x_m / (eps t), one list reused per axis in 2D.
  std::vector<double> xis(n);
  for (int m = 0; m < n; ++m) xis[m] = g.coord1d(m) / et;

  const std::vector<cplx> hat = ft_eval(plus_state.values, g, xis);
  std::vector<double> out(hat.size());
  double amp = 1.0 / et;
  if (g.dim == 2) amp *= 1.0 / et;
  for (std::size_t i = 0; i < hat.size(); ++i) out[i] = amp * std::norm(hat[i]);

  // The trigonometric sum is periodic in xi with period 2*pi/h, so samples
  // beyond the resolved band |xi| <= pi/h alias low frequencies back in
  // (at small t the window x/(eps t) can exceed the band even though the
  // spectrum there is negligible); report zero outside the band instead.
  const double band = std::numbers::pi / g.spacing();
  if (g.dim == 1) {
    for (int m = 0; m < n; ++m)
      if (std::abs(xis[m]) > band) out[m] = 0.0;
  } else {
    for (int m0 = 0; m0 < n; ++m0)
      for (int m1 = 0; m1 < n; ++m1)
        if (std::abs(xis[m0]) > band || std::abs(xis[m1]) > band)
          out[std::size_t(m0) * n + m1] = 0.0;
  }
  return out;
}

EnergyBreakdown nls_energy(SpectralWorkspace& W, const WaveField& f,
                           const TauTrajectory& traj, double t,
                           const NlsParams& p) {
  require_frame(f, Frame::rescaled, "nls_energy");
  p.validate(f.grid.dim);
  if (std::abs(p.alpha - traj.alpha()) > 1e-12 * (1.0 + traj.alpha()))
    throw InvalidInputError("nls_energy: params.alpha does not match the trajectory");

  const int d = f.grid.dim;
  const TauPoint tp = traj.eval(t);
  const double tau = tp.tau;
  const double taudot = tp.taudot;

  EnergyBreakdown e;
  e.kinetic = 0.5 * p.eps * p.eps / (tau * tau) * W.grad_norm_sq(f.values);
  e.confinement = 0.25 * p.alpha * std::pow(tau, -p.alpha) *
                  integrate_abs2_weighted(f.values, W.ysq(), f.grid);
  if (p.mu != 0.0) {
    const std::size_t n = f.values.size();
    t_rho.resize(n);
    kernels::abs2(f.values.data(), t_rho.data(), n);
    pow_array(t_rho, p.sigma + 1.0, t_pow);
    e.potential = p.mu / (p.sigma + 1.0) *
                  std::pow(tau, -double(d) * p.sigma) * integrate(t_pow, f.grid);
  }

  // Each coefficient decays like tau^{-q}; differentiating it contributes
  // q * (tau_dot/tau) times the term, so the bracket below is exactly
  // -d(total)/dt along the flow (Hamiltonian part cancels).
  const double r = taudot / tau;
  e.dissipation["kinetic"] = r * 2.0 * e.kinetic;
  e.dissipation["confinement"] = r * p.alpha * e.confinement;
  e.dissipation["potential"] = r * double(d) * p.sigma * e.potential;
  e.finalize();
  return e;
}

EnergyBreakdown nls_energy_original(SpectralWorkspace& W, const WaveField& f,
                                    const NlsParams& p) {
  require_frame(f, Frame::original, "nls_energy_original");
  p.validate(f.grid.dim);

  EnergyBreakdown e;
  e.kinetic = 0.5 * p.eps * p.eps * W.grad_norm_sq(f.values);
  if (p.lambda != 0.0) {
    const std::size_t n = f.values.size();
    t_rho.resize(n);
    kernels::abs2(f.values.data(), t_rho.data(), n);
    pow_array(t_rho, p.sigma + 1.0, t_pow);
    e.potential = p.lambda / (p.sigma + 1.0) * integrate(t_pow, f.grid);
  }
  e.finalize();
  return e;
}

WaveField gaussian_packet(const Grid& g, double eps, double width,
                          double center, double phase_quad, bool normalize) {
  if (!(eps > 0.0)) throw InvalidInputError("eps must be positive");
  if (!(width > 0.0)) throw InvalidInputError("width must be positive");
  WaveField f(g, eps, Frame::original);

  const double amp = std::pow(M_PI * width * width, -0.25 * g.dim);
  const double q = phase_quad / eps;
  const int n = g.n;
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const double x = g.coord1d(i) - center;
      const double r2 = x * x;
      f.values[i] = amp * std::exp(-0.5 * r2 / (width * width)) *
                    std::polar(1.0, q * r2);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double x0 = g.coord1d(i) - center;
      for (int j = 0; j < n; ++j) {
        const double x1 = g.coord1d(j) - center;
        const double r2 = x0 * x0 + x1 * x1;
        f.values[std::size_t(i) * n + j] =
            amp * std::exp(-0.5 * r2 / (width * width)) *
            std::polar(1.0, q * r2);
      }
    }
  }
  if (normalize) {
    const double m = mass(f);
    if (!(m > 0.0)) throw InvalidInputError("packet has zero mass on this grid");
    kernels::scale_cplx(f.values.data(), 1.0 / std::sqrt(m), f.values.size());
  }
  return f;
}

}  // namespace dscale
