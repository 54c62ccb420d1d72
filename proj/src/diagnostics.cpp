// Run-level functionals: original-frame and momentum-corrected energies, the
// rescaled pseudo-energy with its dissipation bracket, moment monitors,
// decay-exponent fitting, the large-time energy envelope, and 1D
// Wasserstein-based profile convergence.

#include "dscale/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dscale/errors.hpp"

namespace dscale {

namespace {

thread_local std::vector<double> t_sqrt, t_pow, t_work, t_c1, t_c2;

void require_diag(bool ok, const char* msg) {
  if (!ok) throw InvalidInputError(msg);
}

// True (non-periodized) coordinate of flattened index i along `axis`.
double coord_at(const Grid& g, std::size_t i, int axis) {
  if (g.dim == 1) return g.coord1d(static_cast<int>(i));
  const std::size_t n = static_cast<std::size_t>(g.n);
  return g.coord1d(static_cast<int>(axis == 0 ? i / n : i % n));
}

// (1/2) Int rho |u|^2 with vacuum-masked velocities.
double kinetic_half(const MadelungState& s) {
  double kin = 0.0;
  for (int a = 0; a < s.grid.dim; ++a) {
    const std::vector<double> u = velocity(s, a);
    kin += 0.5 * integrate_prod(s.momentum[a], u, s.grid);
  }
  return kin;
}

// Int |grad sqrt(rho)|^2 through the regularized square root.
double grad_sqrt_sq(SpectralWorkspace& W, const MadelungState& s) {
  sqrt_reg(s.rho, vacuum_floor(s.rho), t_sqrt);
  return W.grad_norm_sq_real(t_sqrt);
}

double pressure_integral(const MadelungState& s, double gamma) {
  pow_array(s.rho, gamma, t_pow);
  return integrate(t_pow, s.grid);
}

}  // namespace

EnergyBreakdown energy_original(SpectralWorkspace& W, const MadelungState& s,
                                double eps, double gamma) {
  require_diag(s.frame == Frame::original,
               "energy_original: state must be original-frame");
  require_diag(eps >= 0.0, "energy_original: eps must be >= 0");
  require_diag(gamma > 1.0, "energy_original: gamma must be > 1");
  require_diag(W.grid() == s.grid, "energy_original: workspace grid mismatch");

  EnergyBreakdown e;
  e.kinetic = kinetic_half(s);
  e.gradient = 0.5 * eps * eps * grad_sqrt_sq(W, s);
  e.potential = pressure_integral(s, gamma) / (gamma - 1.0);
  e.finalize();
  return e;
}

BFunctional b_functional(SpectralWorkspace& W, const MadelungState& s,
                         double t, double eps, double gamma) {
  require_diag(t > 0.0, "b_functional: t must be > 0");
  require_diag(s.frame == Frame::original,
               "b_functional: state must be original-frame");
  require_diag(eps >= 0.0, "b_functional: eps must be >= 0");
  require_diag(gamma > 1.0, "b_functional: gamma must be > 1");
  require_diag(W.grid() == s.grid, "b_functional: workspace grid mismatch");

  const Grid& g = s.grid;
  BFunctional b;
  double kin = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const std::vector<double> u = velocity(s, a);
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
      const double w = u[i] - coord_at(g, i, a) / t;
      kin += s.rho[i] * w * w;
    }
  }
  b.kinetic = 0.5 * kin * g.cell_volume();
  b.gradient = 0.5 * eps * eps * grad_sqrt_sq(W, s);
  b.pressure = pressure_integral(s, gamma) / (gamma - 1.0);
  b.b = b.kinetic + b.gradient + b.pressure;
  b.a = t * t * b.b;
  return b;
}

EnergyBreakdown pseudo_energy_fluid(SpectralWorkspace& W,
                                    const MadelungState& s,
                                    const TauTrajectory& traj, double t,
                                    double eps, double nu, double gamma,
                                    double alpha) {
  require_diag(s.frame == Frame::rescaled,
               "pseudo_energy_fluid: state must be rescaled-frame");
  require_diag(t >= 0.0, "pseudo_energy_fluid: t must be >= 0");
  require_diag(eps >= 0.0, "pseudo_energy_fluid: eps must be >= 0");
  require_diag(nu >= 0.0, "pseudo_energy_fluid: nu must be >= 0");
  require_diag(gamma > 1.0, "pseudo_energy_fluid: gamma must be > 1");
  require_diag(W.grid() == s.grid,
               "pseudo_energy_fluid: workspace grid mismatch");
  if (std::abs(alpha - traj.alpha()) > 1e-12 * (1.0 + std::abs(alpha)))
    throw InvalidInputError(
        "pseudo_energy_fluid: alpha must match the trajectory");

  const Grid& g = s.grid;
  const TauPoint tp = traj.eval(t);
  const double w2 = 1.0 / (tp.tau * tp.tau);
  const double d = static_cast<double>(g.dim);

  EnergyBreakdown e;
  e.kinetic = w2 * kinetic_half(s);
  e.gradient = 0.5 * eps * eps * w2 * grad_sqrt_sq(W, s);
  e.confinement = 0.25 * alpha * std::pow(tp.tau, -alpha) *
                  integrate_prod(W.ysq(), s.rho, g);
  e.potential = std::pow(tp.tau, -d * (gamma - 1.0)) / (gamma - 1.0) *
                pressure_integral(s, gamma);

  const double r = tp.taudot / tp.tau;
  e.dissipation["bracket_kinetic"] = 2.0 * r * (e.kinetic + e.gradient);
  e.dissipation["bracket_confinement"] = r * alpha * e.confinement;
  e.dissipation["bracket_pressure"] = r * d * (gamma - 1.0) * e.potential;
  if (nu > 0.0) {
    double acc = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const std::vector<double> u = velocity(s, a);
      for (int ax = 0; ax < g.dim; ++ax) {
        W.deriv(u, ax, 1, t_work);
        for (std::size_t i = 0; i < t_work.size(); ++i)
          acc += s.rho[i] * t_work[i] * t_work[i];
      }
    }
    e.dissipation["viscous"] = nu * w2 * w2 * acc * g.cell_volume();
  }
  e.finalize();
  return e;
}

DecayFit fit_decay(const std::vector<double>& times,
                   const std::vector<double>& values,
                   const TauTrajectory& traj, double t_lo, double t_hi) {
  require_diag(times.size() == values.size(),
               "fit_decay: times/values size mismatch");
  require_diag(t_lo < t_hi, "fit_decay: window must satisfy t_lo < t_hi");

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 0.0))
      throw InvalidInputError(
          "fit_decay: values must be positive inside the window");
    xs.push_back(std::log(traj.eval(times[i]).tau));
    ys.push_back(std::log(values[i]));
  }
  if (xs.size() < 8)
    throw InvalidInputError(
        "fit_decay: need at least 8 samples inside the window");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  require_diag(sxx > 0.0, "fit_decay: dilation must vary across the window");

  DecayFit f;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.count = xs.size();
  double r2 = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double resid = ys[i] - f.intercept - f.exponent * xs[i];
    r2 += resid * resid;
  }
  f.residual = std::sqrt(r2 / n);
  return f;
}

namespace {

// Unit-mass CDF by trapezoidal cumulation; throws on nonpositive total mass.
void unit_cdf(const std::vector<double>& rho, double h,
              std::vector<double>& c) {
  c.assign(rho.size(), 0.0);
  for (std::size_t i = 1; i < rho.size(); ++i)
    c[i] = c[i - 1] + 0.5 * h * (rho[i - 1] + rho[i]);
  const double total = c.back();
  if (!(total > 0.0))
    throw InvalidInputError(
        "wasserstein1_1d: density must have positive total mass");
  for (auto& v : c) v /= total;
}

}  // namespace

double wasserstein1_1d(const std::vector<double>& rho1,
                       const std::vector<double>& rho2, const Grid& g) {
  require_diag(g.dim == 1, "wasserstein1_1d: densities must live on a 1D grid");
  require_diag(rho1.size() == g.size() && rho2.size() == g.size(),
               "wasserstein1_1d: density size mismatch");
  const double h = g.spacing();
  unit_cdf(rho1, h, t_c1);
  unit_cdf(rho2, h, t_c2);
  double acc = 0.0;
  for (std::size_t i = 0; i < t_c1.size(); ++i) {
    const double d = std::abs(t_c1[i] - t_c2[i]);
    acc += (i == 0 || i + 1 == t_c1.size()) ? 0.5 * d : d;
  }
  return acc * h;
}

ProfileConvergence profile_converge(
    const std::vector<double>& times,
    const std::vector<std::vector<double>>& densities, const Grid& g,
    double threshold) {
  require_diag(times.size() == densities.size(),
               "profile_converge: times/densities size mismatch");
  if (times.size() < 4)
    throw InvalidInputError("profile_converge: need at least 4 snapshots");
  require_diag(times.front() > 0.0,
               "profile_converge: snapshot times must be positive");
  for (std::size_t i = 1; i < times.size(); ++i)
    require_diag(times[i] > times[i - 1],
                 "profile_converge: times must be strictly increasing");
  if (times.back() < 10.0 * times.front())
    throw InvalidInputError(
        "profile_converge: snapshots must span at least one decade in t");

  ProfileConvergence pc;
  pc.reference_time = times.back();
  pc.times = times;
  pc.distances.reserve(times.size());
  for (const auto& rho : densities)
    pc.distances.push_back(wasserstein1_1d(rho, densities.back(), g));

  bool monotone = true;
  for (std::size_t i = 1; i < pc.distances.size(); ++i)
    monotone = monotone && pc.distances[i] <= 1.1 * pc.distances[i - 1] + 1e-14;
  pc.last_decade_max = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] >= pc.reference_time / 10.0)
      pc.last_decade_max = std::max(pc.last_decade_max, pc.distances[i]);
  pc.cauchy_flag = monotone && pc.last_decade_max < threshold;
  return pc;
}

std::array<double, 3> moments(const std::vector<double>& density,
                              const Grid& g) {
  require_diag(density.size() == g.size(), "moments: density size mismatch");
  double m0 = 0.0, m2 = 0.0;
  double com[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double rho = density[i];
    m0 += rho;
    for (int a = 0; a < g.dim; ++a) {
      const double y = coord_at(g, i, a);
      com[a] += y * rho;
      m2 += y * y * rho;
    }
  }
  const double vol = g.cell_volume();
  const double first =
      g.dim == 1 ? com[0] : std::sqrt(com[0] * com[0] + com[1] * com[1]);
  return {m0 * vol, first * vol, m2 * vol};
}

double h4_shape(double t, double alpha_decay, double nu) {
  const double s = 1.0 + t;
  const bool log_branch = std::abs(alpha_decay - 1.0) < 1e-12;
  return std::pow(s, -alpha_decay) +
         nu / s * (log_branch ? std::log(s) : 1.0);
}

double h4_envelope(EnergyLedger& led, double alpha_decay, double nu) {
  if (led.size() == 0) throw InvalidInputError("h4_envelope: ledger is empty");
  double c0 = 0.0;
  for (std::size_t i = 0; i < led.size(); ++i)
    c0 = std::max(c0,
                  led.rows[i].total / h4_shape(led.times[i], alpha_decay, nu));
  led.h4_bound.assign(led.size(), 0.0);
  for (std::size_t i = 0; i < led.size(); ++i)
    led.h4_bound[i] = c0 * h4_shape(led.times[i], alpha_decay, nu);
  return c0;
}

}  // namespace dscale
