#include "dscale/madelung.hpp"

#include <algorithm>
#include <cmath>

#include "dscale/errors.hpp"
#include "dscale/kernels.hpp"

namespace dscale {

namespace {

// Dilation policy.  out(y) = f(s*y):
//  * compression (s > 1): every output point with some |y_axis| > L/s reads
//    wrapped data from the far side of the box.  The true field there lives
//    outside the represented window and is zero for admissible localized
//    states, so those points are zeroed after the dilation.
//  * stretch (s < 1): only the input region with all |x_axis| <= s*L maps
//    into the box; significant mass outside it cannot be represented and the
//    operation is rejected.

// Fraction of sum|weight| at points with any |coord_axis| > cut.
double boxed_out_fraction(const Grid& g, const std::vector<double>& weight,
                          double cut) {
  double bad = 0.0, total = 0.0;
  const int n = g.n;
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const double w = std::abs(weight[i]);
      total += w;
      if (std::abs(g.coord1d(i)) > cut) bad += w;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const bool bi = std::abs(g.coord1d(i)) > cut;
      for (int j = 0; j < n; ++j) {
        const double w = std::abs(weight[std::size_t(i) * n + j]);
        total += w;
        if (bi || std::abs(g.coord1d(j)) > cut) bad += w;
      }
    }
  }
  return total > 0.0 ? bad / total : 0.0;
}

void require_fits(const Grid& g, const std::vector<double>& weight, double s,
                  const char* op) {
  if (s >= 1.0) return;
  const double frac = boxed_out_fraction(g, weight, s * g.half_length);
  if (frac > 1e-6)
    throw DomainOverflowError(std::string(op) +
                              ": stretched field would leave the domain "
                              "(mass fraction " +
                              std::to_string(frac) +
                              " outside the representable window)");
}

template <typename T>
void window_compressed(const Grid& g, std::vector<T>& field, double s) {
  if (s <= 1.0) return;
  const double cut = g.half_length / s;
  const int n = g.n;
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i)
      if (std::abs(g.coord1d(i)) > cut) field[i] = T{};
  } else {
    for (int i = 0; i < n; ++i) {
      const bool bi = std::abs(g.coord1d(i)) > cut;
      for (int j = 0; j < n; ++j)
        if (bi || std::abs(g.coord1d(j)) > cut)
          field[std::size_t(i) * n + j] = T{};
    }
  }
}

void require_positive_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw InvalidInputError("tau must be positive and finite");
}

// values *= exp(i * c * |y|^2) pointwise (sawtooth |y|^2 of the workspace).
void quadratic_phase(std::vector<cplx>& values, const std::vector<double>& ysq,
                     double c) {
  if (c == 0.0) return;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double s, co;
    sincos(c * ysq[i], &s, &co);
    values[i] *= cplx(co, s);
  }
}

}  // namespace

double vacuum_floor(const std::vector<double>& rho) {
  double m = 0.0;
  for (double v : rho) m = std::max(m, v);
  return 1e-12 * m;
}

void sqrt_reg(const std::vector<double>& rho, double floor,
              std::vector<double>& out) {
  out.resize(rho.size());
  const double f2 = floor * floor;
  for (std::size_t i = 0; i < rho.size(); ++i)
    out[i] = std::sqrt(std::max(rho[i], 0.0) + f2) - floor;
}

std::vector<double> velocity(const MadelungState& s, int axis) {
  if (axis < 0 || axis >= s.grid.dim)
    throw InvalidInputError("velocity: axis out of range");
  const double floor = vacuum_floor(s.rho);
  std::vector<double> u(s.rho.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (s.rho[i] >= floor && s.rho[i] > 0.0) u[i] = s.momentum[axis][i] / s.rho[i];
  return u;
}

MadelungState madelung_forward(SpectralWorkspace& W, const WaveField& f) {
  check_finite(f);
  MadelungState s(f.grid, f.eps, f.frame);
  s.time = f.time;
  const std::size_t n = f.values.size();
  kernels::abs2(f.values.data(), s.rho.data(), n);
  for (std::size_t i = 0; i < n; ++i) s.sqrt_rho[i] = std::sqrt(s.rho[i]);

  std::vector<cplx> dpsi;
  for (int a = 0; a < f.grid.dim; ++a) {
    W.deriv_cplx(f.values, a, dpsi);
    std::vector<double>& m = s.momentum[a];
    for (std::size_t i = 0; i < n; ++i) {
      // Im(conj(psi) * dpsi) = Re(psi) Im(dpsi) - Im(psi) Re(dpsi)
      m[i] = f.eps * (f.values[i].real() * dpsi[i].imag() -
                      f.values[i].imag() * dpsi[i].real());
    }
  }
  const double floor = vacuum_floor(s.rho);
  for (std::size_t i = 0; i < n; ++i)
    if (s.rho[i] < floor)
      for (int a = 0; a < f.grid.dim; ++a) s.momentum[a][i] = 0.0;
  return s;
}

MadelungState rescale_fluid(SpectralWorkspace& W, const MadelungState& s,
                            double tau, double taudot) {
  if (s.frame != Frame::original)
    throw InvalidInputError("rescale_fluid: input must be original-frame");
  require_positive_tau(tau);

  MadelungState out(s.grid, s.eps, Frame::rescaled);
  out.time = s.time;
  const int d = s.grid.dim;
  const std::size_t n = s.rho.size();

  if (tau == 1.0) {
    out.rho = s.rho;
    for (int a = 0; a < d; ++a) out.momentum[a] = s.momentum[a];
  } else {
    require_fits(s.grid, s.rho, tau, "rescale_fluid");
    const double td = std::pow(tau, double(d));
    out.rho = dilate_real(W, s.rho, tau);
    // interpolation can undershoot slightly below zero in the tails
    for (std::size_t i = 0; i < n; ++i)
      out.rho[i] = std::max(out.rho[i] * td, 0.0);
    window_compressed(s.grid, out.rho, tau);
    for (int a = 0; a < d; ++a) {
      out.momentum[a] = dilate_real(W, s.momentum[a], tau);
      kernels::scale_real(out.momentum[a].data(), td * tau,
                          out.momentum[a].size());
      window_compressed(s.grid, out.momentum[a], tau);
    }
  }

  if (taudot != 0.0) {
    // (RU)(y) -= tau_dot * tau * y_axis * R(y), evaluated without division
    const double c = taudot * tau;
    for (int a = 0; a < d; ++a) {
      const std::vector<double>& ya = W.coord(a);
      std::vector<double>& m = out.momentum[a];
      for (std::size_t i = 0; i < n; ++i) m[i] -= c * ya[i] * out.rho[i];
    }
  }

  for (std::size_t i = 0; i < n; ++i) out.sqrt_rho[i] = std::sqrt(out.rho[i]);
  const double floor = vacuum_floor(out.rho);
  for (std::size_t i = 0; i < n; ++i)
    if (out.rho[i] < floor)
      for (int a = 0; a < d; ++a) out.momentum[a][i] = 0.0;
  return out;
}

MadelungState rescale_fluid_inverse(SpectralWorkspace& W,
                                    const MadelungState& s, double tau,
                                    double taudot) {
  if (s.frame != Frame::rescaled)
    throw InvalidInputError("rescale_fluid_inverse: input must be rescaled-frame");
  require_positive_tau(tau);

  MadelungState out(s.grid, s.eps, Frame::original);
  out.time = s.time;
  const int d = s.grid.dim;
  const std::size_t n = s.rho.size();
  const double inv = 1.0 / tau;

  if (tau == 1.0) {
    out.rho = s.rho;
    for (int a = 0; a < d; ++a) out.momentum[a] = s.momentum[a];
  } else {
    require_fits(s.grid, s.rho, inv, "rescale_fluid_inverse");
    const double td = std::pow(tau, -double(d));
    out.rho = dilate_real(W, s.rho, inv);
    for (std::size_t i = 0; i < n; ++i)
      out.rho[i] = std::max(out.rho[i] * td, 0.0);
    window_compressed(s.grid, out.rho, inv);
    for (int a = 0; a < d; ++a) {
      out.momentum[a] = dilate_real(W, s.momentum[a], inv);
      kernels::scale_real(out.momentum[a].data(), td * inv,
                          out.momentum[a].size());
      window_compressed(s.grid, out.momentum[a], inv);
    }
  }

  if (taudot != 0.0) {
    // (rho u)(x) += tau_dot * (x_axis / tau) * rho(x)
    const double c = taudot * inv;
    for (int a = 0; a < d; ++a) {
      const std::vector<double>& xa = W.coord(a);
      std::vector<double>& m = out.momentum[a];
      for (std::size_t i = 0; i < n; ++i) m[i] += c * xa[i] * out.rho[i];
    }
  }

  for (std::size_t i = 0; i < n; ++i) out.sqrt_rho[i] = std::sqrt(out.rho[i]);
  const double floor = vacuum_floor(out.rho);
  for (std::size_t i = 0; i < n; ++i)
    if (out.rho[i] < floor)
      for (int a = 0; a < d; ++a) out.momentum[a][i] = 0.0;
  return out;
}

WaveField rescale_wave(SpectralWorkspace& W, const WaveField& f, double tau,
                       double taudot) {
  if (f.frame != Frame::original)
    throw InvalidInputError("rescale_wave: input must be original-frame");
  require_positive_tau(tau);
  check_finite(f);

  const double norm = std::sqrt(mass(f));
  if (!(norm > 0.0)) throw InvalidInputError("rescale_wave: zero-mass field");

  WaveField out(f.grid, f.eps, Frame::rescaled);
  out.time = f.time;
  if (tau == 1.0) {
    out.values = f.values;
    kernels::scale_cplx(out.values.data(), 1.0 / norm, out.values.size());
  } else {
    if (tau < 1.0) {
      std::vector<double> w(f.values.size());
      kernels::abs2(f.values.data(), w.data(), f.values.size());
      require_fits(f.grid, w, tau, "rescale_wave");
    }
    out.values = dilate(W, f.values, tau);
    const double amp = std::pow(tau, 0.5 * f.grid.dim) / norm;
    kernels::scale_cplx(out.values.data(), amp, out.values.size());
    window_compressed(f.grid, out.values, tau);
  }
  quadratic_phase(out.values, W.ysq(), -taudot * tau / (2.0 * f.eps));
  return out;
}

WaveField rescale_wave_inverse(SpectralWorkspace& W, const WaveField& f,
                               double tau, double taudot, double norm) {
  if (f.frame != Frame::rescaled)
    throw InvalidInputError("rescale_wave_inverse: input must be rescaled-frame");
  require_positive_tau(tau);
  if (!(norm > 0.0)) throw InvalidInputError("norm must be positive");
  check_finite(f);

  WaveField out(f.grid, f.eps, Frame::original);
  out.time = f.time;
  if (tau == 1.0) {
    out.values = f.values;
    kernels::scale_cplx(out.values.data(), norm, out.values.size());
  } else {
    if (tau > 1.0) {
      std::vector<double> w(f.values.size());
      kernels::abs2(f.values.data(), w.data(), f.values.size());
      require_fits(f.grid, w, 1.0 / tau, "rescale_wave_inverse");
    }
    out.values = dilate(W, f.values, 1.0 / tau);
    const double amp = norm * std::pow(tau, -0.5 * f.grid.dim);
    kernels::scale_cplx(out.values.data(), amp, out.values.size());
    window_compressed(f.grid, out.values, 1.0 / tau);
  }
  quadratic_phase(out.values, W.ysq(), taudot / (2.0 * tau * f.eps));
  return out;
}

double kinetic_identity_residual(SpectralWorkspace& W, const WaveField& f) {
  const double g2 = f.eps * f.eps * W.grad_norm_sq(f.values);

  const MadelungState s = madelung_forward(W, f);
  const double floor = vacuum_floor(s.rho);
  std::vector<double> sq;
  sqrt_reg(s.rho, floor, sq);
  double fluid = f.eps * f.eps * W.grad_norm_sq_real(sq);

  double ru2 = 0.0;
  for (int a = 0; a < f.grid.dim; ++a) {
    const std::vector<double>& m = s.momentum[a];
    for (std::size_t i = 0; i < m.size(); ++i)
      if (s.rho[i] >= floor && s.rho[i] > 0.0) ru2 += m[i] * m[i] / s.rho[i];
  }
  fluid += ru2 * f.grid.cell_volume();

  if (g2 == 0.0) return std::abs(fluid);
  return std::abs(g2 - fluid) / g2;
}

std::vector<double> rescaled_profile_1d(const std::vector<double>& rho,
                                        const Grid& g, double tau,
                                        const std::vector<double>& points) {
  if (g.dim != 1)
    throw InvalidInputError("rescaled_profile_1d: 1D grids only");
  require_positive_tau(tau);
  std::vector<double> reads(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    reads[i] = tau * points[i];
    if (std::abs(reads[i]) > g.half_length * (1.0 + 1e-12))
      throw DomainOverflowError(
          "rescaled_profile_1d: tau*y leaves the domain; shrink the window");
  }
  std::vector<cplx> c(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) c[i] = cplx(rho[i], 0.0);
  const std::vector<cplx> vals = trig_eval_1d(c, g, reads);
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    out[i] = tau * vals[i].real();
  return out;
}

}  // namespace dscale
