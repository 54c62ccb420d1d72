#include "dscale/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

namespace dscale {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid::Grid(int dim_, int n_, double L) : dim(dim_), n(n_), half_length(L) {
  if (dim != 1 && dim != 2) throw InvalidInputError("grid dim must be 1 or 2");
  if (!power_of_two(n) || n < 8) throw InvalidInputError("grid n must be a power of two >= 8");
  if (!(L > 0) || !std::isfinite(L)) throw InvalidInputError("grid half_length must be positive");
}

double Grid::cell_volume() const {
  const double h = spacing();
  return dim == 1 ? h : h * h;
}

double Grid::wavenumber(int j) const {
  const int f = (j <= n / 2 - 1) ? j : j - n;
  return std::numbers::pi * f / half_length;
}

SpectralWorkspace::SpectralWorkspace(const Grid& g) : g_(g) {
  const std::size_t N = g_.size();
  buf_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * N));
  if (!buf_) throw Error("fftw_malloc failed");
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* b = reinterpret_cast<fftw_complex*>(buf_);
    if (g_.dim == 1) {
      plan_fwd_ = fftw_plan_dft_1d(g_.n, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
      plan_bwd_ = fftw_plan_dft_1d(g_.n, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      plan_fwd_ = fftw_plan_dft_2d(g_.n, g_.n, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
      plan_bwd_ = fftw_plan_dft_2d(g_.n, g_.n, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }

  // coordinate/wavenumber tables, flattened row-major
  const int n = g_.n;
  ksq_.assign(N, 0.0);
  ysq_.assign(N, 0.0);
  mask23_.assign(N, 1.0);
  const int keep = n / 3;  // 2/3 rule: keep |freq index| <= n/3
  for (int axis = 0; axis < g_.dim; ++axis) {
    y_[axis].assign(N, 0.0);
    kd_[axis].assign(N, 0.0);
    kfull_[axis].assign(N, 0.0);
  }
  auto fill = [&](std::size_t idx, int j0, int j1) {
    const int f0 = (j0 <= n / 2 - 1) ? j0 : j0 - n;
    const double k0 = g_.wavenumber(j0);
    const double x0 = g_.coord1d(j0);
    // The odd sawtooth coordinate takes its Fourier midpoint value 0 at the
    // seam x = -L, so the table is exactly odd under the grid reflection
    // i -> (n - i) mod n and y-linear forcings preserve parity.  The even
    // table |y|^2 keeps the continuous seam value L^2.
    const double s0 = (j0 == 0) ? 0.0 : x0;
    if (g_.dim == 1) {
      ksq_[idx] = k0 * k0;
      ysq_[idx] = x0 * x0;
      y_[0][idx] = s0;
      kd_[0][idx] = (j0 == n / 2) ? 0.0 : k0;
      kfull_[0][idx] = k0;
      if (std::abs(f0) > keep) mask23_[idx] = 0.0;
    } else {
      const int f1 = (j1 <= n / 2 - 1) ? j1 : j1 - n;
      const double k1 = g_.wavenumber(j1);
      const double x1 = g_.coord1d(j1);
      const double s1 = (j1 == 0) ? 0.0 : x1;
      ksq_[idx] = k0 * k0 + k1 * k1;
      ysq_[idx] = x0 * x0 + x1 * x1;
      y_[0][idx] = s0;
      y_[1][idx] = s1;
      kd_[0][idx] = (j0 == n / 2) ? 0.0 : k0;
      kd_[1][idx] = (j1 == n / 2) ? 0.0 : k1;
      kfull_[0][idx] = k0;
      kfull_[1][idx] = k1;
      if (std::abs(f0) > keep || std::abs(f1) > keep) mask23_[idx] = 0.0;
    }
  };
  if (g_.dim == 1) {
    for (int j = 0; j < n; ++j) fill(j, j, 0);
  } else {
    for (int j0 = 0; j0 < n; ++j0)
      for (int j1 = 0; j1 < n; ++j1) fill(std::size_t(j0) * n + j1, j0, j1);
  }
  theta_.assign(N, 0.0);
  scratch_.assign(N, cplx(0));
  scratch2_.assign(N, cplx(0));
  cached_phase_.assign(N, cplx(0));
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  if (buf_) fftw_free(buf_);
}

void SpectralWorkspace::execute(void* plan) {
  fftw_execute(static_cast<fftw_plan>(plan));
}

void SpectralWorkspace::forward(std::vector<cplx>& v) {
  if (v.size() != g_.size()) throw InvalidInputError("field size does not match grid");
  std::memcpy(buf_, v.data(), v.size() * sizeof(cplx));
  execute(plan_fwd_);
  std::memcpy(v.data(), buf_, v.size() * sizeof(cplx));
}

void SpectralWorkspace::inverse(std::vector<cplx>& v) {
  if (v.size() != g_.size()) throw InvalidInputError("field size does not match grid");
  std::memcpy(buf_, v.data(), v.size() * sizeof(cplx));
  execute(plan_bwd_);
  std::memcpy(v.data(), buf_, v.size() * sizeof(cplx));
  kernels::scale_cplx(v.data(), 1.0 / double(g_.size()), v.size());
}

const std::vector<double>& SpectralWorkspace::coord(int axis) const {
  if (axis < 0 || axis >= g_.dim) throw InvalidInputError("axis out of range");
  return y_[axis];
}

const std::vector<double>& SpectralWorkspace::kd(int axis) const {
  if (axis < 0 || axis >= g_.dim) throw InvalidInputError("axis out of range");
  return kd_[axis];
}

void SpectralWorkspace::spectrum(const std::vector<double>& f, std::vector<cplx>& hat) {
  hat.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) hat[i] = cplx(f[i], 0.0);
  forward(hat);
}

void SpectralWorkspace::deriv_from_spectrum(const std::vector<cplx>& hat, int axis, int order,
                                            std::vector<double>& out) {
  const std::size_t N = g_.size();
  if (axis < 0 || axis >= g_.dim) throw InvalidInputError("axis out of range");
  const bool odd = order % 2;
  // odd orders need the skew-symmetric operator (Nyquist zeroed); even orders
  // keep the full wavenumber so e.g. the Laplacian matches the |k|^2 weight
  const std::vector<double>& k = odd ? kd_[axis] : kfull_[axis];
  // (ik)^order = i^order k^order; i^order cycles 1, i, -1, -i
  const int ph = order % 4;
  for (std::size_t i = 0; i < N; ++i) {
    const double kax = k[i];
    double m = 1.0;
    for (int o = 0; o < order; ++o) m *= kax;
    switch (ph) {
      case 0: scratch2_[i] = hat[i] * m; break;
      case 1: scratch2_[i] = cplx(0, 1) * hat[i] * m; break;
      case 2: scratch2_[i] = -hat[i] * m; break;
      default: scratch2_[i] = cplx(0, -1) * hat[i] * m; break;
    }
  }
  inverse(scratch2_);
  out.resize(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = scratch2_[i].real();
}

void SpectralWorkspace::deriv(const std::vector<double>& f, int axis, int order,
                              std::vector<double>& out) {
  spectrum(f, scratch_);
  deriv_from_spectrum(scratch_, axis, order, out);
}

void SpectralWorkspace::laplacian(const std::vector<double>& f, std::vector<double>& out) {
  spectrum(f, scratch_);
  const std::size_t N = g_.size();
  for (std::size_t i = 0; i < N; ++i) scratch_[i] *= -ksq_[i];
  inverse(scratch_);
  out.resize(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = scratch_[i].real();
}

void SpectralWorkspace::filter23_real(std::vector<double>& f) {
  spectrum(f, scratch_);
  for (std::size_t i = 0; i < f.size(); ++i) scratch_[i] *= mask23_[i];
  inverse(scratch_);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = scratch_[i].real();
}

void SpectralWorkspace::filter23(std::vector<cplx>& v) {
  forward(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mask23_[i];
  inverse(v);
}

void SpectralWorkspace::deriv_cplx(const std::vector<cplx>& f, int axis, std::vector<cplx>& out) {
  if (axis < 0 || axis >= g_.dim) throw InvalidInputError("axis out of range");
  scratch_ = f;
  forward(scratch_);
  const std::vector<double>& k = kd_[axis];
  const std::size_t N = g_.size();
  out.resize(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = cplx(0, 1) * scratch_[i] * k[i];
  inverse(out);
}

void SpectralWorkspace::kinetic_phase(std::vector<cplx>& psi, double c) {
  forward(psi);
  if (!cache_valid_ || c != cached_c_) {
    const std::size_t N = g_.size();
    for (std::size_t i = 0; i < N; ++i) {
      double s, co;
      sincos(-c * ksq_[i], &s, &co);
      cached_phase_[i] = cplx(co, s);
    }
    cached_c_ = c;
    cache_valid_ = true;
  }
  kernels::cmul(psi.data(), cached_phase_.data(), psi.size());
  inverse(psi);
}

double SpectralWorkspace::spectral_tail_fraction(const std::vector<cplx>& psi) {
  scratch_ = psi;
  forward(scratch_);
  const double total = kernels::reduce_abs2(scratch_.data(), scratch_.size());
  if (total == 0.0) return 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < scratch_.size(); ++i)
    if (mask23_[i] == 0.0) tail += std::norm(scratch_[i]);
  return tail / total;
}

double SpectralWorkspace::grad_norm_sq(const std::vector<cplx>& f) {
  scratch_ = f;
  forward(scratch_);
  const double s = kernels::reduce_abs2_weighted(scratch_.data(), ksq_.data(), scratch_.size());
  return s * g_.cell_volume() / double(g_.size());
}

double SpectralWorkspace::grad_norm_sq_real(const std::vector<double>& f) {
  spectrum(f, scratch_);
  const double s = kernels::reduce_abs2_weighted(scratch_.data(), ksq_.data(), scratch_.size());
  return s * g_.cell_volume() / double(g_.size());
}

// ---- off-grid evaluation -------------------------------------------------

namespace {
/// val(x) = (1/n) sum_j F_j (-1)^j w^j [w^{-n} for the negative-frequency
/// half], w = e^{i pi x / L}: the trig interpolant through the grid values.
cplx trig_point(const std::vector<cplx>& F, const Grid& g, double x) {
  const int n = g.n;
  const double a = std::numbers::pi * x / g.half_length;
  const cplx w = std::polar(1.0, a);
  const cplx wn = std::polar(1.0, -double(n) * a);
  const cplx step = -w;
  cplx q(1.0, 0.0);
  cplx pos(0.0, 0.0), neg(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    if (j < n / 2)
      pos += F[j] * q;
    else
      neg += F[j] * q;
    q *= step;
  }
  return (pos + wn * neg) / double(n);
}
}  // namespace

std::vector<cplx> trig_eval_1d(const std::vector<cplx>& f, const Grid& g,
                               const std::vector<double>& points) {
  if (g.dim != 1) throw InvalidInputError("trig_eval_1d needs a 1-d grid");
  SpectralWorkspace W(g);
  std::vector<cplx> F = f;
  W.forward(F);
  std::vector<cplx> out(points.size());
  for (std::size_t t = 0; t < points.size(); ++t) out[t] = trig_point(F, g, points[t]);
  return out;
}

std::vector<cplx> dilate(SpectralWorkspace& W, const std::vector<cplx>& f, double s) {
  const Grid& g = W.grid();
  if (!std::isfinite(s) || s == 0.0) throw InvalidInputError("dilation factor must be finite nonzero");
  std::vector<cplx> F = f;
  W.forward(F);
  const int n = g.n;
  if (g.dim == 1) {
    std::vector<cplx> out(static_cast<std::size_t>(n), cplx(0));
    for (int m = 0; m < n; ++m) out[m] = trig_point(F, g, s * g.coord1d(m));
    return out;
  }
  // dim 2: contract one axis at a time with the phase matrix
  // P[j][m] = (-1)^j e^{i k_j s x_m}
  std::vector<cplx> P(std::size_t(n) * n);
  for (int j = 0; j < n; ++j) {
    const double kj = g.wavenumber(j);
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    for (int m = 0; m < n; ++m)
      P[std::size_t(j) * n + m] = sign * std::polar(1.0, kj * s * g.coord1d(m));
  }
  std::vector<cplx> G(std::size_t(n) * n, cplx(0));
  for (int j0 = 0; j0 < n; ++j0)
    for (int j1 = 0; j1 < n; ++j1) {
      const cplx Fj = F[std::size_t(j0) * n + j1];
      if (Fj == cplx(0)) continue;
      const cplx* Pr = &P[std::size_t(j1) * n];
      cplx* Gr = &G[std::size_t(j0) * n];
      for (int m1 = 0; m1 < n; ++m1) Gr[m1] += Fj * Pr[m1];
    }
  std::vector<cplx> out(std::size_t(n) * n, cplx(0));
  for (int j0 = 0; j0 < n; ++j0) {
    const cplx* Pr = &P[std::size_t(j0) * n];
    const cplx* Gr = &G[std::size_t(j0) * n];
    for (int m0 = 0; m0 < n; ++m0) {
      cplx* Or = &out[std::size_t(m0) * n];
      const cplx c = Pr[m0];
      for (int m1 = 0; m1 < n; ++m1) Or[m1] += c * Gr[m1];
    }
  }
  kernels::scale_cplx(out.data(), 1.0 / double(g.size()), out.size());
  return out;
}

std::vector<double> dilate_real(SpectralWorkspace& W, const std::vector<double>& f, double s) {
  std::vector<cplx> fc(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fc[i] = cplx(f[i], 0.0);
  std::vector<cplx> oc = dilate(W, fc, s);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = oc[i].real();
  return out;
}

std::vector<cplx> ft_eval(const std::vector<cplx>& f, const Grid& g,
                          const std::vector<double>& xis) {
  const double h = g.spacing();
  const double L = g.half_length;
  const int n = g.n;
  const std::size_t T = xis.size();
  const double norm1 = h / std::sqrt(2.0 * std::numbers::pi);
  if (g.dim == 1) {
    std::vector<cplx> out(T);
    for (std::size_t t = 0; t < T; ++t) {
      const double xi = xis[t];
      const cplx v = std::polar(1.0, -h * xi);
      cplx q(1.0, 0.0), acc(0.0, 0.0);
      for (int m = 0; m < n; ++m) {
        acc += f[m] * q;
        q *= v;
      }
      out[t] = norm1 * std::polar(1.0, L * xi) * acc;
    }
    return out;
  }
  // dim 2, tensor targets xis x xis
  std::vector<cplx> P(std::size_t(T) * n);
  for (std::size_t t = 0; t < T; ++t) {
    const double xi = xis[t];
    const cplx v = std::polar(1.0, -h * xi);
    cplx q = std::polar(1.0, L * xi);  // phase e^{i L xi} folded into the row
    for (int m = 0; m < n; ++m) {
      P[t * n + m] = q;
      q *= v;
    }
  }
  // G[m0][t1] = sum_m1 f[m0][m1] P[t1][m1]
  std::vector<cplx> G(std::size_t(n) * T, cplx(0));
  for (int m0 = 0; m0 < n; ++m0) {
    const cplx* fr = &f[std::size_t(m0) * n];
    for (std::size_t t1 = 0; t1 < T; ++t1) {
      const cplx* Pr = &P[t1 * n];
      cplx acc(0.0, 0.0);
      for (int m1 = 0; m1 < n; ++m1) acc += fr[m1] * Pr[m1];
      G[std::size_t(m0) * T + t1] = acc;
    }
  }
  std::vector<cplx> out(T * T);
  for (std::size_t t0 = 0; t0 < T; ++t0) {
    const cplx* Pr = &P[t0 * n];
    for (std::size_t t1 = 0; t1 < T; ++t1) {
      cplx acc(0.0, 0.0);
      for (int m0 = 0; m0 < n; ++m0) acc += G[std::size_t(m0) * T + t1] * Pr[m0];
      out[t0 * T + t1] = norm1 * norm1 * acc;
    }
  }
  return out;
}

void pow_array(const std::vector<double>& x, double p, std::vector<double>& out) {
  out.resize(x.size());
  const std::size_t N = x.size();
  if (p == 1.0) {
    out = x;
  } else if (p == 2.0) {
    for (std::size_t i = 0; i < N; ++i) out[i] = x[i] * x[i];
  } else if (p == 3.0) {
    for (std::size_t i = 0; i < N; ++i) out[i] = x[i] * x[i] * x[i];
  } else if (p == 4.0) {
    for (std::size_t i = 0; i < N; ++i) {
      const double s = x[i] * x[i];
      out[i] = s * s;
    }
  } else if (p == 0.5) {
    for (std::size_t i = 0; i < N; ++i) out[i] = std::sqrt(x[i]);
  } else if (p == 1.5) {
    for (std::size_t i = 0; i < N; ++i) out[i] = x[i] * std::sqrt(x[i]);
  } else if (p == -4.0) {
    for (std::size_t i = 0; i < N; ++i) {
      const double s = x[i] * x[i];
      out[i] = 1.0 / (s * s);
    }
  } else {
    for (std::size_t i = 0; i < N; ++i) out[i] = std::pow(x[i], p);
  }
}

}  // namespace dscale
