#pragma once
// Periodic uniform grids on [-L, L)^dim (dim = 1 or 2) and the FFT machinery
// shared by all pseudo-spectral solvers.  Conventions:
//   * points     x_i = -L + i h,  h = 2L/n,  i = 0..n-1 (row-major for dim 2)
//   * wavenumbers k_j = (pi/L) j,  j = -n/2 .. n/2-1 in FFT storage order
//   * forward transform is the unnormalized DFT, inverse carries the 1/n^d
// First-derivative multipliers zero the Nyquist mode so the operator stays
// skew-symmetric on real data (exact summation by parts); even-order
// multipliers keep it.
//
// Each workspace owns its FFTW plans and scratch buffers, so concurrent
// simulations need one workspace each (plan creation is mutex-guarded; FFTW
// execution on distinct plans is thread-safe).

#include <complex>
#include <cstddef>
#include <vector>

#include "dscale/errors.hpp"
#include "dscale/kernels.hpp"

namespace dscale {

using cplx = std::complex<double>;

struct Grid {
  int dim = 1;
  int n = 0;               // points per axis, power of two, >= 8
  double half_length = 0;  // L

  Grid() = default;
  Grid(int dim_, int n_, double L);

  std::size_t size() const { return dim == 1 ? std::size_t(n) : std::size_t(n) * n; }
  double spacing() const { return 2.0 * half_length / n; }
  double cell_volume() const;
  double coord1d(int i) const { return -half_length + i * spacing(); }
  /// Wavenumber for FFT storage index j on one axis (Nyquist mapped to -n/2).
  double wavenumber(int j) const;
  bool operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && half_length == o.half_length;
  }
};

class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid& g);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const Grid& grid() const { return g_; }

  // In-place unnormalized forward DFT / normalized inverse.
  void forward(std::vector<cplx>& v);
  void inverse(std::vector<cplx>& v);

  // Flattened tables over the full grid.
  const std::vector<double>& ksq() const { return ksq_; }      // |k|^2
  const std::vector<double>& ysq() const { return ysq_; }      // |y|^2 (sawtooth)
  const std::vector<double>& coord(int axis) const;            // y_axis (odd; 0 at seam)
  const std::vector<double>& kd(int axis) const;               // k_axis, Nyquist zeroed
  const std::vector<double>& dealias_mask() const { return mask23_; }

  // ---- real-field spectral calculus ----
  void spectrum(const std::vector<double>& f, std::vector<cplx>& hat);
  /// out = Re IFFT[ (i k_axis)^order * hat ]; odd orders use the zeroed-Nyquist k.
  void deriv_from_spectrum(const std::vector<cplx>& hat, int axis, int order,
                           std::vector<double>& out);
  void deriv(const std::vector<double>& f, int axis, int order, std::vector<double>& out);
  /// out = Re IFFT[ -|k|^2 hat ]
  void laplacian(const std::vector<double>& f, std::vector<double>& out);
  /// Zero all modes with |k_axis| > (2/3) k_max on any axis.
  void filter23_real(std::vector<double>& f);
  void filter23(std::vector<cplx>& v);

  // ---- complex-field helpers ----
  /// out = d f / d y_axis for a complex field (skew-symmetric operator).
  void deriv_cplx(const std::vector<cplx>& f, int axis, std::vector<cplx>& out);
  /// psi_hat *= exp(-i c |k|^2) (exact free/kinetic propagator step).
  void kinetic_phase(std::vector<cplx>& psi, double c);
  /// Fraction of spectral mass outside the 2/3 ball.
  double spectral_tail_fraction(const std::vector<cplx>& psi);

  /// L2 norm-squared of the spectral gradient: sum |k|^2 |f_hat|^2 scaled to
  /// the discrete integral  ∫|∇f|^2.
  double grad_norm_sq(const std::vector<cplx>& f);
  double grad_norm_sq_real(const std::vector<double>& f);

 private:
  Grid g_;
  void* plan_fwd_ = nullptr;  // fftw_plan, kept opaque here
  void* plan_bwd_ = nullptr;
  cplx* buf_ = nullptr;       // fftw-allocated aligned buffer
  std::vector<double> ksq_, ysq_, mask23_;
  std::vector<double> y_[2], kd_[2], kfull_[2];
  std::vector<double> theta_;           // phase scratch
  std::vector<cplx> scratch_, scratch2_;
  // single-entry cache for the fixed-step kinetic phase
  double cached_c_ = 0;
  bool cache_valid_ = false;
  std::vector<cplx> cached_phase_;
  void execute(void* plan);
};

// ---- off-grid spectral evaluation ---------------------------------------

/// Evaluate the trigonometric interpolant of grid values `f` at arbitrary
/// points (1D).  Exact for band-limited data; O(n) per point.
std::vector<cplx> trig_eval_1d(const std::vector<cplx>& f, const Grid& g,
                               const std::vector<double>& points);

/// out(y) = f(s*y) on the same grid via trig interpolation (dim 1 or 2).
/// For s > 1 sample points wrap periodically; callers must ensure the field
/// carries no significant mass near the seam (see DomainOverflowError checks
/// at the call sites).
std::vector<cplx> dilate(SpectralWorkspace& W, const std::vector<cplx>& f, double s);
std::vector<double> dilate_real(SpectralWorkspace& W, const std::vector<double>& f, double s);

/// Continuum Fourier transform approximation (2pi)^{-d/2} ∫ e^{-i x xi} f dx
/// evaluated at arbitrary xi (tensor targets for dim 2, xis per axis).
std::vector<cplx> ft_eval(const std::vector<cplx>& f, const Grid& g,
                          const std::vector<double>& xis);

// ---- quadrature shorthands ----------------------------------------------

inline double integrate(const std::vector<double>& f, const Grid& g) {
  return kernels::reduce_sum(f.data(), f.size()) * g.cell_volume();
}
inline double integrate_prod(const std::vector<double>& a, const std::vector<double>& b,
                             const Grid& g) {
  return kernels::reduce_prod(a.data(), b.data(), a.size()) * g.cell_volume();
}
inline double integrate_abs2(const std::vector<cplx>& f, const Grid& g) {
  return kernels::reduce_abs2(f.data(), f.size()) * g.cell_volume();
}
inline double integrate_abs2_weighted(const std::vector<cplx>& f, const std::vector<double>& w,
                                      const Grid& g) {
  return kernels::reduce_abs2_weighted(f.data(), w.data(), f.size()) * g.cell_volume();
}

/// x^p for arrays with fast paths for the exponents the lab actually uses.
void pow_array(const std::vector<double>& x, double p, std::vector<double>& out);

}  // namespace dscale
