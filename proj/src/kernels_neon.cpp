// NEON kernel variants (aarch64).  The reductions and blas-like updates are
// vectorized with float64x2; the transcendental-heavy loops delegate to the
// scalar reference, which is already the dominant-cost-honest choice there.

#include "dscale/kernels.hpp"

#include <arm_neon.h>

namespace dscale::kernels::neon {

double reduce_abs2(const cplx* z, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 1 <= n; i += 1) {
    float64x2_t v = vld1q_f64(p + 2 * i);
    acc = vfmaq_f64(acc, v, v);
  }
  return vaddvq_f64(acc);
}

double reduce_abs2_weighted(const cplx* z, const double* w, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    float64x2_t v = vld1q_f64(p + 2 * i);
    acc = vfmaq_f64(acc, vmulq_f64(v, v), vdupq_n_f64(w[i]));
  }
  return vaddvq_f64(acc);
}

double reduce_prod(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double reduce_prod3(const double* a, const double* b, const double* c, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)), vld1q_f64(c + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

double reduce_sum(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

void abs2(const cplx* z, double* out, std::size_t n) { scalar::abs2(z, out, n); }
void cmul(cplx* z, const cplx* w, std::size_t n) { scalar::cmul(z, w, n); }
void rotate(cplx* z, const double* theta, std::size_t n) { scalar::rotate(z, theta, n); }

void scale_real(double* a, double s, std::size_t n) {
  float64x2_t sv = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(a + i, vmulq_f64(vld1q_f64(a + i), sv));
  for (; i < n; ++i) a[i] *= s;
}

void scale_cplx(cplx* z, double s, std::size_t n) {
  scale_real(reinterpret_cast<double*>(z), s, 2 * n);
}

void axpby(double* y, double a, const double* x, double b, std::size_t n) {
  float64x2_t av = vdupq_n_f64(a), bv = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t r = vfmaq_f64(vmulq_f64(bv, vld1q_f64(y + i)), av, vld1q_f64(x + i));
    vst1q_f64(y + i, r);
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

}  // namespace dscale::kernels::neon
