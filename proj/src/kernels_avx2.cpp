// AVX2+FMA kernel variants.  This TU is the only one compiled with
// -mavx2 -mfma; it must not be entered unless cpuid reports support.
// Interleaved re/im layout: one __m256d holds two complex numbers.

#include "dscale/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace dscale::kernels::avx2 {

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// z *= w for two packed complex values.
inline __m256d cmul2(__m256d z, __m256d w) {
  __m256d wr = _mm256_movedup_pd(w);            // [c0 c0 c1 c1]
  __m256d wi = _mm256_permute_pd(w, 0b1111);    // [d0 d0 d1 d1]
  __m256d zs = _mm256_permute_pd(z, 0b0101);    // [b0 a0 b1 a1]
  return _mm256_fmaddsub_pd(z, wr, _mm256_mul_pd(zs, wi));
}
}  // namespace

double reduce_abs2(const cplx* z, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v0 = _mm256_loadu_pd(p + 2 * i);
    __m256d v1 = _mm256_loadu_pd(p + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return s;
}

double reduce_abs2_weighted(const cplx* z, const double* w, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(p + 2 * i);
    // duplicate [w0 w1] -> [w0 w0 w1 w1]
    __m128d wlo = _mm_loadu_pd(w + i);
    __m256d wv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(wlo), 0b01010000);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), wv, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * (z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
  return s;
}

double reduce_prod(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double reduce_prod3(const double* a, const double* b, const double* c, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

double reduce_sum(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i];
  return s;
}

void abs2(const cplx* z, double* out, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(p + 2 * i);
    __m256d sq = _mm256_mul_pd(v, v);                       // [a0^2 b0^2 a1^2 b1^2]
    __m256d sw = _mm256_permute_pd(sq, 0b0101);
    __m256d sum = _mm256_add_pd(sq, sw);                    // [r0 r0 r1 r1]
    __m128d res = _mm256_castpd256_pd128(_mm256_permute4x64_pd(sum, 0b1000));
    _mm_storeu_pd(out + i, res);
  }
  for (; i < n; ++i) out[i] = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
}

void cmul(cplx* z, const cplx* w, std::size_t n) {
  double* zp = reinterpret_cast<double*>(z);
  const double* wp = reinterpret_cast<const double*>(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    _mm256_storeu_pd(zp + 2 * i, cmul2(_mm256_loadu_pd(zp + 2 * i), _mm256_loadu_pd(wp + 2 * i)));
  for (; i < n; ++i) z[i] *= w[i];
}

void rotate(cplx* z, const double* theta, std::size_t n) {
  double* zp = reinterpret_cast<double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // sincos stays scalar (libm); the complex multiply is vectorized.
    double c0, s0, c1, s1;
    sincos(theta[i], &s0, &c0);
    sincos(theta[i + 1], &s1, &c1);
    __m256d w = _mm256_set_pd(s1, c1, s0, c0);
    _mm256_storeu_pd(zp + 2 * i, cmul2(_mm256_loadu_pd(zp + 2 * i), w));
  }
  for (; i < n; ++i) {
    double c, s;
    sincos(theta[i], &s, &c);
    const double a = z[i].real(), b = z[i].imag();
    z[i] = cplx(a * c - b * s, a * s + b * c);
  }
}

void scale_real(double* a, double s, std::size_t n) {
  __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), sv));
  for (; i < n; ++i) a[i] *= s;
}

void scale_cplx(cplx* z, double s, std::size_t n) {
  scale_real(reinterpret_cast<double*>(z), s, 2 * n);
}

void axpby(double* y, double a, const double* x, double b, std::size_t n) {
  __m256d av = _mm256_set1_pd(a), bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                _mm256_mul_pd(bv, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

}  // namespace dscale::kernels::avx2
