// Portable reference kernels.  These are the semantics the SIMD variants are
// tested against.  Reductions use two alternating partial sums: cheap, and it
// keeps the rounding behaviour close to the vector variants.

#include "dscale/kernels.hpp"

#include <cmath>

namespace dscale::kernels::scalar {

double reduce_abs2(const cplx* z, std::size_t n) {
  double s0 = 0.0, s1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    const double a0 = z[i].real(), b0 = z[i].imag();
    const double a1 = z[i + 1].real(), b1 = z[i + 1].imag();
    s0 += a0 * a0 + b0 * b0;
    s1 += a1 * a1 + b1 * b1;
  }
  if (i < n) s0 += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return s0 + s1;
}

double reduce_abs2_weighted(const cplx* z, const double* w, std::size_t n) {
  double s0 = 0.0, s1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    s0 += w[i] * (z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
    s1 += w[i + 1] * (z[i + 1].real() * z[i + 1].real() + z[i + 1].imag() * z[i + 1].imag());
  }
  if (i < n) s0 += w[i] * (z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
  return s0 + s1;
}

double reduce_prod(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
  }
  if (i < n) s0 += a[i] * b[i];
  return s0 + s1;
}

double reduce_prod3(const double* a, const double* b, const double* c, std::size_t n) {
  double s0 = 0.0, s1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    s0 += a[i] * b[i] * c[i];
    s1 += a[i + 1] * b[i + 1] * c[i + 1];
  }
  if (i < n) s0 += a[i] * b[i] * c[i];
  return s0 + s1;
}

double reduce_sum(const double* a, std::size_t n) {
  double s0 = 0.0, s1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    s0 += a[i];
    s1 += a[i + 1];
  }
  if (i < n) s0 += a[i];
  return s0 + s1;
}

void abs2(const cplx* z, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
}

void cmul(cplx* z, const cplx* w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = z[i].real(), b = z[i].imag();
    const double c = w[i].real(), d = w[i].imag();
    z[i] = cplx(a * c - b * d, a * d + b * c);
  }
}

void rotate(cplx* z, const double* theta, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(theta[i]), s = std::sin(theta[i]);
    const double a = z[i].real(), b = z[i].imag();
    z[i] = cplx(a * c - b * s, a * s + b * c);
  }
}

void scale_real(double* a, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= s;
}

void scale_cplx(cplx* z, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] *= s;
}

void axpby(double* y, double a, const double* x, double b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

}  // namespace dscale::kernels::scalar
