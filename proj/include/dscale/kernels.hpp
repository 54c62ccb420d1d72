#pragma once
// Data-parallel inner loops used by the spectral solvers: pointwise complex
// updates, densities, and weighted reductions.  Each kernel has a portable
// scalar reference implementation plus (on x86-64) an AVX2+FMA variant in a
// separately-compiled TU.  Dispatch happens once at startup through function
// pointers, following the usual cpuid-hook pattern; the environment variable
// DSCALE_KERNELS=scalar|avx2|neon forces a specific backend.
//
// Reductions are accumulated in a fixed lane order, so results are
// deterministic for a given backend (a requirement for bit-identical run
// ledgers), and the SIMD variants agree with the scalar reference to
// rounding-level accuracy (covered by equivalence tests).

#include <complex>
#include <cstddef>
#include <string>

namespace dscale::kernels {

using cplx = std::complex<double>;

// ---- scalar reference implementations (always available) ----------------
namespace scalar {
double reduce_abs2(const cplx* z, std::size_t n);
double reduce_abs2_weighted(const cplx* z, const double* w, std::size_t n);
double reduce_prod(const double* a, const double* b, std::size_t n);
double reduce_prod3(const double* a, const double* b, const double* c, std::size_t n);
double reduce_sum(const double* a, std::size_t n);
void abs2(const cplx* z, double* out, std::size_t n);
void cmul(cplx* z, const cplx* w, std::size_t n);           // z[i] *= w[i]
void rotate(cplx* z, const double* theta, std::size_t n);   // z[i] *= exp(i*theta[i])
void scale_real(double* a, double s, std::size_t n);
void scale_cplx(cplx* z, double s, std::size_t n);
void axpby(double* y, double a, const double* x, double b, std::size_t n);  // y = a*x + b*y
}  // namespace scalar

#if defined(DSCALE_HAVE_AVX2_TU)
namespace avx2 {
double reduce_abs2(const cplx* z, std::size_t n);
double reduce_abs2_weighted(const cplx* z, const double* w, std::size_t n);
double reduce_prod(const double* a, const double* b, std::size_t n);
double reduce_prod3(const double* a, const double* b, const double* c, std::size_t n);
double reduce_sum(const double* a, std::size_t n);
void abs2(const cplx* z, double* out, std::size_t n);
void cmul(cplx* z, const cplx* w, std::size_t n);
void rotate(cplx* z, const double* theta, std::size_t n);
void scale_real(double* a, double s, std::size_t n);
void scale_cplx(cplx* z, double s, std::size_t n);
void axpby(double* y, double a, const double* x, double b, std::size_t n);
}  // namespace avx2
#endif

#if defined(DSCALE_HAVE_NEON_TU)
namespace neon {
double reduce_abs2(const cplx* z, std::size_t n);
double reduce_abs2_weighted(const cplx* z, const double* w, std::size_t n);
double reduce_prod(const double* a, const double* b, std::size_t n);
double reduce_prod3(const double* a, const double* b, const double* c, std::size_t n);
double reduce_sum(const double* a, std::size_t n);
void abs2(const cplx* z, double* out, std::size_t n);
void cmul(cplx* z, const cplx* w, std::size_t n);
void rotate(cplx* z, const double* theta, std::size_t n);
void scale_real(double* a, double s, std::size_t n);
void scale_cplx(cplx* z, double s, std::size_t n);
void axpby(double* y, double a, const double* x, double b, std::size_t n);
}  // namespace neon
#endif

// ---- dispatched entry points --------------------------------------------
extern double (*reduce_abs2)(const cplx*, std::size_t);
extern double (*reduce_abs2_weighted)(const cplx*, const double*, std::size_t);
extern double (*reduce_prod)(const double*, const double*, std::size_t);
extern double (*reduce_prod3)(const double*, const double*, const double*, std::size_t);
extern double (*reduce_sum)(const double*, std::size_t);
extern void (*abs2)(const cplx*, double*, std::size_t);
extern void (*cmul)(cplx*, const cplx*, std::size_t);
extern void (*rotate)(cplx*, const double*, std::size_t);
extern void (*scale_real)(double*, double, std::size_t);
extern void (*scale_cplx)(cplx*, double, std::size_t);
extern void (*axpby)(double*, double, const double*, double, std::size_t);

/// Name of the backend currently wired into the function pointers.
std::string active_backend();

/// Re-run detection + env override.  Called automatically before first use;
/// exposed so tests can switch backends.
void select_backend(const std::string& name = "");

}  // namespace dscale::kernels
