// Runtime backend selection.  Pointers start on the scalar reference and are
// swapped to a SIMD variant when the CPU supports it (or when forced through
// DSCALE_KERNELS).  Selection runs once, before main, so all call sites see a
// consistent backend.

#include "dscale/kernels.hpp"

#include <cstdlib>

namespace dscale::kernels {

double (*reduce_abs2)(const cplx*, std::size_t) = scalar::reduce_abs2;
double (*reduce_abs2_weighted)(const cplx*, const double*, std::size_t) =
    scalar::reduce_abs2_weighted;
double (*reduce_prod)(const double*, const double*, std::size_t) = scalar::reduce_prod;
double (*reduce_prod3)(const double*, const double*, const double*, std::size_t) =
    scalar::reduce_prod3;
double (*reduce_sum)(const double*, std::size_t) = scalar::reduce_sum;
void (*abs2)(const cplx*, double*, std::size_t) = scalar::abs2;
void (*cmul)(cplx*, const cplx*, std::size_t) = scalar::cmul;
void (*rotate)(cplx*, const double*, std::size_t) = scalar::rotate;
void (*scale_real)(double*, double, std::size_t) = scalar::scale_real;
void (*scale_cplx)(cplx*, double, std::size_t) = scalar::scale_cplx;
void (*axpby)(double*, double, const double*, double, std::size_t) = scalar::axpby;

namespace {
std::string g_backend = "scalar";

void use_scalar() {
  reduce_abs2 = scalar::reduce_abs2;
  reduce_abs2_weighted = scalar::reduce_abs2_weighted;
  reduce_prod = scalar::reduce_prod;
  reduce_prod3 = scalar::reduce_prod3;
  reduce_sum = scalar::reduce_sum;
  abs2 = scalar::abs2;
  cmul = scalar::cmul;
  rotate = scalar::rotate;
  scale_real = scalar::scale_real;
  scale_cplx = scalar::scale_cplx;
  axpby = scalar::axpby;
  g_backend = "scalar";
}

#if defined(DSCALE_HAVE_AVX2_TU)
bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

void use_avx2() {
  reduce_abs2 = avx2::reduce_abs2;
  reduce_abs2_weighted = avx2::reduce_abs2_weighted;
  reduce_prod = avx2::reduce_prod;
  reduce_prod3 = avx2::reduce_prod3;
  reduce_sum = avx2::reduce_sum;
  abs2 = avx2::abs2;
  cmul = avx2::cmul;
  rotate = avx2::rotate;
  scale_real = avx2::scale_real;
  scale_cplx = avx2::scale_cplx;
  axpby = avx2::axpby;
  g_backend = "avx2";
}
#endif

#if defined(DSCALE_HAVE_NEON_TU)
void use_neon() {
  reduce_abs2 = neon::reduce_abs2;
  reduce_abs2_weighted = neon::reduce_abs2_weighted;
  reduce_prod = neon::reduce_prod;
  reduce_prod3 = neon::reduce_prod3;
  reduce_sum = neon::reduce_sum;
  abs2 = neon::abs2;
  cmul = neon::cmul;
  rotate = neon::rotate;
  scale_real = neon::scale_real;
  scale_cplx = neon::scale_cplx;
  axpby = neon::axpby;
  g_backend = "neon";
}
#endif

struct AutoSelect {
  AutoSelect() { select_backend(); }
} auto_select;
}  // namespace

void select_backend(const std::string& name) {
  std::string want = name;
  if (want.empty()) {
    if (const char* env = std::getenv("DSCALE_KERNELS")) want = env;
  }
  if (want == "scalar") {
    use_scalar();
    return;
  }
#if defined(DSCALE_HAVE_AVX2_TU)
  if ((want.empty() || want == "avx2") && avx2_supported()) {
    use_avx2();
    return;
  }
#endif
#if defined(DSCALE_HAVE_NEON_TU)
  if (want.empty() || want == "neon") {
    use_neon();
    return;
  }
#endif
  use_scalar();
}

std::string active_backend() { return g_backend; }

}  // namespace dscale::kernels
