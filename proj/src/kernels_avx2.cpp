// AVX2+FMA kernels, 4-wide double lanes. This TU is compiled with
// -mavx2 -mfma; it is only entered after a runtime cpuid check.

#include "kernels_impl.hpp"

#if defined(NAVKIT_HAVE_AVX2_TU)

#include <immintrin.h>

namespace navkit::kern {

namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  __m256d acc = _mm256_add_pd(acc0, acc1);
  double buf[4];
  _mm256_storeu_pd(buf, acc);
  double s = (buf[0] + buf[1]) + (buf[2] + buf[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void scale_avx2(double* x, double a, std::size_t n) {
  __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), av));
  }
  for (; i < n; ++i) x[i] *= a;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable kAvx2Table = {dot_avx2, scale_avx2, axpy_avx2};

}  // namespace navkit::kern

#endif  // NAVKIT_HAVE_AVX2_TU
