// NEON kernels, 2-wide double lanes. NEON is baseline on aarch64 so there is
// no runtime feature probe; the table is simply preferred when this TU is in
// the build.

#include "kernels_impl.hpp"

#if defined(NAVKIT_HAVE_NEON_TU)

#include <arm_neon.h>

namespace navkit::kern {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  float64x2_t acc = vaddq_f64(acc0, acc1);
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void scale_neon(double* x, double a, std::size_t n) {
  float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), av));
  }
  for (; i < n; ++i) x[i] *= a;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t yv = vld1q_f64(y + i);
    vst1q_f64(y + i, vfmaq_f64(yv, av, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable kNeonTable = {dot_neon, scale_neon, axpy_neon};

}  // namespace navkit::kern

#endif  // NAVKIT_HAVE_NEON_TU
