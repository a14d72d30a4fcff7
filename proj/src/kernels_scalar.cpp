// Scalar reference kernels. These define the semantics the SIMD variants
// must reproduce (up to floating-point reassociation).

#include "kernels_impl.hpp"

namespace navkit::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void scale_scalar(double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable kScalarTable = {dot_scalar, scale_scalar, axpy_scalar};

}  // namespace navkit::kern
