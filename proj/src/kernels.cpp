#include "navkit/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace navkit::kern {

namespace {

bool avx2_available() {
#if defined(NAVKIT_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool neon_available() {
#if defined(NAVKIT_HAVE_NEON_TU)
  return true;  // baseline on aarch64
#else
  return false;
#endif
}

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &kScalarTable;
    case Backend::Avx2:
#if defined(NAVKIT_HAVE_AVX2_TU)
      if (avx2_available()) return &kAvx2Table;
#endif
      return nullptr;
    case Backend::Neon:
#if defined(NAVKIT_HAVE_NEON_TU)
      if (neon_available()) return &kNeonTable;
#endif
      return nullptr;
  }
  return nullptr;
}

Backend best_backend() {
  if (avx2_available()) return Backend::Avx2;
  if (neon_available()) return Backend::Neon;
  return Backend::Scalar;
}

struct Active {
  Backend backend;
  const KernelTable* table;
  Active() : backend(best_backend()), table(table_for(backend)) {}
};

Active& active() {
  static Active a;
  return a;
}

}  // namespace

Backend active_backend() { return active().backend; }

void set_backend(Backend b) {
  const KernelTable* t = table_for(b);
  if (t == nullptr) {
    throw std::invalid_argument("kernel backend " + backend_name(b) +
                                " is not available on this CPU/build");
  }
  active().backend = b;
  active().table = t;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  if (avx2_available()) out.push_back(Backend::Avx2);
  if (neon_available()) out.push_back(Backend::Neon);
  return out;
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "?";
}

Backend backend_from_name(const std::string& name) {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  if (name == "neon") return Backend::Neon;
  if (name == "auto") return best_backend();
  throw std::invalid_argument("unknown kernel backend '" + name + "'");
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().table->dot(a.data(), b.data(), a.size());
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void scale(std::span<double> x, double a) { active().table->scale(x.data(), a, x.size()); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().table->axpy(a, x.data(), y.data(), x.size());
}

void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> out) {
  const KernelTable* t = active().table;
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = t->dot(w.data() + r * cols, x.data(), cols);
  }
}

void matvec_t(std::span<const double> w, std::size_t rows, std::size_t cols,
              std::span<const double> g, std::span<double> out) {
  const KernelTable* t = active().table;
  for (std::size_t i = 0; i < cols; ++i) out[i] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    t->axpy(g[r], w.data() + r * cols, out.data(), cols);
  }
}

void ger(std::span<double> w, std::size_t rows, std::size_t cols, double alpha,
         std::span<const double> g, std::span<const double> x) {
  const KernelTable* t = active().table;
  for (std::size_t r = 0; r < rows; ++r) {
    t->axpy(alpha * g[r], x.data(), w.data() + r * cols, cols);
  }
}

}  // namespace navkit::kern
