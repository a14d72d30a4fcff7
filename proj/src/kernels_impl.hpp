#pragma once
// Internal kernel table shared by the dispatch layer and the per-ISA
// translation units.

#include <cstddef>

namespace navkit::kern {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
};

extern const KernelTable kScalarTable;

#if defined(NAVKIT_HAVE_AVX2_TU)
extern const KernelTable kAvx2Table;
#endif
#if defined(NAVKIT_HAVE_NEON_TU)
extern const KernelTable kNeonTable;
#endif

}  // namespace navkit::kern
