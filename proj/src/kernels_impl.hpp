#pragma once

#include "coarse/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define COARSE_HAVE_AVX2 1
#else
#define COARSE_HAVE_AVX2 0
#endif

namespace coarse::kernels::detail {
#if COARSE_HAVE_AVX2
const Table& avx2_table();
#endif
}  // namespace coarse::kernels::detail
