#pragma once

#include "tcbuf/kernels.hpp"

namespace tcbuf::kernels::detail {

KernelTable make_scalar_table() noexcept;
#if defined(TCBUF_BUILD_AVX2)
KernelTable make_avx2_table() noexcept;
#endif
#if defined(TCBUF_BUILD_NEON)
KernelTable make_neon_table() noexcept;
#endif

}  // namespace tcbuf::kernels::detail
