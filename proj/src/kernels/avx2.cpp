// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "kernel_impls.hpp"

namespace tcbuf::kernels::detail {
namespace {

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// (a0 + a2) + (a1 + a3), matching the scalar reference.
inline double combine(__m256d acc) {
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline double hmax(__m256d acc) {
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double total = combine(acc);
    for (; i < n; ++i) total += x[i];
    return total;
}

double sum_sq_dev_avx2(const double* x, std::size_t n, double center) {
    const __m256d c = _mm256_set1_pd(center);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), c);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double total = combine(acc);
    for (; i < n; ++i) {
        const double d = x[i] - center;
        total = std::fma(d, d, total);
    }
    return total;
}

double max_abs_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(x + i)));
    double m = hmax(acc);
    for (; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
    return m;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_max_pd(acc, abs_pd(d));
    }
    double m = hmax(acc);
    for (; i < n; ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
    return m;
}

void pnl_avx2(const double* pos, const double* trade, const double* price, double eps,
              double* gross, double* cost, double* net, std::size_t n) {
    const __m256d ve = _mm256_set1_pd(eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(price + i + 1), _mm256_loadu_pd(price + i));
        const __m256d g = _mm256_mul_pd(_mm256_loadu_pd(pos + i), dx);
        const __m256d c = _mm256_mul_pd(ve, abs_pd(_mm256_loadu_pd(trade + i)));
        _mm256_storeu_pd(gross + i, g);
        _mm256_storeu_pd(cost + i, c);
        _mm256_storeu_pd(net + i, _mm256_sub_pd(g, c));
    }
    for (; i < n; ++i) {
        const double g = pos[i] * (price[i + 1] - price[i]);
        const double c = eps * std::fabs(trade[i]);
        gross[i] = g;
        cost[i] = c;
        net[i] = g - c;
    }
}

}  // namespace

KernelTable make_avx2_table() noexcept {
    return KernelTable{Isa::avx2,      axpy_avx2,         sum_avx2, sum_sq_dev_avx2,
                       max_abs_avx2,   max_abs_diff_avx2, pnl_avx2};
}

}  // namespace tcbuf::kernels::detail
