// aarch64 only. Two float64x2 accumulators stand in for one 4-lane register
// so the summation order matches the scalar reference.

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "kernel_impls.hpp"

namespace tcbuf::kernels::detail {
namespace {

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double sum_neon(const double* x, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc01 = vaddq_f64(acc01, vld1q_f64(x + i));
        acc23 = vaddq_f64(acc23, vld1q_f64(x + i + 2));
    }
    double total = vaddvq_f64(vaddq_f64(acc01, acc23));
    for (; i < n; ++i) total += x[i];
    return total;
}

double sum_sq_dev_neon(const double* x, std::size_t n, double center) {
    const float64x2_t c = vdupq_n_f64(center);
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d01 = vsubq_f64(vld1q_f64(x + i), c);
        const float64x2_t d23 = vsubq_f64(vld1q_f64(x + i + 2), c);
        acc01 = vfmaq_f64(acc01, d01, d01);
        acc23 = vfmaq_f64(acc23, d23, d23);
    }
    double total = vaddvq_f64(vaddq_f64(acc01, acc23));
    for (; i < n; ++i) {
        const double d = x[i] - center;
        total = std::fma(d, d, total);
    }
    return total;
}

double max_abs_neon(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(x + i)));
    double m = vmaxvq_f64(acc);
    for (; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
    return m;
}

double max_abs_diff_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vmaxq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    double m = vmaxvq_f64(acc);
    for (; i < n; ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
    return m;
}

void pnl_neon(const double* pos, const double* trade, const double* price, double eps,
              double* gross, double* cost, double* net, std::size_t n) {
    const float64x2_t ve = vdupq_n_f64(eps);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t dx = vsubq_f64(vld1q_f64(price + i + 1), vld1q_f64(price + i));
        const float64x2_t g = vmulq_f64(vld1q_f64(pos + i), dx);
        const float64x2_t c = vmulq_f64(ve, vabsq_f64(vld1q_f64(trade + i)));
        vst1q_f64(gross + i, g);
        vst1q_f64(cost + i, c);
        vst1q_f64(net + i, vsubq_f64(g, c));
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

KernelTable make_neon_table() noexcept {
    return KernelTable{Isa::neon,      axpy_neon,         sum_neon, sum_sq_dev_neon,
                       max_abs_neon,   max_abs_diff_neon, pnl_neon};
}

}  // namespace tcbuf::kernels::detail
