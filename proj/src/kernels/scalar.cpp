#include <cmath>
#include <cstddef>

#include "kernel_impls.hpp"

namespace tcbuf::kernels::detail {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double sum_scalar(const double* x, std::size_t n) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s[0] += x[i];
        s[1] += x[i + 1];
        s[2] += x[i + 2];
        s[3] += x[i + 3];
    }
    double total = (s[0] + s[2]) + (s[1] + s[3]);
    for (; i < n; ++i) total += x[i];
    return total;
}

double sum_sq_dev_scalar(const double* x, std::size_t n, double center) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (std::size_t k = 0; k < 4; ++k) {
            const double d = x[i + k] - center;
            s[k] = std::fma(d, d, s[k]);
        }
    }
    double total = (s[0] + s[2]) + (s[1] + s[3]);
    for (; i < n; ++i) {
        const double d = x[i] - center;
        total = std::fma(d, d, total);
    }
    return total;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
    return m;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
    return m;
}

void pnl_scalar(const double* pos, const double* trade, const double* price, double eps,
                double* gross, double* cost, double* net, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double g = pos[i] * (price[i + 1] - price[i]);
        const double c = eps * std::fabs(trade[i]);
        gross[i] = g;
        cost[i] = c;
        net[i] = g - c;
    }
}

}  // namespace

KernelTable make_scalar_table() noexcept {
    return KernelTable{Isa::scalar,       axpy_scalar,         sum_scalar, sum_sq_dev_scalar,
                       max_abs_scalar,    max_abs_diff_scalar, pnl_scalar};
}

}  // namespace tcbuf::kernels::detail
