#pragma once

// Data-parallel inner loops shared by the backtest and the DP oracle.
//
// Every kernel has a scalar reference implementation and, where the build
// and the CPU allow it, an AVX2 (x86-64) or NEON (aarch64) variant. The
// variant is picked once at startup; TCBUF_ISA=scalar|avx2|neon in the
// environment overrides the choice.
//
// All variants accumulate in the same order: four interleaved partial sums
// over i % 4, combined as (s0 + s2) + (s1 + s3), then the tail added
// sequentially. Multiply-adds are fused everywhere. Results are therefore
// bit-identical across variants, which the equivalence tests check.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace tcbuf::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view name) noexcept;

struct KernelTable {
    Isa isa;
    /// y[i] = fma(a, x[i], y[i])
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    /// sum of (x[i] - center)^2
    double (*sum_sq_dev)(const double* x, std::size_t n, double center);
    double (*max_abs)(const double* x, std::size_t n);
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
    /// gross[i] = pos[i] * (price[i+1] - price[i]); cost[i] = eps * |trade[i]|;
    /// net[i] = gross[i] - cost[i]. `price` has n + 1 entries.
    void (*pnl)(const double* pos, const double* trade, const double* price, double eps,
                double* gross, double* cost, double* net, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// Table for `isa` if it was compiled in and the running CPU supports it.
const KernelTable* table_for(Isa isa) noexcept;

/// Best supported table, honouring the TCBUF_ISA override.
const KernelTable& active() noexcept;

// Span front-ends over active().

void axpy(double a, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x) noexcept;
double mean(std::span<const double> x) noexcept;
double sum_sq_dev(std::span<const double> x, double center) noexcept;
double max_abs(std::span<const double> x) noexcept;
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace tcbuf::kernels
