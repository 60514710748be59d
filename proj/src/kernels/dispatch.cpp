#include <cstdlib>
#include <stdexcept>

#include "kernel_impls.hpp"

namespace tcbuf::kernels {
namespace {

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(TCBUF_BUILD_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(TCBUF_BUILD_NEON)
            return true;  // mandatory on aarch64
#else
            return false;
#endif
    }
    return false;
}

struct Registry {
    KernelTable scalar = detail::make_scalar_table();
#if defined(TCBUF_BUILD_AVX2)
    KernelTable avx2 = detail::make_avx2_table();
#endif
#if defined(TCBUF_BUILD_NEON)
    KernelTable neon = detail::make_neon_table();
#endif
};

const Registry& registry() noexcept {
    static const Registry r;
    return r;
}

const KernelTable& choose() noexcept {
    if (const char* env = std::getenv("TCBUF_ISA")) {
        if (auto isa = parse_isa(env)) {
            if (const KernelTable* t = table_for(*isa)) return *t;
        }
    }
    for (Isa isa : {Isa::avx2, Isa::neon}) {
        if (const KernelTable* t = table_for(isa)) return *t;
    }
    return registry().scalar;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept {
    if (name == "scalar") return Isa::scalar;
    if (name == "avx2") return Isa::avx2;
    if (name == "neon") return Isa::neon;
    return std::nullopt;
}

const KernelTable& scalar_table() noexcept { return registry().scalar; }

const KernelTable* table_for(Isa isa) noexcept {
    if (!cpu_supports(isa)) return nullptr;
    switch (isa) {
        case Isa::scalar:
            return &registry().scalar;
        case Isa::avx2:
#if defined(TCBUF_BUILD_AVX2)
            return &registry().avx2;
#else
            return nullptr;
#endif
        case Isa::neon:
#if defined(TCBUF_BUILD_NEON)
            return &registry().neon;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable& active() noexcept {
    static const KernelTable& table = choose();
    return table;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
    active().axpy(a, x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) noexcept { return active().sum(x.data(), x.size()); }

double mean(std::span<const double> x) noexcept {
    return x.empty() ? 0.0 : sum(x) / static_cast<double>(x.size());
}

double sum_sq_dev(std::span<const double> x, double center) noexcept {
    return active().sum_sq_dev(x.data(), x.size(), center);
}

double max_abs(std::span<const double> x) noexcept { return active().max_abs(x.data(), x.size()); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: length mismatch");
    return active().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace tcbuf::kernels
