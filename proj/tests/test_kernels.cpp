#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "tcbuf/kernels.hpp"
#include "test_util.hpp"

using namespace tcbuf::kernels;

namespace {

std::vector<const KernelTable*> simd_tables() {
    std::vector<const KernelTable*> out;
    for (Isa isa : {Isa::avx2, Isa::neon})
        if (const KernelTable* t = table_for(isa)) out.push_back(t);
    return out;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

const std::vector<std::size_t> kLengths = [] {
    std::vector<std::size_t> v;
    for (std::size_t n = 0; n <= 40; ++n) v.push_back(n);
    for (std::size_t n : {63, 64, 65, 127, 128, 129, 1000, 1023, 4097}) v.push_back(n);
    return v;
}();

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("isa names round-trip") {
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) CHECK(parse_isa(isa_name(isa)) == isa);
    CHECK_FALSE(parse_isa("sse9").has_value());
    CHECK(table_for(Isa::scalar) == &scalar_table());
}

TEST_CASE("active table is supported") {
    const KernelTable& t = active();
    CHECK(table_for(t.isa) == &t);
    MESSAGE("active isa: " << isa_name(t.isa));
}

TEST_CASE("scalar reductions match long double sums") {
    for (std::size_t n : kLengths) {
        const auto x = testutil::normals(n, 100 + n, 3.0);
        long double s = 0, sq = 0, mx = 0;
        for (double v : x) {
            s += v;
            sq += (static_cast<long double>(v) - 0.5L) * (static_cast<long double>(v) - 0.5L);
            mx = std::max<long double>(mx, std::fabs(v));
        }
        const auto& t = scalar_table();
        CHECK(t.sum(x.data(), n) == doctest::Approx(static_cast<double>(s)).epsilon(1e-12).scale(1.0));
        CHECK(t.sum_sq_dev(x.data(), n, 0.5) == doctest::Approx(static_cast<double>(sq)).epsilon(1e-12).scale(1.0));
        CHECK(t.max_abs(x.data(), n) == static_cast<double>(mx));
    }
}

TEST_CASE("scalar pnl and axpy follow their definitions") {
    const std::size_t n = 37;
    const auto pos = testutil::normals(n, 1);
    const auto trade = testutil::normals(n, 2);
    const auto price = testutil::normals(n + 1, 3);
    std::vector<double> g(n), c(n), net(n);
    scalar_table().pnl(pos.data(), trade.data(), price.data(), 0.3, g.data(), c.data(), net.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(g[i] == doctest::Approx(pos[i] * (price[i + 1] - price[i])));
        CHECK(c[i] == doctest::Approx(0.3 * std::fabs(trade[i])));
        CHECK(net[i] == doctest::Approx(g[i] - c[i]));
    }
    auto y = testutil::normals(n, 4);
    const auto y0 = y;
    scalar_table().axpy(-1.5, pos.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(y0[i] - 1.5 * pos[i]));
}

TEST_CASE("simd variants are bit-identical to scalar") {
    const auto tables = simd_tables();
    if (tables.empty()) {
        MESSAGE("no SIMD variant available on this machine; nothing to compare");
        return;
    }
    const KernelTable& ref = scalar_table();
    for (const KernelTable* t : tables) {
        CAPTURE(isa_name(t->isa));
        for (std::size_t n : kLengths) {
            CAPTURE(n);
            const auto x = testutil::normals(n, 7 * n + 1, 1e3);
            const auto b = testutil::normals(n, 7 * n + 2, 1e3);
            CHECK(same_bits(t->sum(x.data(), n), ref.sum(x.data(), n)));
            CHECK(same_bits(t->sum_sq_dev(x.data(), n, 1.25), ref.sum_sq_dev(x.data(), n, 1.25)));
            CHECK(same_bits(t->max_abs(x.data(), n), ref.max_abs(x.data(), n)));
            CHECK(same_bits(t->max_abs_diff(x.data(), b.data(), n), ref.max_abs_diff(x.data(), b.data(), n)));

            auto y1 = b;
            auto y2 = b;
            ref.axpy(0.37, x.data(), y1.data(), n);
            t->axpy(0.37, x.data(), y2.data(), n);
            CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);

            const auto price = testutil::normals(n + 1, 7 * n + 3, 10.0);
            std::vector<double> g1(n), c1(n), n1(n), g2(n), c2(n), n2(n);
            ref.pnl(x.data(), b.data(), price.data(), 0.01, g1.data(), c1.data(), n1.data(), n);
            t->pnl(x.data(), b.data(), price.data(), 0.01, g2.data(), c2.data(), n2.data(), n);
            CHECK(std::memcmp(g1.data(), g2.data(), n * sizeof(double)) == 0);
            CHECK(std::memcmp(c1.data(), c2.data(), n * sizeof(double)) == 0);
            CHECK(std::memcmp(n1.data(), n2.data(), n * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("simd variants agree on unaligned views") {
    const auto tables = simd_tables();
    const auto x = testutil::normals(203, 11);
    for (const KernelTable* t : tables) {
        for (std::size_t off = 0; off < 4; ++off) {
            const double* p = x.data() + off;
            CHECK(same_bits(t->sum(p, 190), scalar_table().sum(p, 190)));
        }
    }
}

TEST_CASE("span front-ends") {
    const std::vector<double> x{1.0, -4.0, 2.5};
    CHECK(sum(x) == 1.0 - 4.0 + 2.5);
    CHECK(mean(x) == doctest::Approx(-0.5 / 3.0));
    CHECK(max_abs(x) == 4.0);
    CHECK(mean(std::span<const double>{}) == 0.0);
    std::vector<double> y{1.0, 1.0};
    CHECK_THROWS(axpy(1.0, x, y));
    CHECK_THROWS(max_abs_diff(x, y));
}

}  // TEST_SUITE
