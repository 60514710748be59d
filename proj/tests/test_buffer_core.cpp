#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "tcbuf/buffer_core.hpp"
#include "tcbuf/error.hpp"
#include "test_util.hpp"

using namespace tcbuf;

namespace {

// Straight-line restatement of the band rule, kept deliberately naive.
std::vector<double> reference_positions(const std::vector<double>& target, const std::vector<double>& h,
                                        double start) {
    std::vector<double> out;
    double p = start;
    for (std::size_t t = 0; t < target.size(); ++t) {
        const double lo = target[t] - h[t];
        const double hi = target[t] + h[t];
        if (p < lo) p = lo;
        if (p > hi) p = hi;
        out.push_back(p);
    }
    return out;
}

TargetPath constant_path(std::vector<double> target, double g2, std::size_t warmup = 0) {
    TargetPath p;
    p.gamma0_sq.assign(target.size(), g2);
    p.sigma_x.assign(target.size(), 1.0);
    p.target = std::move(target);
    p.warmup = warmup;
    return p;
}

}  // namespace

TEST_SUITE("buffer_core") {

TEST_CASE("treasury futures worked example") {
    const double w = half_width({10.0, 1e6, 35.0 * 35.0 / (400.0 * 400.0)});
    CHECK(w == doctest::Approx(48.6).epsilon(0.01));
    CHECK(std::llround(w) == 49);
}

TEST_CASE("credit index worked example") {
    const double w = half_width({190.0, 5e5, 4.0 * 4.0 / (875.0 * 875.0)});
    CHECK(w == doctest::Approx(14.4).epsilon(0.02));
    CHECK(std::llround(w) == 14);
}

TEST_CASE("zero cost or zero trading speed gives zero width") {
    CHECK(half_width({0.0, 1e6, 3.0}) == 0.0);
    CHECK(half_width({0.5, 1e6, 0.0}) == 0.0);
}

TEST_CASE("invalid inputs are domain errors") {
    CHECK_THROWS_AS(half_width({-1.0, 1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(half_width({1.0, 0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(half_width({1.0, 1.0, -1.0}), DomainError);
    CHECK_THROWS_AS(half_width({std::numeric_limits<double>::infinity(), 1.0, 1.0}), DomainError);
}

TEST_CASE("one-factor closed form") {
    // kappa 0.02, beta 0.04, sigma 0.5, G 1e6: gamma0_sq = 2 b^2 k G^2 / s^4
    const double g2 = 2.0 * 0.04 * 0.04 * 0.02 * 1e12 / std::pow(0.5, 4);
    const double expect = 1e6 * std::cbrt(3.0 * 0.1 * 0.02 * 0.04 * 0.04 / std::pow(0.5, 4));
    CHECK(half_width({0.1, 1e6, g2}) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(53554.636).epsilon(1e-7));
}

TEST_CASE("cube-root scaling in cost and gearing") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const BufferParams p{std::pow(10.0, u(rng)), std::pow(10.0, 2 * u(rng)), std::pow(10.0, u(rng))};
        const double w = half_width(p);
        CHECK(half_width({8 * p.epsilon, p.gearing, p.gamma0_sq}) == doctest::Approx(2 * w).epsilon(1e-12));
        CHECK(half_width({p.epsilon, 27 * p.gearing, p.gamma0_sq}) == doctest::Approx(3 * w).epsilon(1e-12));
    }
}

TEST_CASE("band: inside, below, above") {
    const std::vector<double> target{10.0};
    const std::vector<double> h{3.0};
    CHECK(apply_band(target, h, 11.0, 1.0).positions[0] == 11.0);
    CHECK(apply_band(target, h, 11.0, 1.0).trades[0] == 0.0);

    const auto below = apply_band(target, h, 2.0, 0.5);
    CHECK(below.positions[0] == 7.0);
    CHECK(below.trades[0] == 5.0);
    CHECK(below.costs[0] == 2.5);

    const auto above = apply_band(target, h, 20.0, 1.0);
    CHECK(above.positions[0] == 13.0);
    CHECK(above.trades[0] == -7.0);
}

TEST_CASE("band edges are inside the no-trade zone") {
    const std::vector<double> target{10.0, 10.0};
    const std::vector<double> h{3.0, 3.0};
    CHECK(apply_band(target, h, 13.0, 1.0).trades[0] == 0.0);
    CHECK(apply_band(target, h, 7.0, 1.0).trades[0] == 0.0);
}

TEST_CASE("lambda zero tracks the target") {
    auto path = constant_path(testutil::normals(50, 3, 100.0), 4.0);
    const auto r = apply_buffer(path, {0.2, 1e3}, 0.0, 17.0);
    CHECK(r.positions == path.target);
    CHECK(r.trades[0] == path.target[0] - 17.0);
}

TEST_CASE("execution matches the naive rule on random paths") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto target = testutil::normals(300, seed, 50.0);
        auto h = testutil::uniforms(300, seed + 1000, 0.0, 40.0);
        const auto r = apply_band(target, h, 3.0, 0.1);
        const auto ref = reference_positions(target, h, 3.0);
        REQUIRE(r.positions.size() == ref.size());
        double prev = 3.0;
        for (std::size_t t = 0; t < ref.size(); ++t) {
            CHECK(r.positions[t] == ref[t]);
            CHECK(r.trades[t] == doctest::Approx(ref[t] - prev));
            CHECK(std::fabs(r.positions[t] - target[t]) <= h[t] + 1e-12);
            if (std::fabs(prev - target[t]) <= h[t]) CHECK(r.trades[t] == 0.0);
            prev = ref[t];
        }
    }
}

TEST_CASE("widths: nan trading speed gives no buffer") {
    auto path = constant_path({1.0, 2.0, 3.0}, 2.0);
    path.gamma0_sq[1] = std::numeric_limits<double>::quiet_NaN();
    const auto w = buffer_widths(path, {0.5, 10.0});
    CHECK(w[0] == doctest::Approx(std::cbrt(1.5 * 0.5 * 10.0 * 2.0)));
    CHECK(w[1] == 0.0);
    CHECK(w[2] == w[0]);
}

TEST_CASE("time-average width") {
    auto path = constant_path({0, 0, 0, 0, 0}, 2.0, 2);
    const double w = half_width({0.5, 10.0, 2.0});
    CHECK(time_average_width(path, {0.5, 10.0}, 1.0) == doctest::Approx(w));
    CHECK(time_average_width(path, {0.5, 10.0}, 2.5) == doctest::Approx(2.5 * w));
    path.gamma0_sq[0] = 100.0;  // inside warmup, ignored
    CHECK(time_average_width(path, {0.5, 10.0}, 1.0) == doctest::Approx(w));
    path.warmup = 5;
    CHECK_THROWS_AS(time_average_width(path, {0.5, 10.0}, 1.0), DomainError);
}

TEST_CASE("path validation") {
    TargetPath p = constant_path({1.0, 2.0}, 1.0);
    p.sigma_x.pop_back();
    CHECK_THROWS_AS(p.validate(), DomainError);
    CHECK_THROWS_AS(apply_buffer(constant_path({1.0}, 1.0), {0.1, 1.0}, -1.0), DomainError);
}

}  // TEST_SUITE
