#include <doctest.h>

#include <cmath>
#include <random>

#include "tcbuf/buffer_core.hpp"
#include "tcbuf/error.hpp"
#include "tcbuf/synth_models.hpp"
#include "test_util.hpp"

using namespace tcbuf;

namespace {

double autocorr(const std::vector<double>& z, std::size_t lag) {
    const double m = testutil::sample_mean(z);
    long double num = 0, den = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        den += (z[i] - m) * (z[i] - m);
        if (i + lag < z.size()) num += (z[i] - m) * (z[i + lag] - m);
    }
    return static_cast<double>(num / den);
}

}  // namespace

TEST_SUITE("synth_models") {

TEST_CASE("same seed, same path; different seed, different path") {
    const OneFactorParams p;
    const auto a = simulate_one_factor(p, 500, 42);
    const auto b = simulate_one_factor(p, 500, 42);
    const auto c = simulate_one_factor(p, 500, 43);
    CHECK(a.x == b.x);
    CHECK(a.z == b.z);
    CHECK(a.x != c.x);
    CHECK(a.x.size() == 500);
    CHECK(a.x[0] == 0.0);
}

TEST_CASE("factor is stationary with unit variance") {
    OneFactorParams p;
    p.kappa = 0.5;
    const auto path = simulate_one_factor(p, 100000, 9);
    CHECK(testutil::sample_mean(path.z) == doctest::Approx(0.0).epsilon(0.03).scale(1.0));
    CHECK(testutil::sample_var(path.z) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("exact OU autocorrelation") {
    OneFactorParams p;
    p.kappa = 0.2;
    p.dt = 0.5;
    const auto path = simulate_one_factor(p, 200000, 10);
    for (std::size_t lag : {1u, 3u, 10u}) {
        CAPTURE(lag);
        CHECK(autocorr(path.z, lag) == doctest::Approx(std::exp(-0.2 * 0.5 * lag)).epsilon(0.03));
    }
}

TEST_CASE("asset drift and noise") {
    OneFactorParams p;
    p.kappa = 0.5;
    p.beta = 0.1;
    p.sigma_x = 2.0;
    p.dt = 0.25;
    p.rho01 = 0.6;
    const std::size_t n = 200000;
    const auto path = simulate_one_factor(p, n, 11);
    // Regress dX on Z: slope beta sigma dt, residual sd sigma sqrt(dt).
    long double szz = 0, szx = 0;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        szz += path.z[t] * path.z[t];
        szx += path.z[t] * (path.x[t + 1] - path.x[t]);
    }
    const double slope = static_cast<double>(szx / szz);
    CHECK(slope == doctest::Approx(0.1 * 2.0 * 0.25).epsilon(0.1));

    std::vector<double> e_x, e_z;
    const double decay = std::exp(-0.5 * 0.25);
    for (std::size_t t = 0; t + 1 < n; ++t) {
        e_x.push_back(path.x[t + 1] - path.x[t] - 0.1 * 2.0 * path.z[t] * 0.25);
        e_z.push_back(path.z[t + 1] - decay * path.z[t]);
    }
    CHECK(std::sqrt(testutil::sample_var(e_x)) == doctest::Approx(2.0 * 0.5).epsilon(0.01));
    long double cov = 0;
    for (std::size_t i = 0; i < e_x.size(); ++i) cov += e_x[i] * e_z[i];
    const double corr = static_cast<double>(cov / e_x.size()) /
                        std::sqrt(testutil::sample_var(e_x) * testutil::sample_var(e_z));
    CHECK(corr == doctest::Approx(0.6).epsilon(0.03));
}

TEST_CASE("no predictability: driftless steps with sd sigma sqrt(dt)") {
    OneFactorParams p;
    p.beta = 0.0;
    p.dt = 0.01;
    p.sigma_x = 3.0;
    const auto path = simulate_one_factor(p, 50000, 12);
    std::vector<double> dx;
    for (std::size_t t = 0; t + 1 < path.x.size(); ++t) dx.push_back(path.x[t + 1] - path.x[t]);
    CHECK(std::sqrt(testutil::sample_var(dx)) == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("one-factor target") {
    const OneFactorParams p;
    const auto tp = target_one_factor({0.0, 1.0, -2.0}, p, 1e6);
    CHECK(tp.target[0] == 0.0);
    CHECK(tp.target[1] == doctest::Approx(80000.0));
    CHECK(tp.target[2] == doctest::Approx(-160000.0));
    for (double g : tp.gamma0_sq) CHECK(g == theoretical_gamma0_sq(p, 1e6));
}

TEST_CASE("closed-form trading speed and Sharpe") {
    OneFactorParams p;
    CHECK(theoretical_gamma0_sq(p, 1e6) == doctest::Approx(1.024e9));
    OneFactorParams q = p;
    q.kappa *= 2;
    CHECK(theoretical_gamma0_sq(q, 1e6) == doctest::Approx(2.048e9));
    q = p;
    q.beta = 0.0;
    CHECK(theoretical_gamma0_sq(q, 1e6) == 0.0);
    CHECK(theoretical_sharpe(0.04, 1.0) == doctest::Approx(0.04));
    CHECK(theoretical_sharpe(0.04, 252.0) == doctest::Approx(0.635).epsilon(0.001));
    CHECK(theoretical_sharpe(-0.04, 252.0) == theoretical_sharpe(0.04, 252.0));
    CHECK_THROWS_AS(theoretical_sharpe(0.04, 0.0), DomainError);
}

TEST_CASE("half-width identity over random parameters") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        OneFactorParams p;
        p.kappa = 0.001 + u(rng);
        p.beta = (u(rng) - 0.5) * 0.2;
        p.sigma_x = 0.05 + 5 * u(rng);
        const double G = std::pow(10.0, 3 + 4 * u(rng));
        const double eps = 1e-3 + u(rng);
        if (p.beta == 0.0) continue;
        const double ab = std::fabs(p.beta);
        const double closed = std::cbrt(3 * eps * p.kappa / (p.sigma_x * ab)) * G * ab / p.sigma_x;
        CHECK(half_width({eps, G, theoretical_gamma0_sq(p, G)}) == doctest::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("factor correlation does not move the buffer") {
    OneFactorParams p;
    double prev = -1;
    for (double rho : {-0.5, 0.0, 0.5}) {
        p.rho01 = rho;
        const double w = half_width({0.1, 1e6, theoretical_gamma0_sq(p, 1e6)});
        if (prev >= 0) CHECK(w == prev);
        prev = w;
    }
}

TEST_CASE("parameter validation") {
    OneFactorParams p;
    p.kappa = 0.0;
    CHECK_THROWS_AS(simulate_one_factor(p, 10, 1), DomainError);
    p = {};
    p.rho01 = 1.5;
    CHECK_THROWS_AS(simulate_one_factor(p, 10, 1), DomainError);
    p = {};
    p.sigma_x = -1;
    CHECK_THROWS_AS(target_one_factor({1.0}, p, 1.0), DomainError);
}

TEST_CASE("zero-factor model") {
    const ZeroFactorParams p{0.05, 1.0};
    const auto tp = target_zero_factor({0.0, 2.0}, p, 1e6);
    CHECK(tp.target[0] == 0.0);
    CHECK(tp.target[1] == doctest::Approx(-0.05 * 2.0 * 1e6));
    // sigma_theta = b G / sigma, sigma_X = sigma, so gamma0_sq = b^2 G^2 / sigma^4.
    const double w = half_width({0.1, 1e6, tp.gamma0_sq[1]});
    CHECK(w == doctest::Approx(std::cbrt(3 * 0.1 * 0.05 * 0.05 / 2.0) * 1e6).epsilon(1e-12));
    CHECK(w == doctest::Approx(72112.5).epsilon(1e-5));

    const ZeroFactorParams q{0.2, 3.0};
    const auto tq = target_zero_factor({1.0}, q, 500.0);
    CHECK(half_width({0.3, 500.0, tq.gamma0_sq[0]}) ==
          doctest::Approx(std::cbrt(3 * 0.3 * 0.04 / (2 * 81.0)) * 500.0).epsilon(1e-12));
}

TEST_CASE("zero-factor simulation is mean-reverting") {
    const ZeroFactorParams p{0.1, 1.0};
    const auto x = simulate_zero_factor(p, 1.0, 100000, 14);
    CHECK(x == simulate_zero_factor(p, 1.0, 100000, 14));
    // stationary variance sigma^2 / (2b)
    CHECK(testutil::sample_var(x) == doctest::Approx(5.0).epsilon(0.1));
    CHECK(autocorr(x, 1) == doctest::Approx(std::exp(-0.1)).epsilon(0.02));
}

}  // TEST_SUITE
