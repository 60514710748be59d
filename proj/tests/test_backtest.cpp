#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tcbuf/backtest.hpp"
#include "tcbuf/error.hpp"
#include "tcbuf/normal.hpp"
#include "test_util.hpp"

using namespace tcbuf;

namespace {

double type7(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = (v.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

}  // namespace

TEST_SUITE("backtest") {

TEST_CASE("pnl accounting by hand") {
    ExecutionResult e{{1, 2, 2}, {1, 1, 0}, {}};
    const std::vector<double> px{10, 11, 9};
    const auto p = compute_pnl(e, px, 0.5);
    REQUIRE(p.size() == 2);
    CHECK(p.gross == std::vector<double>{1.0, -4.0});
    CHECK(p.cost == std::vector<double>{0.5, 0.5});
    CHECK(p.net == std::vector<double>{0.5, -4.5});
    const auto t = p.tail(1);
    CHECK(t.net == std::vector<double>{-4.5});
    CHECK(p.tail(5).size() == 0);
}

TEST_CASE("pnl input checks") {
    ExecutionResult e{{1, 2}, {1, 1}, {}};
    CHECK_THROWS_AS(compute_pnl(e, std::vector<double>{1, 2, 3}, 0.1), DomainError);
    ExecutionResult one{{1}, {1}, {}};
    CHECK_THROWS_AS(compute_pnl(one, std::vector<double>{1}, 0.1), DomainError);
    CHECK_THROWS_AS(compute_pnl(e, std::vector<double>{1, 2}, -0.1), DomainError);
}

TEST_CASE("type-7 quantile") {
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.5) == 2.5);
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.0) == 1.0);
    CHECK(empirical_quantile({4, 1, 3, 2}, 1.0) == 4.0);
    CHECK(empirical_quantile({7}, 0.3) == 7.0);
    const auto v = testutil::normals(1001, 41);
    for (double q : {0.01, 0.25, 0.5, 0.9, 0.99}) CHECK(empirical_quantile(v, q) == doctest::Approx(type7(v, q)));
    CHECK_THROWS_AS(empirical_quantile({}, 0.5), DomainError);
}

TEST_CASE("stdev risk is the sample standard deviation") {
    const auto v = testutil::normals(500, 42, 3.0);
    CHECK(risk(v, {RiskKind::stdev}) == doctest::Approx(std::sqrt(testutil::sample_var(v))).epsilon(1e-12));
    const std::vector<double> flat(100, 0.3);
    CHECK(risk(flat, {RiskKind::stdev}) == 0.0);
    CHECK_FALSE(sharpe(flat, {RiskKind::stdev}).has_value());
}

TEST_CASE("tail measures by hand") {
    const auto v = testutil::normals(2000, 43, 2.0);
    std::vector<double> loss;
    for (double x : v) loss.push_back(-x);
    const double q = type7(loss, 0.99);
    CHECK(risk(v, {RiskKind::var, 0.01}) == doctest::Approx(q / normal::quantile(0.99)).epsilon(1e-12));
    double s = 0;
    int k = 0;
    for (double l : loss)
        if (l >= q) {
            s += l;
            ++k;
        }
    const double esf_scale = normal::pdf(normal::quantile(0.01)) / 0.01;
    CHECK(risk(v, {RiskKind::esf, 0.01}) == doctest::Approx(s / k / esf_scale).epsilon(1e-12));
}

TEST_CASE("normal P&L: the three measures agree") {
    const auto v = testutil::normals(400000, 44, 5.0);
    const double sd = risk(v, {RiskKind::stdev});
    CHECK(risk(v, {RiskKind::var}) == doctest::Approx(sd).epsilon(0.04));
    CHECK(risk(v, {RiskKind::esf}) == doctest::Approx(sd).epsilon(0.04));
    CHECK(risk(v, {RiskKind::var, 0.05}) == doctest::Approx(sd).epsilon(0.03));
}

TEST_CASE("tail measures need enough data") {
    const auto v = testutil::normals(29, 45);
    CHECK_THROWS_AS(risk(v, {RiskKind::var}), DomainError);
    CHECK_THROWS_AS(risk(v, {RiskKind::esf}), DomainError);
    CHECK_NOTHROW(risk(v, {RiskKind::stdev}));
    CHECK_THROWS_AS(risk(v, {RiskKind::var, 0.6}), DomainError);
}

TEST_CASE("var that is not a loss gives no Sharpe") {
    std::vector<double> gains(100, 1.0);
    gains[3] = 2.0;
    CHECK_FALSE(sharpe(gains, {RiskKind::var}).has_value());
    CHECK(sharpe(gains, {RiskKind::stdev}).has_value());
}

TEST_CASE("sharpe scaling") {
    auto v = testutil::normals(5000, 46);
    for (double& x : v) x += 0.05;
    for (RiskKind k : {RiskKind::stdev, RiskKind::var, RiskKind::esf}) {
        const RiskMeasure m{k, 0.01};
        const double daily = *sharpe(v, m, 1.0);
        CHECK(*sharpe(v, m, 252.0) == doctest::Approx(daily * std::sqrt(252.0)).epsilon(1e-14));
        std::vector<double> doubled = v;
        for (double& x : doubled) x *= 2.0;
        CHECK(*sharpe(doubled, m) == doctest::Approx(*sharpe(v, m)).epsilon(1e-13));
        CHECK(risk(doubled, m) == doctest::Approx(2.0 * risk(v, m)).epsilon(1e-13));
    }
}

TEST_CASE("risk kind names") {
    for (RiskKind k : {RiskKind::stdev, RiskKind::var, RiskKind::esf}) CHECK(parse_risk_kind(risk_kind_name(k)) == k);
    CHECK_FALSE(parse_risk_kind("cvar").has_value());
}

TEST_CASE("normal distribution helpers") {
    CHECK(normal::quantile(0.99) == doctest::Approx(2.3263478740).epsilon(1e-10));
    CHECK(normal::pdf(normal::quantile(0.01)) / 0.01 == doctest::Approx(2.665214220).epsilon(1e-9));
    for (double p : {1e-10, 0.001, 0.3, 0.5, 0.77, 0.999999})
        CHECK(normal::cdf(normal::quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    CHECK_THROWS_AS(normal::quantile(0.0), DomainError);
}

}  // TEST_SUITE
