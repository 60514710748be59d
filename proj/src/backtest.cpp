#include "tcbuf/backtest.hpp"

#include <algorithm>
#include <cmath>

#include "tcbuf/error.hpp"
#include "tcbuf/kernels.hpp"
#include "tcbuf/normal.hpp"

namespace tcbuf {
namespace {

constexpr std::size_t kMinTailObservations = 30;

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

PnlSeries PnlSeries::tail(std::size_t first) const {
    first = std::min(first, size());
    PnlSeries out;
    out.gross.assign(gross.begin() + static_cast<std::ptrdiff_t>(first), gross.end());
    out.cost.assign(cost.begin() + static_cast<std::ptrdiff_t>(first), cost.end());
    out.net.assign(net.begin() + static_cast<std::ptrdiff_t>(first), net.end());
    return out;
}

std::string_view risk_kind_name(RiskKind kind) noexcept {
    switch (kind) {
        case RiskKind::stdev: return "stdev";
        case RiskKind::var: return "var";
        case RiskKind::esf: return "esf";
    }
    return "unknown";
}

std::optional<RiskKind> parse_risk_kind(std::string_view name) noexcept {
    if (name == "stdev") return RiskKind::stdev;
    if (name == "var") return RiskKind::var;
    if (name == "esf") return RiskKind::esf;
    return std::nullopt;
}

void RiskMeasure::validate() const {
    require(p > 0.0 && p < 0.5, "RiskMeasure: tail probability must lie in (0, 0.5)");
}

PnlSeries compute_pnl(const ExecutionResult& execution, std::span<const double> prices, double epsilon) {
    require(std::isfinite(epsilon) && epsilon >= 0.0, "compute_pnl: epsilon must be >= 0");
    require(execution.positions.size() == prices.size(), "compute_pnl: positions and prices differ in length");
    require(execution.trades.size() == prices.size(), "compute_pnl: trades and prices differ in length");
    require(prices.size() >= 2, "compute_pnl: need at least two prices");
    const std::size_t n = prices.size() - 1;
    PnlSeries out;
    out.gross.resize(n);
    out.cost.resize(n);
    out.net.resize(n);
    kernels::active().pnl(execution.positions.data(), execution.trades.data(), prices.data(), epsilon,
                          out.gross.data(), out.cost.data(), out.net.data(), n);
    return out;
}

double empirical_quantile(std::vector<double> values, double q) {
    require(!values.empty(), "empirical_quantile: empty sample");
    require(q >= 0.0 && q <= 1.0, "empirical_quantile: q must lie in [0, 1]");
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
    const double v_lo = values[lo];
    if (hi == lo) return v_lo;
    const double v_hi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
    return v_lo + (h - static_cast<double>(lo)) * (v_hi - v_lo);
}

double risk(std::span<const double> pnl, const RiskMeasure& measure) {
    measure.validate();
    if (measure.kind == RiskKind::stdev) {
        require(pnl.size() >= 2, "risk: need at least two observations");
        const auto [lo, hi] = std::minmax_element(pnl.begin(), pnl.end());
        if (*lo == *hi) return 0.0;
        const double m = kernels::mean(pnl);
        return std::sqrt(kernels::sum_sq_dev(pnl, m) / static_cast<double>(pnl.size() - 1));
    }
    require(pnl.size() >= kMinTailObservations, "risk: VaR/ESF need at least 30 observations");

    std::vector<double> losses(pnl.size());
    std::transform(pnl.begin(), pnl.end(), losses.begin(), [](double v) { return -v; });
    const double z = normal::quantile(1.0 - measure.p);
    const double var_raw = empirical_quantile(losses, 1.0 - measure.p);
    if (measure.kind == RiskKind::var) return var_raw / z;

    double tail_sum = 0.0;
    std::size_t tail_n = 0;
    for (double l : losses) {
        if (l >= var_raw) {
            tail_sum += l;
            ++tail_n;
        }
    }
    const double esf_raw = tail_sum / static_cast<double>(tail_n);
    return esf_raw / (normal::pdf(z) / measure.p);
}

double risk(const PnlSeries& pnl, const RiskMeasure& measure) { return risk(pnl.net, measure); }

std::optional<double> sharpe(std::span<const double> pnl, const RiskMeasure& measure, double annualization) {
    require(annualization > 0.0, "sharpe: annualization must be > 0");
    const double r = risk(pnl, measure);
    if (!(r > 0.0) || !std::isfinite(r)) return std::nullopt;
    return kernels::mean(pnl) / r * std::sqrt(annualization);
}

std::optional<double> sharpe(const PnlSeries& pnl, const RiskMeasure& measure, double annualization) {
    return sharpe(std::span<const double>(pnl.net), measure, annualization);
}

}  // namespace tcbuf
