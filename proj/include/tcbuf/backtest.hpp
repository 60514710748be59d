#pragma once

// P&L accounting under proportional costs and Sharpe ratios under three
// risk measures normalised to agree on zero-mean Normal P&L.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tcbuf/buffer_core.hpp"

namespace tcbuf {

/// Step t holds the post-trade position theta_t over (t, t+1]:
///   gross_t = theta_t (X_{t+1} - X_t),  cost_t = epsilon |trade_t|,  net_t = gross_t - cost_t.
/// The last position has no realised return, so a path of n positions gives n - 1 steps.
struct PnlSeries {
    std::vector<double> gross;
    std::vector<double> cost;
    std::vector<double> net;

    std::size_t size() const noexcept { return net.size(); }
    /// Steps [first, size()).
    PnlSeries tail(std::size_t first) const;
};

enum class RiskKind { stdev, var, esf };

std::string_view risk_kind_name(RiskKind kind) noexcept;
std::optional<RiskKind> parse_risk_kind(std::string_view name) noexcept;

struct RiskMeasure {
    RiskKind kind = RiskKind::stdev;
    double p = 0.01;

    void validate() const;
};

/// Throws DomainError if prices and positions differ in length or fewer than two are given.
PnlSeries compute_pnl(const ExecutionResult& execution, std::span<const double> prices, double epsilon);

/// Dollars per step.
///   stdev: sample standard deviation of net P&L.
///   var:   (1-p)-quantile of losses -net (linear interpolation), / Phi^-1(1-p).
///   esf:   mean of losses at or beyond that quantile, / (phi(Phi^-1(p)) / p).
/// var and esf need at least 30 observations.
double risk(std::span<const double> pnl, const RiskMeasure& measure);
double risk(const PnlSeries& pnl, const RiskMeasure& measure);

/// mean / risk * sqrt(annualization). nullopt when risk is not positive
/// (no trading, or a VaR that is not a loss).
std::optional<double> sharpe(std::span<const double> pnl, const RiskMeasure& measure,
                             double annualization = 252.0);
std::optional<double> sharpe(const PnlSeries& pnl, const RiskMeasure& measure,
                             double annualization = 252.0);

/// Empirical quantile with linear interpolation between order statistics (type 7).
double empirical_quantile(std::vector<double> values, double q);

}  // namespace tcbuf
