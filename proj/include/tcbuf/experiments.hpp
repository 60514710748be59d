#pragma once

// Lambda sweeps: scale the optimal buffer by lambda, run the no-trade policy,
// and record (time-averaged width, Sharpe) per (epsilon, lambda). Synthetic
// runs average over seeds.

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcbuf/backtest.hpp"
#include "tcbuf/data_io.hpp"
#include "tcbuf/dp_oracle.hpp"

namespace tcbuf {

inline constexpr std::size_t kRiskKinds = 3;

inline std::size_t risk_index(RiskKind k) noexcept { return static_cast<std::size_t>(k); }

struct SweepPoint {
    double lambda = 0.0;
    double avg_width = 0.0;
    /// Mean over seeds with a defined value; nullopt if none or not requested.
    std::array<std::optional<double>, kRiskKinds> sharpe;
    /// Standard error of that mean; NaN with fewer than two defined seeds.
    std::array<double, kRiskKinds> sharpe_se{};
    /// One entry per seed, NaN where undefined or not requested.
    std::array<std::vector<double>, kRiskKinds> seed_sharpe;
    double mean_pnl = 0.0;    // per step, averaged over seeds
    double total_cost = 0.0;  // over the measured window, averaged over seeds
    bool undefined = false;   // no seed produced any defined Sharpe
    bool unit_lambda = false;
};

struct SweepCurve {
    double epsilon = 0.0;  // dollars per unit
    std::vector<SweepPoint> points;

    /// Throws DomainError if lambda is not on the curve.
    const SweepPoint& at(double lambda) const;
};

/// Sorted, de-duplicated lambdas with 1 inserted if absent.
std::vector<double> sweep_lambdas(std::span<const double> configured);

/// Effective dollar epsilons for a config (quotes converted per market convention).
std::vector<double> effective_epsilons(const RunConfig& config, std::optional<double> reference_price = std::nullopt);

std::vector<SweepCurve> synthetic_sweep(const OneFactorStrategy& strategy, double gearing,
                                        std::span<const double> epsilons, const ExperimentConfig& experiment,
                                        double annualization = 252.0);

std::vector<SweepCurve> momentum_sweep(std::span<const double> prices, const MomentumConfig& momentum,
                                       double gearing, std::span<const double> epsilons,
                                       const ExperimentConfig& experiment, double annualization = 252.0);

/// Dispatches on the strategy kind. Momentum configs read market.price_csv and
/// fit weights first when asked to.
std::vector<SweepCurve> lambda_sweep(const RunConfig& config);

/// Header `epsilon,lambda,avg_width,sharpe_stdev,sharpe_var,sharpe_esf,mean_pnl,total_cost,undefined_flag`,
/// one row per point in curve order. Undefined Sharpe fields are left empty.
std::string format_sweep_csv(const std::vector<SweepCurve>& curves);
void emit_csv(const std::vector<SweepCurve>& curves, const std::filesystem::path& path);

/// Header `epsilon,oracle_half_width,formula_half_width,ratio,refined_half_width,refinement_change`.
std::string format_oracle_csv(const std::vector<OracleRow>& rows);
void emit_oracle_csv(const std::vector<OracleRow>& rows, const std::filesystem::path& path);

}  // namespace tcbuf
