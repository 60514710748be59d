#pragma once

// Momentum target positions built from EWMA crossovers of volatility-normalised
// returns, and an empirical estimate of the target-to-asset volatility ratio.
//
// All series are indexed by price time t = 0..n-1. The return at t is
// X_t - X_{t-1}; t = 0 has no return. Every output at t depends only on
// prices up to and including t.

#include <cstddef>
#include <span>
#include <vector>

#include "tcbuf/buffer_core.hpp"

namespace tcbuf {

struct CrossoverSpec {
    double t_fast = 2.0;  // days
    double t_slow = 4.0;  // days

    void validate() const;
    bool operator==(const CrossoverSpec&) const = default;
};

struct VolatilityConfig {
    double period = 32.0;
    /// Floor as a fraction of the running mean absolute return.
    double relative_floor = 1e-6;
    double absolute_floor = 0.0;
};

struct MomentumConfig {
    std::vector<CrossoverSpec> crossovers;
    std::vector<double> weights;
    VolatilityConfig volatility;
    double gamma_alpha = 1.0 - 1.0 / 32.0;
    /// Minimum effective observation count (sum of alpha^n) before the
    /// gamma0_sq estimate is reported.
    double gamma_min_mass = 10.0;
    std::size_t warmup = 100;

    void validate() const;

    /// The four doubling crossovers 2:4, 4:8, 8:16, 16:32 with equal weights summing to `scale`.
    static MomentumConfig standard(double weight_scale = 0.04);
};

/// EWMA of squared returns: s2_t = (1 - w_t) s2_{t-1} + w_t r_t^2 with
/// w_t = max(1/period, 1/(t+1)), so the first `period` steps are a running
/// mean. The returned sigma is floored per VolatilityConfig. Throws
/// DomainError if every return is zero and both floors are zero.
std::vector<double> ewma_volatility(std::span<const double> returns, const VolatilityConfig& config);

/// Normalising constant c giving Var(Z) = 1 on iid unit-variance input.
double crossover_normaliser(const CrossoverSpec& spec);

/// Z_t = c (S_t - F_t), S and F exponential filters of u with decay e^(-1/T).
std::vector<double> crossover_signal(std::span<const double> norm_returns, const CrossoverSpec& spec);

/// Continuous-time kernel with its unit-L2 prefactor:
/// sqrt(2(Ts+Tf))/|Ts-Tf| (e^(-tau/Ts) - e^(-tau/Tf)).
double crossover_kernel(double tau, const CrossoverSpec& spec);

/// psi(z) = z e^(-z^2/2)
double response(double z) noexcept;

/// target_t = G sum_j w_j psi(Z_{j,t}) / sigma_t. Steps where sigma_t is
/// zero or NaN carry no information and get a zero target. gamma0_sq is left
/// NaN; see empirical_gamma0_sq.
TargetPath target_momentum(const std::vector<std::vector<double>>& signals,
                           const MomentumConfig& config, std::span<const double> sigma_hat,
                           double gearing);

/// Ratio of exponentially weighted sums of squared increments of the target
/// and of X (weights alpha^n). NaN until the weight mass reaches `min_mass`
/// and while the X accumulator is zero.
std::vector<double> empirical_gamma0_sq(std::span<const double> theta_hat, std::span<const double> x,
                                        double alpha, double min_mass = 10.0);

struct WeightFit {
    std::vector<double> weights;
    std::vector<double> std_errors;
    std::size_t observations = 0;
};

/// Ridge regression (no intercept) of forward normalised returns on the
/// response-transformed signals. The penalty is `ridge` times each diagonal
/// entry of the Gram matrix. Throws DomainError if the design is rank
/// deficient after the penalty or there are fewer than 10 observations per factor.
WeightFit fit_weights(const std::vector<std::vector<double>>& features,
                      std::span<const double> forward_returns, double ridge = 1e-6);

/// Everything the momentum strategy derives from one price series.
struct MomentumPipeline {
    std::vector<double> returns;       // r_0 = 0
    std::vector<double> sigma_hat;     // NaN at t = 0
    std::vector<double> norm_returns;  // u_t = r_t / sigma_t, 0 where undefined
    std::vector<std::vector<double>> signals;
    TargetPath targets;                // gamma0_sq from empirical_gamma0_sq
};

MomentumPipeline run_momentum(std::span<const double> prices, const MomentumConfig& config,
                              double gearing);

/// Features psi(Z_{j,t}) and targets u_{t+1} over t in [warmup, n-1) for fit_weights.
struct RegressionData {
    std::vector<std::vector<double>> features;
    std::vector<double> forward_returns;
};
RegressionData regression_data(const MomentumPipeline& pipeline, std::size_t warmup);

}  // namespace tcbuf
