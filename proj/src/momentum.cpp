#include "tcbuf/momentum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tcbuf/error.hpp"

namespace tcbuf {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

void CrossoverSpec::validate() const {
    require(std::isfinite(t_fast) && std::isfinite(t_slow), "CrossoverSpec: periods must be finite");
    require(t_fast > 0.0, "CrossoverSpec: t_fast must be > 0");
    require(t_fast < t_slow, "CrossoverSpec: t_fast must be < t_slow");
}

void MomentumConfig::validate() const {
    require(!crossovers.empty(), "MomentumConfig: at least one crossover required");
    require(weights.size() == crossovers.size(),
            "MomentumConfig: weights and crossovers differ in length");
    for (const auto& c : crossovers) c.validate();
    for (double w : weights) require(std::isfinite(w), "MomentumConfig: weights must be finite");
    require(std::isfinite(volatility.period) && volatility.period >= 2.0,
            "MomentumConfig: vol period must be >= 2");
    require(volatility.relative_floor >= 0.0 && volatility.absolute_floor >= 0.0,
            "MomentumConfig: volatility floors must be >= 0");
    require(gamma_alpha > 0.0 && gamma_alpha < 1.0, "MomentumConfig: gamma_alpha must lie in (0, 1)");
    require(gamma_min_mass >= 0.0, "MomentumConfig: gamma_min_mass must be >= 0");
}

MomentumConfig MomentumConfig::standard(double weight_scale) {
    MomentumConfig cfg;
    cfg.crossovers = {{2, 4}, {4, 8}, {8, 16}, {16, 32}};
    cfg.weights.assign(cfg.crossovers.size(), weight_scale / static_cast<double>(cfg.crossovers.size()));
    return cfg;
}

std::vector<double> ewma_volatility(std::span<const double> returns, const VolatilityConfig& config) {
    require(!returns.empty(), "ewma_volatility: empty return series");
    require(std::isfinite(config.period) && config.period >= 2.0, "ewma_volatility: period must be >= 2");
    require(config.relative_floor >= 0.0 && config.absolute_floor >= 0.0,
            "ewma_volatility: floors must be >= 0");

    std::vector<double> sigma(returns.size());
    double var = 0.0;
    double abs_sum = 0.0;
    bool any_positive = false;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        const double r = returns[t];
        require(std::isfinite(r), "ewma_volatility: non-finite return at index " + std::to_string(t));
        const double w = std::max(1.0 / config.period, 1.0 / static_cast<double>(t + 1));
        var = (1.0 - w) * var + w * r * r;
        abs_sum += std::fabs(r);
        const double floor = std::max(config.absolute_floor,
                                      config.relative_floor * abs_sum / static_cast<double>(t + 1));
        sigma[t] = std::max(std::sqrt(var), floor);
        any_positive = any_positive || sigma[t] > 0.0;
    }
    require(any_positive, "ewma_volatility: all returns are zero and no floor is set");
    return sigma;
}

double crossover_normaliser(const CrossoverSpec& spec) {
    spec.validate();
    const double as = std::exp(-1.0 / spec.t_slow);
    const double af = std::exp(-1.0 / spec.t_fast);
    // Var(S - F) for iid unit input: sum_k (as^k - af^k)^2.
    const double var = 1.0 / (1.0 - as * as) + 1.0 / (1.0 - af * af) - 2.0 / (1.0 - as * af);
    return 1.0 / std::sqrt(var);
}

std::vector<double> crossover_signal(std::span<const double> norm_returns, const CrossoverSpec& spec) {
    const double c = crossover_normaliser(spec);
    const double as = std::exp(-1.0 / spec.t_slow);
    const double af = std::exp(-1.0 / spec.t_fast);
    std::vector<double> z(norm_returns.size());
    double slow = 0.0;
    double fast = 0.0;
    for (std::size_t t = 0; t < norm_returns.size(); ++t) {
        slow = as * slow + norm_returns[t];
        fast = af * fast + norm_returns[t];
        z[t] = c * (slow - fast);
    }
    return z;
}

double crossover_kernel(double tau, const CrossoverSpec& spec) {
    spec.validate();
    const double pref = std::sqrt(2.0 * (spec.t_slow + spec.t_fast)) / std::fabs(spec.t_slow - spec.t_fast);
    return pref * (std::exp(-tau / spec.t_slow) - std::exp(-tau / spec.t_fast));
}

double response(double z) noexcept { return z * std::exp(-0.5 * z * z); }

TargetPath target_momentum(const std::vector<std::vector<double>>& signals,
                           const MomentumConfig& config, std::span<const double> sigma_hat,
                           double gearing) {
    config.validate();
    require(std::isfinite(gearing) && gearing > 0.0, "target_momentum: gearing must be > 0");
    require(signals.size() == config.weights.size(), "target_momentum: one signal per weight required");
    const std::size_t n = sigma_hat.size();
    for (const auto& s : signals) require(s.size() == n, "target_momentum: signal length mismatch");

    TargetPath path;
    path.target.assign(n, 0.0);
    path.gamma0_sq.assign(n, nan);
    path.sigma_x.assign(sigma_hat.begin(), sigma_hat.end());
    path.warmup = std::min(config.warmup, n);
    for (std::size_t t = 0; t < n; ++t) {
        const double sigma = sigma_hat[t];
        if (!(sigma > 0.0)) continue;
        double forecast = 0.0;
        for (std::size_t j = 0; j < signals.size(); ++j) forecast += config.weights[j] * response(signals[j][t]);
        path.target[t] = gearing * forecast / sigma;
    }
    return path;
}

std::vector<double> empirical_gamma0_sq(std::span<const double> theta_hat, std::span<const double> x,
                                        double alpha, double min_mass) {
    require(alpha > 0.0 && alpha < 1.0, "empirical_gamma0_sq: alpha must lie in (0, 1)");
    require(theta_hat.size() == x.size(), "empirical_gamma0_sq: length mismatch");
    require(x.size() >= 2, "empirical_gamma0_sq: need at least two observations");
    std::vector<double> out(x.size(), nan);
    double num = 0.0;
    double den = 0.0;
    double mass = 0.0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        const double dtheta = theta_hat[t] - theta_hat[t - 1];
        const double dx = x[t] - x[t - 1];
        num = alpha * num + dtheta * dtheta;
        den = alpha * den + dx * dx;
        mass = alpha * mass + 1.0;
        if (mass >= min_mass && den > 0.0) out[t] = num / den;
    }
    return out;
}

WeightFit fit_weights(const std::vector<std::vector<double>>& features,
                      std::span<const double> forward_returns, double ridge) {
    const std::size_t m = features.size();
    const std::size_t n = forward_returns.size();
    require(m > 0, "fit_weights: no factors");
    require(ridge >= 0.0 && std::isfinite(ridge), "fit_weights: ridge must be >= 0");
    for (const auto& f : features) require(f.size() == n, "fit_weights: feature length mismatch");
    require(n >= 10 * m, "fit_weights: need at least 10 observations per factor");

    Eigen::MatrixXd design(n, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t t = 0; t < n; ++t) design(t, j) = features[j][t];
    const Eigen::Map<const Eigen::VectorXd> y(forward_returns.data(), static_cast<Eigen::Index>(n));

    const Eigen::MatrixXd gram = design.transpose() * design;
    Eigen::MatrixXd penalised = gram;
    penalised.diagonal() += ridge * gram.diagonal();

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(penalised);
    const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
    const double scale = std::max(pivots.maxCoeff(), std::numeric_limits<double>::min());
    require(ldlt.info() == Eigen::Success && pivots.minCoeff() > 1e-12 * scale,
            "fit_weights: design matrix is rank deficient");

    const Eigen::VectorXd beta = ldlt.solve(design.transpose() * y);
    const Eigen::VectorXd resid = y - design * beta;
    const double dof = static_cast<double>(n - m);
    const double s2 = resid.squaredNorm() / (dof > 0 ? dof : 1.0);
    const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                                     static_cast<Eigen::Index>(m)));
    const Eigen::MatrixXd cov = s2 * inv * gram * inv;

    WeightFit fit;
    fit.observations = n;
    for (std::size_t j = 0; j < m; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        fit.weights.push_back(beta(jj));
        fit.std_errors.push_back(std::sqrt(std::max(cov(jj, jj), 0.0)));
    }
    return fit;
}

MomentumPipeline run_momentum(std::span<const double> prices, const MomentumConfig& config,
                              double gearing) {
    config.validate();
    const std::size_t n = prices.size();
    require(n >= 2, "run_momentum: need at least two prices");

    MomentumPipeline p;
    p.returns.assign(n, 0.0);
    for (std::size_t t = 1; t < n; ++t) p.returns[t] = prices[t] - prices[t - 1];

    const std::vector<double> sigma =
        ewma_volatility(std::span<const double>(p.returns).subspan(1), config.volatility);
    p.sigma_hat.assign(n, nan);
    std::copy(sigma.begin(), sigma.end(), p.sigma_hat.begin() + 1);

    p.norm_returns.assign(n, 0.0);
    for (std::size_t t = 1; t < n; ++t)
        if (p.sigma_hat[t] > 0.0) p.norm_returns[t] = p.returns[t] / p.sigma_hat[t];

    for (const auto& spec : config.crossovers) p.signals.push_back(crossover_signal(p.norm_returns, spec));

    p.targets = target_momentum(p.signals, config, p.sigma_hat, gearing);
    p.targets.gamma0_sq = empirical_gamma0_sq(p.targets.target, prices, config.gamma_alpha,
                                              config.gamma_min_mass);
    return p;
}

RegressionData regression_data(const MomentumPipeline& pipeline, std::size_t warmup) {
    const std::size_t n = pipeline.norm_returns.size();
    RegressionData data;
    data.features.resize(pipeline.signals.size());
    for (std::size_t t = warmup; t + 1 < n; ++t) {
        for (std::size_t j = 0; j < pipeline.signals.size(); ++j)
            data.features[j].push_back(response(pipeline.signals[j][t]));
        data.forward_returns.push_back(pipeline.norm_returns[t + 1]);
    }
    return data;
}

}  // namespace tcbuf
