#include "tcbuf/synth_models.hpp"

#include <cmath>
#include <random>

#include "tcbuf/error.hpp"

namespace tcbuf {
namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

void OneFactorParams::validate() const {
    require(std::isfinite(kappa) && kappa > 0.0, "OneFactorParams: kappa must be > 0");
    require(std::isfinite(beta), "OneFactorParams: beta must be finite");
    require(std::isfinite(sigma_x) && sigma_x > 0.0, "OneFactorParams: sigma_x must be > 0");
    require(std::isfinite(rho01) && std::fabs(rho01) <= 1.0, "OneFactorParams: |rho01| must be <= 1");
    require(std::isfinite(dt) && dt > 0.0, "OneFactorParams: dt must be > 0");
}

void ZeroFactorParams::validate() const {
    require(std::isfinite(b) && b > 0.0, "ZeroFactorParams: b must be > 0");
    require(std::isfinite(sigma) && sigma > 0.0, "ZeroFactorParams: sigma must be > 0");
}

OneFactorPath simulate_one_factor(const OneFactorParams& params, std::size_t n_steps,
                                  std::uint64_t seed) {
    params.validate();
    OneFactorPath path;
    if (n_steps == 0) return path;
    path.x.resize(n_steps);
    path.z.resize(n_steps);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;

    const double decay = std::exp(-params.kappa * params.dt);
    const double shock = std::sqrt(-std::expm1(-2.0 * params.kappa * params.dt));
    const double drift = params.beta * params.sigma_x * params.dt;
    const double diffusion = params.sigma_x * std::sqrt(params.dt);
    // Cholesky factor of [[1, rho], [rho, 1]].
    const double rho = params.rho01;
    const double rho_perp = std::sqrt(1.0 - rho * rho);

    path.x[0] = 0.0;
    path.z[0] = normal(rng);
    for (std::size_t t = 1; t < n_steps; ++t) {
        const double g1 = normal(rng);
        const double g2 = normal(rng);
        const double xi = g1;
        const double zeta = rho * g1 + rho_perp * g2;
        path.z[t] = path.z[t - 1] * decay + shock * xi;
        path.x[t] = path.x[t - 1] + drift * path.z[t - 1] + diffusion * zeta;
    }
    return path;
}

TargetPath target_one_factor(const std::vector<double>& z, const OneFactorParams& params,
                             double gearing) {
    params.validate();
    require(std::isfinite(gearing) && gearing > 0.0, "target_one_factor: gearing must be > 0");
    const double scale = params.beta * gearing / params.sigma_x;
    TargetPath path;
    path.target.reserve(z.size());
    for (double zt : z) path.target.push_back(scale * zt);
    path.gamma0_sq.assign(z.size(), theoretical_gamma0_sq(params, gearing));
    path.sigma_x.assign(z.size(), params.sigma_x);
    return path;
}

double theoretical_gamma0_sq(const OneFactorParams& params, double gearing) {
    params.validate();
    const double s2 = params.sigma_x * params.sigma_x;
    return 2.0 * params.beta * params.beta * params.kappa * gearing * gearing / (s2 * s2);
}

double theoretical_sharpe(double beta, double horizon_days) {
    require(std::isfinite(horizon_days) && horizon_days > 0.0,
            "theoretical_sharpe: horizon must be > 0");
    return std::fabs(beta) * std::sqrt(horizon_days);
}

std::vector<double> simulate_zero_factor(const ZeroFactorParams& params, double dt,
                                         std::size_t n_steps, std::uint64_t seed) {
    params.validate();
    require(std::isfinite(dt) && dt > 0.0, "simulate_zero_factor: dt must be > 0");
    std::vector<double> x(n_steps);
    if (n_steps == 0) return x;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const double stationary_sd = params.sigma / std::sqrt(2.0 * params.b);
    const double decay = std::exp(-params.b * dt);
    const double shock = stationary_sd * std::sqrt(-std::expm1(-2.0 * params.b * dt));
    x[0] = stationary_sd * normal(rng);
    for (std::size_t t = 1; t < n_steps; ++t) x[t] = x[t - 1] * decay + shock * normal(rng);
    return x;
}

TargetPath target_zero_factor(const std::vector<double>& x, const ZeroFactorParams& params,
                              double gearing) {
    params.validate();
    require(std::isfinite(gearing) && gearing > 0.0, "target_zero_factor: gearing must be > 0");
    const double s2 = params.sigma * params.sigma;
    const double scale = -params.b * gearing / s2;
    const double target_vol_ratio = params.b * gearing / s2;  // sigma_theta / sigma_x
    TargetPath path;
    path.target.reserve(x.size());
    for (double xt : x) path.target.push_back(scale * xt);
    path.gamma0_sq.assign(x.size(), target_vol_ratio * target_vol_ratio);
    path.sigma_x.assign(x.size(), params.sigma);
    return path;
}

}  // namespace tcbuf
