#pragma once

// Synthetic markets with known frictionless optimum.
//
// One-factor linear model, time in business days:
//   dX = beta sigma_x Z dt + sigma_x dW0
//   dZ = -kappa Z dt + sqrt(2 kappa) dW1,   corr(dW0, dW1) = rho01
// Zero-factor model: X itself is an OU process, dX = -b X dt + sigma dW.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tcbuf/buffer_core.hpp"

namespace tcbuf {

struct OneFactorParams {
    double kappa = 0.02;    // 1/day
    double beta = 0.04;     // 1/sqrt(day)
    double sigma_x = 0.5;   // $/sqrt(day)
    double rho01 = 0.0;
    double dt = 1.0;        // days

    void validate() const;
    bool operator==(const OneFactorParams&) const = default;
};

struct ZeroFactorParams {
    double b = 0.05;       // 1/day
    double sigma = 1.0;    // $/sqrt(day)

    void validate() const;
};

struct OneFactorPath {
    std::vector<double> x;  // asset price, dollars, x[0] = 0
    std::vector<double> z;  // standardised factor, z[0] drawn from N(0, 1)
};

/// Exact OU update for Z; the X increment over (t, t+dt] uses Z_t.
/// A given (params, n_steps, seed) always yields the same path.
OneFactorPath simulate_one_factor(const OneFactorParams& params, std::size_t n_steps,
                                  std::uint64_t seed);

/// target = beta Z G / sigma_x, with the closed-form gamma0_sq attached at every step.
TargetPath target_one_factor(const std::vector<double>& z, const OneFactorParams& params,
                             double gearing);

/// 2 beta^2 kappa G^2 / sigma_x^4
double theoretical_gamma0_sq(const OneFactorParams& params, double gearing);

/// Frictionless Sharpe ratio over a horizon of `horizon_days`: |beta| sqrt(T).
double theoretical_sharpe(double beta, double horizon_days);

/// Exact-discretised OU path for the zero-factor model, x[0] drawn from the stationary law.
std::vector<double> simulate_zero_factor(const ZeroFactorParams& params, double dt,
                                         std::size_t n_steps, std::uint64_t seed);

/// target = -b X G / sigma^2. The target volatility is b G / sigma, so the
/// attached gamma0_sq is b^2 G^2 / sigma^4.
TargetPath target_zero_factor(const std::vector<double>& x, const ZeroFactorParams& params,
                              double gearing);

}  // namespace tcbuf
