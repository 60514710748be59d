#pragma once

// Optimal no-trade buffer and the execution policy that applies it.
//
// Units: positions are in whatever unit the asset price X is quoted per
// (contracts, $M notional, ...); epsilon is dollars lost per unit traded;
// gearing G is dollars; gamma0_sq is the squared ratio of target-position
// volatility to asset dollar volatility, in units^2 per dollar^2.

#include <cstddef>
#include <span>
#include <vector>

namespace tcbuf {

struct BufferParams {
    double epsilon = 0.0;
    double gearing = 1.0;
    double gamma0_sq = 0.0;

    /// Throws DomainError unless epsilon >= 0, gearing > 0, gamma0_sq >= 0 (all finite).
    void validate() const;
};

/// Transaction-cost inputs shared by every step of a path.
struct CostParams {
    double epsilon = 0.0;
    double gearing = 1.0;

    void validate() const;
};

/// Target positions with the per-step inputs needed to size the buffer.
///
/// `gamma0_sq[t]` may be NaN while an estimator is still warming up; the
/// buffer is zero at such steps. Steps before `warmup` are executed but
/// excluded from measurement.
struct TargetPath {
    std::vector<double> target;
    std::vector<double> gamma0_sq;
    std::vector<double> sigma_x;
    std::size_t warmup = 0;

    std::size_t size() const noexcept { return target.size(); }
    /// Throws DomainError on mismatched lengths or warmup past the end.
    void validate() const;
};

struct ExecutionResult {
    std::vector<double> positions;
    std::vector<double> trades;
    std::vector<double> costs;
};

/// delta_theta = (3 epsilon G gamma0_sq / 2)^(1/3).
double half_width(const BufferParams& params);

/// Per-step half-widths delta_theta_t for a path (zero where gamma0_sq is NaN).
std::vector<double> buffer_widths(const TargetPath& targets, const CostParams& costs);

/// Moves a position into the closed band [target - h, target + h] at each step,
/// trading to the nearest edge only when it lies outside. `half_widths` are the
/// already-scaled band half-widths.
ExecutionResult apply_band(std::span<const double> target, std::span<const double> half_widths,
                           double initial_position, double epsilon);

/// No-trade-zone execution with band half-width lambda * delta_theta_t.
/// lambda = 0 tracks the target exactly.
ExecutionResult apply_buffer(const TargetPath& targets, const CostParams& costs, double lambda,
                             double initial_position = 0.0);

/// Mean of lambda * delta_theta_t over the measured steps (t >= warmup).
double time_average_width(const TargetPath& targets, const CostParams& costs, double lambda);

}  // namespace tcbuf
