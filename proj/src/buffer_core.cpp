#include "tcbuf/buffer_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcbuf/error.hpp"
#include "tcbuf/kernels.hpp"

namespace tcbuf {
namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

double cube_root_width(double epsilon, double gearing, double gamma0_sq) {
    return std::cbrt(1.5 * epsilon * gearing * gamma0_sq);
}

}  // namespace

void BufferParams::validate() const {
    require(std::isfinite(epsilon) && epsilon >= 0.0, "BufferParams: epsilon must be finite and >= 0");
    require(std::isfinite(gearing) && gearing > 0.0, "BufferParams: gearing must be finite and > 0");
    require(std::isfinite(gamma0_sq) && gamma0_sq >= 0.0,
            "BufferParams: gamma0_sq must be finite and >= 0");
}

void CostParams::validate() const {
    require(std::isfinite(epsilon) && epsilon >= 0.0, "CostParams: epsilon must be finite and >= 0");
    require(std::isfinite(gearing) && gearing > 0.0, "CostParams: gearing must be finite and > 0");
}

void TargetPath::validate() const {
    require(gamma0_sq.size() == target.size(), "TargetPath: gamma0_sq length differs from target");
    require(sigma_x.empty() || sigma_x.size() == target.size(),
            "TargetPath: sigma_x length differs from target");
    require(warmup <= target.size(), "TargetPath: warmup exceeds path length");
}

double half_width(const BufferParams& params) {
    params.validate();
    return cube_root_width(params.epsilon, params.gearing, params.gamma0_sq);
}

std::vector<double> buffer_widths(const TargetPath& targets, const CostParams& costs) {
    targets.validate();
    costs.validate();
    std::vector<double> widths(targets.size(), 0.0);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double g = targets.gamma0_sq[t];
        if (std::isnan(g)) continue;
        require(g >= 0.0 && std::isfinite(g), "buffer_widths: gamma0_sq must be >= 0");
        widths[t] = cube_root_width(costs.epsilon, costs.gearing, g);
    }
    return widths;
}

ExecutionResult apply_band(std::span<const double> target, std::span<const double> half_widths,
                           double initial_position, double epsilon) {
    require(!target.empty(), "apply_band: empty target path");
    require(target.size() == half_widths.size(), "apply_band: length mismatch");
    const std::size_t n = target.size();
    ExecutionResult out;
    out.positions.resize(n);
    out.trades.resize(n);
    out.costs.resize(n);

    double position = initial_position;
    for (std::size_t t = 0; t < n; ++t) {
        const double lower = target[t] - half_widths[t];
        const double upper = target[t] + half_widths[t];
        // Closed band: a position sitting exactly on an edge stays put.
        const double next = std::clamp(position, lower, upper);
        out.trades[t] = next - position;
        out.costs[t] = epsilon * std::fabs(out.trades[t]);
        out.positions[t] = next;
        position = next;
    }
    return out;
}

ExecutionResult apply_buffer(const TargetPath& targets, const CostParams& costs, double lambda,
                             double initial_position) {
    require(std::isfinite(lambda) && lambda >= 0.0, "apply_buffer: lambda must be >= 0");
    require(std::isfinite(initial_position), "apply_buffer: initial position must be finite");
    require(!targets.target.empty(), "apply_buffer: empty target path");
    std::vector<double> widths = buffer_widths(targets, costs);
    for (double& w : widths) w *= lambda;
    return apply_band(targets.target, widths, initial_position, costs.epsilon);
}

double time_average_width(const TargetPath& targets, const CostParams& costs, double lambda) {
    require(std::isfinite(lambda) && lambda >= 0.0, "time_average_width: lambda must be >= 0");
    require(targets.size() > targets.warmup, "time_average_width: no measured steps");
    const std::vector<double> widths = buffer_widths(targets, costs);
    const std::span<const double> measured(widths.data() + targets.warmup,
                                           widths.size() - targets.warmup);
    return lambda * kernels::mean(measured);
}

}  // namespace tcbuf
