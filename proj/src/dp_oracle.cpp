#include "tcbuf/dp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "tcbuf/buffer_core.hpp"
#include "tcbuf/error.hpp"
#include "tcbuf/kernels.hpp"
#include "tcbuf/normal.hpp"

namespace tcbuf {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

std::size_t nearest(const std::vector<double>& grid, double x) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) return 0;
    if (it == grid.end()) return grid.size() - 1;
    const auto i = static_cast<std::size_t>(it - grid.begin());
    return (x - grid[i - 1] <= grid[i] - x) ? i - 1 : i;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (n % 2 == 1 && lo == -hi) v[n / 2] = 0.0;
    return v;
}

std::vector<double> with_midpoints(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(2 * v.size() - 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out.push_back(0.5 * (v[i - 1] + v[i]));
        out.push_back(v[i]);
    }
    return out;
}

// One row of the Bellman operator: L1 max-convolution of `w` (the
// continuation value per post-trade node) with cost eps * |th' - th|, done
// as a forward and a backward pass. Ties go to holding.
void max_convolve_l1(std::span<const double> w, std::span<const double> gap_cost, std::span<double> fwd,
                     std::span<std::uint32_t> fwd_arg, std::span<double> out,
                     std::span<std::uint32_t> arg) {
    const std::size_t n = w.size();
    fwd[0] = w[0];
    fwd_arg[0] = 0;
    for (std::size_t j = 1; j < n; ++j) {
        const double carried = fwd[j - 1] - gap_cost[j];
        if (w[j] >= carried) {
            fwd[j] = w[j];
            fwd_arg[j] = static_cast<std::uint32_t>(j);
        } else {
            fwd[j] = carried;
            fwd_arg[j] = fwd_arg[j - 1];
        }
    }
    double bwd = w[n - 1];
    std::uint32_t bwd_arg = static_cast<std::uint32_t>(n - 1);
    for (std::size_t jj = n; jj-- > 0;) {
        if (jj + 1 < n) {
            const double carried = bwd - gap_cost[jj + 1];
            if (w[jj] >= carried) {
                bwd = w[jj];
                bwd_arg = static_cast<std::uint32_t>(jj);
            } else {
                bwd = carried;
            }
        }
        if (fwd[jj] >= bwd) {
            out[jj] = fwd[jj];
            arg[jj] = fwd_arg[jj];
        } else {
            out[jj] = bwd;
            arg[jj] = bwd_arg;
        }
    }
}

}  // namespace

void GridSpec::validate() const {
    require(z_grid.size() >= 3, "GridSpec: z grid needs at least 3 nodes");
    require(theta_grid.size() >= 3, "GridSpec: theta grid needs at least 3 nodes");
    require(theta_grid.size() < std::numeric_limits<std::uint32_t>::max(), "GridSpec: theta grid too large");
    require(strictly_increasing(z_grid), "GridSpec: z grid must be strictly increasing");
    require(strictly_increasing(theta_grid), "GridSpec: theta grid must be strictly increasing");
    require(std::isfinite(dt) && dt > 0.0, "GridSpec: dt must be > 0");
    require(std::isfinite(discount_rate) && discount_rate > 0.0, "GridSpec: discount rate must be > 0");
}

GridSpec GridSpec::standard(const OneFactorParams& model, double gearing, std::size_t z_nodes, double z_max,
                            std::size_t theta_nodes, double theta_span) {
    model.validate();
    require(gearing > 0.0, "GridSpec::standard: gearing must be > 0");
    require(z_nodes >= 3 && theta_nodes >= 3, "GridSpec::standard: need at least 3 nodes per axis");
    require(z_max > 0.0 && theta_span > 0.0, "GridSpec::standard: ranges must be positive");
    const double rms = gearing * std::fabs(model.beta) / model.sigma_x;
    require(rms > 0.0, "GridSpec::standard: beta must be non-zero to size the theta grid");
    GridSpec g;
    g.z_grid = linspace(-z_max, z_max, z_nodes);
    g.theta_grid = linspace(-theta_span * rms, theta_span * rms, theta_nodes);
    return g;
}

GridSpec GridSpec::refined() const {
    GridSpec g = *this;
    g.z_grid = with_midpoints(z_grid);
    g.theta_grid = with_midpoints(theta_grid);
    return g;
}

TransitionMatrix ou_transition(std::span<const double> z_grid, double kappa, double dt) {
    require(kappa > 0.0 && dt > 0.0, "ou_transition: kappa and dt must be > 0");
    const std::size_t n = z_grid.size();
    const double decay = std::exp(-kappa * dt);
    const double sd = std::sqrt(-std::expm1(-2.0 * kappa * dt));

    std::vector<double> edges(n + 1);
    edges[0] = -std::numeric_limits<double>::infinity();
    edges[n] = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < n; ++k) edges[k] = 0.5 * (z_grid[k - 1] + z_grid[k]);

    TransitionMatrix P;
    P.first.resize(n);
    P.weights.resize(n);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mean = decay * z_grid[i];
        for (std::size_t k = 0; k < n; ++k) {
            // Difference of upper tails is accurate on the right, of cdfs on the left.
            const double a = (edges[k] - mean) / sd;
            const double b = (edges[k + 1] - mean) / sd;
            row[k] = (a > 0.0) ? normal::cdf(-a) - normal::cdf(-b) : normal::cdf(b) - normal::cdf(a);
        }
        const double peak = *std::max_element(row.begin(), row.end());
        std::size_t lo = 0;
        std::size_t hi = n;
        while (lo < n && row[lo] < 1e-15 * peak) ++lo;
        while (hi > lo && row[hi - 1] < 1e-15 * peak) --hi;
        double total = 0.0;
        for (std::size_t k = lo; k < hi; ++k) total += row[k];
        P.first[i] = lo;
        P.weights[i].assign(row.begin() + static_cast<std::ptrdiff_t>(lo), row.begin() + static_cast<std::ptrdiff_t>(hi));
        for (double& w : P.weights[i]) w /= total;
    }
    return P;
}

DpSolution value_iteration(const OneFactorParams& model, double gearing, double epsilon, const GridSpec& grid,
                           const DpOptions& options) {
    model.validate();
    grid.validate();
    require(std::isfinite(gearing) && gearing > 0.0, "value_iteration: gearing must be > 0");
    require(std::isfinite(epsilon) && epsilon >= 0.0, "value_iteration: epsilon must be >= 0");
    require(options.tol > 0.0, "value_iteration: tol must be > 0");
    require(options.max_iters > 0, "value_iteration: max_iters must be > 0");

    const std::size_t nz = grid.z_grid.size();
    const std::size_t nt = grid.theta_grid.size();
    const double discount = std::exp(-grid.discount_rate * grid.dt);
    const TransitionMatrix P = ou_transition(grid.z_grid, model.kappa, grid.dt);

    std::vector<double> reward(nz * nt);
    const double risk_coeff = model.sigma_x * model.sigma_x / (2.0 * gearing);
    for (std::size_t i = 0; i < nz; ++i) {
        const double mu = model.beta * model.sigma_x * grid.z_grid[i];
        for (std::size_t j = 0; j < nt; ++j) {
            const double th = grid.theta_grid[j];
            reward[i * nt + j] = (th * mu - th * th * risk_coeff) * grid.dt;
        }
    }
    std::vector<double> gap_cost(nt, 0.0);
    for (std::size_t j = 1; j < nt; ++j) gap_cost[j] = epsilon * (grid.theta_grid[j] - grid.theta_grid[j - 1]);

    const std::size_t ref = nearest(grid.z_grid, 0.0) * nt + nearest(grid.theta_grid, 0.0);

    DpSolution sol;
    sol.value.assign(nz * nt, 0.0);
    sol.policy.z_count = nz;
    sol.policy.theta_count = nt;
    sol.policy.action.assign(nz * nt, 0);
    std::vector<double> next(nz * nt);

    const kernels::KernelTable& k = kernels::active();
    auto sweep_rows = [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<double> w(nt);
        std::vector<double> fwd(nt);
        std::vector<std::uint32_t> fwd_arg(nt);
        for (std::size_t i = row_begin; i < row_end; ++i) {
            std::copy_n(reward.begin() + static_cast<std::ptrdiff_t>(i * nt), nt, w.begin());
            const auto& row = P.weights[i];
            for (std::size_t c = 0; c < row.size(); ++c)
                k.axpy(discount * row[c], sol.value.data() + (P.first[i] + c) * nt, w.data(), nt);
            max_convolve_l1(w, gap_cost, fwd, fwd_arg, std::span<double>(next).subspan(i * nt, nt),
                            std::span<std::uint32_t>(sol.policy.action).subspan(i * nt, nt));
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(nz)));
    for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
        if (threads == 1) {
            sweep_rows(0, nz);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back(sweep_rows, nz * t / threads, nz * (t + 1) / threads);
        }
        const double shift = next[ref];
        for (double& v : next) v -= shift;
        sol.residual = k.max_abs_diff(next.data(), sol.value.data(), next.size());
        sol.value.swap(next);
        sol.iterations = iter;
        if (sol.residual < options.tol * (1.0 + k.max_abs(sol.value.data(), sol.value.size()))) return sol;
    }
    throw NonConvergenceError("value_iteration: no convergence after " + std::to_string(options.max_iters) +
                                  " sweeps (residual " + std::to_string(sol.residual) + ")",
                              sol.residual, sol.iterations);
}

BandProfile extract_band(const Policy& policy, const GridSpec& grid) {
    require(policy.z_count == grid.z_grid.size() && policy.theta_count == grid.theta_grid.size(),
            "extract_band: policy does not match grid");
    const std::size_t nz = policy.z_count;
    const std::size_t nt = policy.theta_count;
    const auto& th = grid.theta_grid;
    BandProfile band;
    band.lower.resize(nz);
    band.upper.resize(nz);
    band.half_width.resize(nz);
    for (std::size_t i = 0; i < nz; ++i) {
        std::size_t lo = nt;
        std::size_t hi = 0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < nt; ++j) {
            if (policy.at(i, j) == j) {
                lo = std::min(lo, j);
                hi = std::max(hi, j);
                ++count;
            }
        }
        if (count == 0)
            throw StructuralError("extract_band: empty hold region at z = " + std::to_string(grid.z_grid[i]));
        if (count != hi - lo + 1)
            throw StructuralError("extract_band: hold region split at z = " + std::to_string(grid.z_grid[i]) +
                                  "; grid too coarse");
        band.lower[i] = lo > 0 ? 0.5 * (th[lo - 1] + th[lo]) : th[lo];
        band.upper[i] = hi + 1 < nt ? 0.5 * (th[hi] + th[hi + 1]) : th[hi];
        band.half_width[i] = 0.5 * (band.upper[i] - band.lower[i]);
    }
    band.at_zero = band.half_width[nearest(grid.z_grid, 0.0)];
    band.z_average = kernels::mean(band.half_width);
    return band;
}

double scaling_exponent(std::span<const double> epsilons, std::span<const double> widths) {
    require(epsilons.size() == widths.size(), "scaling_exponent: length mismatch");
    require(epsilons.size() >= 3, "scaling_exponent: need at least 3 points");
    const std::size_t n = epsilons.size();
    std::vector<double> lx(n);
    std::vector<double> ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        require(epsilons[i] > 0.0 && widths[i] > 0.0 && std::isfinite(epsilons[i]) && std::isfinite(widths[i]),
                "scaling_exponent: inputs must be positive");
        lx[i] = std::log(epsilons[i]);
        ly[i] = std::log(widths[i]);
    }
    const double mx = kernels::mean(lx);
    const double my = kernels::mean(ly);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    require(sxx > 1e-24, "scaling_exponent: epsilons must not all coincide");
    return sxy / sxx;
}

double concavity_violation(const DpSolution& solution, const GridSpec& grid) {
    const std::size_t nz = grid.z_grid.size();
    const std::size_t nt = grid.theta_grid.size();
    require(solution.value.size() == nz * nt, "concavity_violation: value table does not match grid");
    const auto& th = grid.theta_grid;
    double worst = 0.0;
    for (std::size_t i = 0; i < nz; ++i) {
        const double* v = solution.value.data() + i * nt;
        for (std::size_t j = 1; j + 1 < nt; ++j) {
            const double left = (v[j] - v[j - 1]) / (th[j] - th[j - 1]);
            const double right = (v[j + 1] - v[j]) / (th[j + 1] - th[j]);
            worst = std::max(worst, (right - left) / (0.5 * (th[j + 1] - th[j - 1])));
        }
    }
    return worst;
}

std::vector<OracleRow> oracle_table(const OneFactorParams& model, double gearing, std::span<const double> epsilons,
                                    const GridSpec& grid, const DpOptions& options, bool check_refinement) {
    std::vector<OracleRow> rows;
    const double g2 = theoretical_gamma0_sq(model, gearing);
    const GridSpec fine = check_refinement ? grid.refined() : grid;
    for (double eps : epsilons) {
        OracleRow row;
        row.epsilon = eps;
        const DpSolution sol = value_iteration(model, gearing, eps, grid, options);
        row.iterations = sol.iterations;
        row.oracle_half_width = extract_band(sol.policy, grid).at_zero;
        row.formula_half_width = half_width(BufferParams{eps, gearing, g2});
        row.ratio = row.oracle_half_width / row.formula_half_width;
        row.refined_half_width = nan;
        row.refinement_change = nan;
        if (check_refinement) {
            const DpSolution fine_sol = value_iteration(model, gearing, eps, fine, options);
            row.refined_half_width = extract_band(fine_sol.policy, fine).at_zero;
            row.refinement_change = std::fabs(row.refined_half_width - row.oracle_half_width) / row.oracle_half_width;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tcbuf
