#pragma once

// Brute-force value iteration for the one-factor problem with proportional
// costs. Used to check the cube-root buffer law on a desk-sized grid.
//
// Per step of length dt the Bellman operator is
//   V(z, th) = max_th' [ -eps |th' - th| + (th' mu(z) - th'^2 sigma^2 / (2G)) dt
//                        + e^(-r dt) E[V(z', th') | z] ],   mu(z) = beta sigma z.
// Iteration is relative: the value at the reference node (z ~ 0, th ~ 0) is
// subtracted after every sweep. That leaves the greedy policy unchanged and
// makes convergence depend on how fast the factor mixes instead of on r.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tcbuf/synth_models.hpp"

namespace tcbuf {

struct GridSpec {
    std::vector<double> z_grid;
    std::vector<double> theta_grid;
    double dt = 0.05;              // days
    double discount_rate = 1e-4;   // 1/day

    void validate() const;

    /// z: `z_nodes` on [-z_max, z_max]; theta: `theta_nodes` on +-`theta_span`
    /// times the frictionless rms target G |beta| / sigma_x.
    static GridSpec standard(const OneFactorParams& model, double gearing, std::size_t z_nodes = 101,
                             double z_max = 4.0, std::size_t theta_nodes = 201, double theta_span = 2.0);

    /// Both grids with a midpoint inserted between neighbours (n -> 2n - 1 nodes).
    GridSpec refined() const;
};

/// action[iz * theta_count + ith] = index of the post-trade position node.
struct Policy {
    std::size_t z_count = 0;
    std::size_t theta_count = 0;
    std::vector<std::uint32_t> action;

    std::uint32_t at(std::size_t iz, std::size_t ith) const { return action[iz * theta_count + ith]; }
};

struct DpSolution {
    std::vector<double> value;  // row-major, z by theta
    Policy policy;
    std::size_t iterations = 0;
    double residual = 0.0;
};

struct DpOptions {
    double tol = 1e-9;
    std::size_t max_iters = 200000;
    unsigned threads = 1;
};

/// Row-stochastic factor transition over one step: exact OU conditional
/// Gaussian integrated over cell boundaries (midpoints), the outermost cells
/// extending to infinity. Entries below 1e-15 of the row are dropped before
/// renormalisation.
struct TransitionMatrix {
    std::vector<std::size_t> first;          // first column of each row
    std::vector<std::vector<double>> weights;
};
TransitionMatrix ou_transition(std::span<const double> z_grid, double kappa, double dt);

/// Throws NonConvergenceError carrying the last residual if max_iters is hit.
DpSolution value_iteration(const OneFactorParams& model, double gearing, double epsilon,
                           const GridSpec& grid, const DpOptions& options = {});

struct BandProfile {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> half_width;
    double at_zero = 0.0;    // row nearest z = 0
    double z_average = 0.0;  // mean over all z rows
};

/// Hold interval per z row. Interior edges are placed halfway between the
/// last holding node and the first trading node. Throws StructuralError if a
/// row has no hold node or a split hold region.
BandProfile extract_band(const Policy& policy, const GridSpec& grid);

/// Least-squares slope of log(width) against log(epsilon).
double scaling_exponent(std::span<const double> epsilons, std::span<const double> widths);

/// Largest positive second divided difference of V along theta (0 for a concave table).
double concavity_violation(const DpSolution& solution, const GridSpec& grid);

struct OracleRow {
    double epsilon = 0.0;
    double oracle_half_width = 0.0;
    double formula_half_width = 0.0;
    double ratio = 0.0;
    /// NaN unless the refinement check was run.
    double refined_half_width = 0.0;
    double refinement_change = 0.0;
    std::size_t iterations = 0;
};

std::vector<OracleRow> oracle_table(const OneFactorParams& model, double gearing,
                                    std::span<const double> epsilons, const GridSpec& grid,
                                    const DpOptions& options, bool check_refinement);

}  // namespace tcbuf
