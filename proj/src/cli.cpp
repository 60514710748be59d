#include "tcbuf/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <optional>

#include "tcbuf/buffer_core.hpp"
#include "tcbuf/data_io.hpp"
#include "tcbuf/dp_oracle.hpp"
#include "tcbuf/error.hpp"
#include "tcbuf/experiments.hpp"
#include "tcbuf/kernels.hpp"

namespace tcbuf {
namespace {

struct CalcArgs {
    double epsilon = 0.0;
    double gearing = 0.0;
    std::optional<double> gamma0_sq;
    std::optional<double> target_vol;
    std::optional<double> asset_vol;
};

struct SweepArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> prices;
    std::optional<unsigned> threads;
    std::string out;
};

struct OracleArgs {
    std::string config;
    std::vector<double> epsilons = {0.0125, 0.025, 0.05, 0.1};
    std::size_t z_nodes = 101;
    std::size_t theta_nodes = 201;
    double z_max = 4.0;
    double theta_span = 2.0;
    double dt = 0.05;
    double tol = 1e-9;
    bool refine = false;
    unsigned threads = 1;
    std::string out;
};

int run_calc(const CalcArgs& a, std::ostream& out) {
    double g2 = 0.0;
    if (a.gamma0_sq) {
        if (a.target_vol || a.asset_vol) throw DomainError("calc: give --gamma0-sq or --target-vol/--asset-vol, not both");
        g2 = *a.gamma0_sq;
    } else {
        if (!a.target_vol || !a.asset_vol) throw DomainError("calc: need --gamma0-sq or both --target-vol and --asset-vol");
        if (!(*a.asset_vol > 0.0)) throw DomainError("calc: --asset-vol must be > 0");
        g2 = (*a.target_vol / *a.asset_vol) * (*a.target_vol / *a.asset_vol);
    }
    const double w = half_width(BufferParams{a.epsilon, a.gearing, g2});
    out << fmt::format("gamma0_sq   {}\n", g2);
    out << fmt::format("half_width  {:.6f}\n", w);
    out << fmt::format("rounded     {}\n", std::llround(w));
    return 0;
}

void write_output(const std::string& csv, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << csv;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << csv;
    if (!f.flush()) throw std::runtime_error("write failed for " + path);
}

// Built-in synthetic setup used when `synth` runs without a config.
RunConfig default_synthetic_config() {
    RunConfig c;
    c.kind = StrategyKind::one_factor;
    c.experiment.epsilons = {0.02, 0.05, 0.1, 0.2, 0.5};
    c.experiment.lambdas = ExperimentConfig::default_lambdas();
    c.experiment.seeds = ExperimentConfig::default_seeds();
    return c;
}

void apply_sweep_overrides(RunConfig& c, const SweepArgs& a) {
    if (a.seed) c.experiment.seeds = ExperimentConfig::default_seeds(*a.seed, c.experiment.seeds.size());
    if (a.threads) c.experiment.threads = *a.threads;
}

std::string output_path(const RunConfig& c, const SweepArgs& a) {
    if (!a.out.empty()) return a.out;
    if (c.output.csv.empty()) return {};
    return (c.base_dir / c.output.csv).string();
}

int run_synth(const SweepArgs& a, std::ostream& out) {
    RunConfig c = a.config.empty() ? default_synthetic_config() : load_config(a.config);
    if (c.kind != StrategyKind::one_factor) throw DomainError("synth: config strategy.kind must be one_factor");
    apply_sweep_overrides(c, a);
    write_output(format_sweep_csv(lambda_sweep(c)), output_path(c, a), out);
    return 0;
}

int run_momentum_cmd(const SweepArgs& a, std::ostream& out) {
    RunConfig c = load_config(a.config);
    if (c.kind != StrategyKind::momentum) throw DomainError("momentum: config strategy.kind must be momentum");
    if (a.prices) c.market.price_csv = std::filesystem::absolute(*a.prices).string();
    apply_sweep_overrides(c, a);
    write_output(format_sweep_csv(lambda_sweep(c)), output_path(c, a), out);
    return 0;
}

int run_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err) {
    OneFactorParams model;
    double gearing = MarketConfig{}.gearing;
    if (!a.config.empty()) {
        const RunConfig c = load_config(a.config);
        model = c.one_factor.params;
        gearing = c.market.gearing;
    }
    GridSpec grid = GridSpec::standard(model, gearing, a.z_nodes, a.z_max, a.theta_nodes, a.theta_span);
    grid.dt = a.dt;
    const DpOptions options{a.tol, DpOptions{}.max_iters, a.threads};
    const auto rows = oracle_table(model, gearing, a.epsilons, grid, options, a.refine);
    if (rows.size() >= 3) {
        std::vector<double> eps;
        std::vector<double> widths;
        for (const auto& r : rows) {
            eps.push_back(r.epsilon);
            widths.push_back(r.oracle_half_width);
        }
        err << fmt::format("scaling exponent {:.4f}\n", scaling_exponent(eps, widths));
    }
    write_output(format_oracle_csv(rows), a.out, out);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal no-trade buffers under proportional costs"};
    app.name("tcbuf");
    app.require_subcommand(1);

    CalcArgs calc;
    auto* c = app.add_subcommand("calc", "Buffer half-width from explicit inputs");
    c->add_option("--epsilon", calc.epsilon, "Cost per unit traded ($)")->required()->check(CLI::NonNegativeNumber);
    c->add_option("--gearing", calc.gearing, "Gearing G ($)")->required()->check(CLI::NonNegativeNumber);
    c->add_option("--gamma0-sq", calc.gamma0_sq, "Squared ratio of target-position vol to asset vol");
    c->add_option("--target-vol", calc.target_vol, "Typical daily change of the target position (units)");
    c->add_option("--asset-vol", calc.asset_vol, "Daily $ vol of one unit of the asset");

    SweepArgs synth;
    auto* s = app.add_subcommand("synth", "Lambda sweep on the synthetic one-factor model");
    s->add_option("--config", synth.config, "JSON run config (default: built-in synthetic setup)");
    s->add_option("--seed", synth.seed, "First seed; seeds run consecutively from here");
    s->add_option("--threads", synth.threads, "Worker threads (0: all cores)");
    s->add_option("--out", synth.out, "Output CSV (default: config output.csv, else stdout)");

    SweepArgs mom;
    auto* m = app.add_subcommand("momentum", "Lambda sweep of the crossover momentum strategy on a price CSV");
    m->add_option("--config", mom.config, "JSON run config")->required();
    m->add_option("--prices", mom.prices, "Price CSV overriding market.price_csv");
    m->add_option("--seed", mom.seed, "Accepted for symmetry; the momentum run is deterministic");
    m->add_option("--threads", mom.threads, "Worker threads (0: all cores)");
    m->add_option("--out", mom.out, "Output CSV (default: config output.csv, else stdout)");

    OracleArgs oracle;
    auto* o = app.add_subcommand("oracle", "Dynamic-programming check of the buffer formula");
    o->add_option("--config", oracle.config, "JSON run config supplying model parameters and gearing");
    o->add_option("--epsilons", oracle.epsilons, "Costs to solve for ($ per unit)")->delimiter(',');
    o->add_option("--z-nodes", oracle.z_nodes, "Factor grid nodes")->check(CLI::PositiveNumber);
    o->add_option("--theta-nodes", oracle.theta_nodes, "Position grid nodes")->check(CLI::PositiveNumber);
    o->add_option("--z-max", oracle.z_max, "Factor grid half-range");
    o->add_option("--theta-span", oracle.theta_span, "Position grid half-range in rms targets");
    o->add_option("--dt", oracle.dt, "Time step (days)");
    o->add_option("--tol", oracle.tol, "Relative convergence tolerance");
    o->add_flag("--refine", oracle.refine, "Also solve on a 2x refined grid");
    o->add_option("--threads", oracle.threads, "Worker threads for each sweep");
    o->add_option("--out", oracle.out, "Output CSV (default: stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
    }

    try {
        if (c->parsed()) return run_calc(calc, out);
        if (s->parsed()) return run_synth(synth, out);
        if (m->parsed()) return run_momentum_cmd(mom, out);
        if (o->parsed()) return run_oracle(oracle, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace tcbuf
