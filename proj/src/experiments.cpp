#include "tcbuf/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "tcbuf/error.hpp"
#include "tcbuf/kernels.hpp"

namespace tcbuf {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Result of one (path, epsilon, lambda) backtest.
struct Cell {
    double avg_width = 0.0;
    std::array<double, kRiskKinds> sharpe{nan, nan, nan};
    double mean_pnl = 0.0;
    double total_cost = 0.0;
};

Cell run_cell(const TargetPath& path, std::span<const double> widths, std::span<const double> prices, double epsilon,
              double lambda, const ExperimentConfig& experiment, double annualization) {
    std::vector<double> scaled(widths.begin(), widths.end());
    for (double& w : scaled) w *= lambda;
    const ExecutionResult exec = apply_band(path.target, scaled, experiment.initial_position, epsilon);
    const PnlSeries pnl = compute_pnl(exec, prices, epsilon).tail(path.warmup);

    Cell cell;
    const std::span<const double> measured_widths(scaled.data() + path.warmup, scaled.size() - path.warmup);
    cell.avg_width = kernels::mean(measured_widths);
    cell.mean_pnl = kernels::mean(pnl.net);
    cell.total_cost = kernels::sum(pnl.cost);
    for (RiskKind kind : experiment.risk_measures) {
        const auto s = sharpe(pnl, RiskMeasure{kind, experiment.tail_probability}, annualization);
        if (s) cell.sharpe[risk_index(kind)] = *s;
    }
    return cell;
}

// Runs job(i) for i in [0, n) on up to `threads` workers.
template <class Job>
void parallel_for(std::size_t n, unsigned threads, Job&& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n && !failed; i = next++) {
                    try {
                        job(i);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

// cells[seed][eps][lambda] -> curves.
std::vector<SweepCurve> assemble(const std::vector<std::vector<std::vector<Cell>>>& cells,
                                 std::span<const double> epsilons, std::span<const double> lambdas,
                                 const ExperimentConfig& experiment) {
    const std::size_t n_seeds = cells.size();
    std::vector<SweepCurve> curves;
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        SweepCurve curve;
        curve.epsilon = epsilons[e];
        for (std::size_t l = 0; l < lambdas.size(); ++l) {
            SweepPoint pt;
            pt.lambda = lambdas[l];
            pt.unit_lambda = lambdas[l] == 1.0;
            double width = 0.0;
            double pnl = 0.0;
            double cost = 0.0;
            for (std::size_t s = 0; s < n_seeds; ++s) {
                const Cell& c = cells[s][e][l];
                width += c.avg_width;
                pnl += c.mean_pnl;
                cost += c.total_cost;
            }
            const double ns = static_cast<double>(n_seeds);
            pt.avg_width = width / ns;
            pt.mean_pnl = pnl / ns;
            pt.total_cost = cost / ns;

            bool any = false;
            for (RiskKind kind : experiment.risk_measures) {
                const std::size_t k = risk_index(kind);
                pt.seed_sharpe[k].resize(n_seeds);
                std::vector<double> defined;
                for (std::size_t s = 0; s < n_seeds; ++s) {
                    const double v = cells[s][e][l].sharpe[k];
                    pt.seed_sharpe[k][s] = v;
                    if (!std::isnan(v)) defined.push_back(v);
                }
                pt.sharpe_se[k] = nan;
                if (defined.empty()) continue;
                any = true;
                const double m = std::accumulate(defined.begin(), defined.end(), 0.0) / static_cast<double>(defined.size());
                pt.sharpe[k] = m;
                if (defined.size() >= 2) {
                    double ss = 0.0;
                    for (double v : defined) ss += (v - m) * (v - m);
                    const double nd = static_cast<double>(defined.size());
                    pt.sharpe_se[k] = std::sqrt(ss / (nd - 1.0) / nd);
                }
            }
            for (std::size_t k = 0; k < kRiskKinds; ++k)
                if (pt.seed_sharpe[k].empty()) pt.sharpe_se[k] = nan;
            pt.undefined = !any;
            curve.points.push_back(std::move(pt));
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

void validate_sweep_inputs(std::span<const double> epsilons, const ExperimentConfig& experiment) {
    if (epsilons.empty()) throw DomainError("lambda sweep: no epsilon values");
    for (double e : epsilons)
        if (!(e >= 0.0 && std::isfinite(e))) throw DomainError("lambda sweep: epsilon must be >= 0");
    if (experiment.risk_measures.empty()) throw DomainError("lambda sweep: no risk measures requested");
    RiskMeasure{RiskKind::var, experiment.tail_probability}.validate();
}

std::string fmt_num(double v) { return fmt::format("{}", v); }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

const SweepPoint& SweepCurve::at(double lambda) const {
    for (const auto& p : points)
        if (p.lambda == lambda) return p;
    throw DomainError("SweepCurve: lambda " + fmt_num(lambda) + " not on curve");
}

std::vector<double> sweep_lambdas(std::span<const double> configured) {
    std::vector<double> out(configured.begin(), configured.end());
    for (double l : out)
        if (!(l >= 0.0 && std::isfinite(l))) throw DomainError("lambda grid: values must be finite and >= 0");
    out.push_back(1.0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> effective_epsilons(const RunConfig& config, std::optional<double> reference_price) {
    const double ref = config.market.reference_price.value_or(reference_price.value_or(1.0));
    std::vector<double> out;
    for (double q : config.experiment.epsilons)
        out.push_back(cost_from_quote(config.market.cost_convention, q, ref, config.market.contract_size));
    return out;
}

std::vector<SweepCurve> synthetic_sweep(const OneFactorStrategy& strategy, double gearing,
                                        std::span<const double> epsilons, const ExperimentConfig& experiment,
                                        double annualization) {
    validate_sweep_inputs(epsilons, experiment);
    if (experiment.seeds.empty()) throw DomainError("synthetic sweep: no seeds");
    if (experiment.warmup + 2 > strategy.n_steps) throw DomainError("synthetic sweep: warmup leaves no data");
    const std::vector<double> lambdas = sweep_lambdas(experiment.lambdas);
    const std::size_t n_seeds = experiment.seeds.size();

    std::vector<std::vector<std::vector<Cell>>> cells(
        n_seeds, std::vector<std::vector<Cell>>(epsilons.size(), std::vector<Cell>(lambdas.size())));

    parallel_for(n_seeds, experiment.threads, [&](std::size_t s) {
        const OneFactorPath sim = simulate_one_factor(strategy.params, strategy.n_steps, experiment.seeds[s]);
        TargetPath path = target_one_factor(sim.z, strategy.params, gearing);
        path.warmup = experiment.warmup;
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            const std::vector<double> widths = buffer_widths(path, CostParams{epsilons[e], gearing});
            for (std::size_t l = 0; l < lambdas.size(); ++l)
                cells[s][e][l] = run_cell(path, widths, sim.x, epsilons[e], lambdas[l], experiment, annualization);
        }
    });
    return assemble(cells, epsilons, lambdas, experiment);
}

std::vector<SweepCurve> momentum_sweep(std::span<const double> prices, const MomentumConfig& momentum, double gearing,
                                       std::span<const double> epsilons, const ExperimentConfig& experiment,
                                       double annualization) {
    validate_sweep_inputs(epsilons, experiment);
    const std::vector<double> lambdas = sweep_lambdas(experiment.lambdas);
    MomentumPipeline pipeline = run_momentum(prices, momentum, gearing);
    TargetPath& path = pipeline.targets;
    path.warmup = std::max(path.warmup, experiment.warmup);
    if (path.warmup + 2 > path.size()) throw DomainError("momentum sweep: warmup leaves no data");

    std::vector<std::vector<std::vector<Cell>>> cells(
        1, std::vector<std::vector<Cell>>(epsilons.size(), std::vector<Cell>(lambdas.size())));
    const std::size_t jobs = epsilons.size() * lambdas.size();
    std::vector<std::vector<double>> widths(epsilons.size());
    for (std::size_t e = 0; e < epsilons.size(); ++e) widths[e] = buffer_widths(path, CostParams{epsilons[e], gearing});
    parallel_for(jobs, experiment.threads, [&](std::size_t job) {
        const std::size_t e = job / lambdas.size();
        const std::size_t l = job % lambdas.size();
        cells[0][e][l] = run_cell(path, widths[e], prices, epsilons[e], lambdas[l], experiment, annualization);
    });
    return assemble(cells, epsilons, lambdas, experiment);
}

std::vector<SweepCurve> lambda_sweep(const RunConfig& config) {
    if (config.kind == StrategyKind::one_factor) {
        return synthetic_sweep(config.one_factor, config.market.gearing, effective_epsilons(config),
                               config.experiment, config.market.annualization);
    }
    if (config.market.price_csv.empty()) throw ConfigError("market.price_csv", "required for the momentum strategy");
    const PriceSeries series = load_price_csv(config.price_csv_path());
    const double mean_price = kernels::mean(series.prices);
    MomentumConfig momentum = config.momentum.to_config();
    if (config.momentum.fit_weights) {
        MomentumConfig unit = momentum;
        std::fill(unit.weights.begin(), unit.weights.end(), 1.0);
        const MomentumPipeline pipeline = run_momentum(series.prices, unit, config.market.gearing);
        const RegressionData data = regression_data(pipeline, std::max(unit.warmup, config.experiment.warmup));
        momentum.weights = fit_weights(data.features, data.forward_returns, config.momentum.ridge).weights;
    }
    return momentum_sweep(series.prices, momentum, config.market.gearing, effective_epsilons(config, mean_price),
                          config.experiment, config.market.annualization);
}

std::string format_sweep_csv(const std::vector<SweepCurve>& curves) {
    std::string out = "epsilon,lambda,avg_width,sharpe_stdev,sharpe_var,sharpe_esf,mean_pnl,total_cost,undefined_flag\n";
    for (const auto& curve : curves) {
        for (const auto& p : curve.points) {
            out += fmt_num(curve.epsilon) + ',' + fmt_num(p.lambda) + ',' + fmt_num(p.avg_width);
            for (RiskKind k : {RiskKind::stdev, RiskKind::var, RiskKind::esf}) {
                out += ',';
                if (!p.undefined && p.sharpe[risk_index(k)]) out += fmt_num(*p.sharpe[risk_index(k)]);
            }
            out += ',' + fmt_num(p.mean_pnl) + ',' + fmt_num(p.total_cost) + ',' + (p.undefined ? "1" : "0") + '\n';
        }
    }
    return out;
}

void emit_csv(const std::vector<SweepCurve>& curves, const std::filesystem::path& path) {
    write_file(path, format_sweep_csv(curves));
}

std::string format_oracle_csv(const std::vector<OracleRow>& rows) {
    std::string out = "epsilon,oracle_half_width,formula_half_width,ratio,refined_half_width,refinement_change\n";
    for (const auto& r : rows) {
        out += fmt_num(r.epsilon) + ',' + fmt_num(r.oracle_half_width) + ',' + fmt_num(r.formula_half_width) + ',' +
               fmt_num(r.ratio) + ',';
        if (!std::isnan(r.refined_half_width)) out += fmt_num(r.refined_half_width);
        out += ',';
        if (!std::isnan(r.refinement_change)) out += fmt_num(r.refinement_change);
        out += '\n';
    }
    return out;
}

void emit_oracle_csv(const std::vector<OracleRow>& rows, const std::filesystem::path& path) {
    write_file(path, format_oracle_csv(rows));
}

}  // namespace tcbuf
