#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcbuf/backtest.hpp"
#include "tcbuf/momentum.hpp"
#include "tcbuf/synth_models.hpp"

namespace tcbuf {

/// Pre-stitched continuous price series. Row index is the business-day clock.
struct PriceSeries {
    std::vector<std::chrono::year_month_day> dates;
    std::vector<double> prices;

    std::size_t size() const noexcept { return prices.size(); }
};

/// Reads `date,price` CSV (ISO-8601 dates, strictly increasing). Errors are
/// ParseError with the 1-based line number of the offending row.
PriceSeries load_price_csv(const std::filesystem::path& path);
PriceSeries parse_price_csv(std::istream& in, std::string_view source = "<stream>");

enum class QuoteConvention { fraction_of_price, fraction_of_par, dollars };

std::string_view quote_convention_name(QuoteConvention c) noexcept;
/// Throws DomainError for an unknown name.
QuoteConvention parse_quote_convention(std::string_view name);

/// Cost per unit of position, in dollars, from a quoted bid-offer.
///   fraction_of_price: epsilon = 1/2 * spread / reference_price * contract_size
///   fraction_of_par:   epsilon = 1/2 * spread / 100 * contract_size  (spread in points of par)
///   dollars:           epsilon = value (already a half-spread per unit)
/// contract_size is the dollar notional of one position unit.
double cost_from_quote(QuoteConvention convention, double value, double reference_price = 1.0,
                       double contract_size = 1.0);

// ---------------------------------------------------------------------------
// Run configuration (JSON). See README for the schema.

enum class StrategyKind { one_factor, momentum };

struct MarketConfig {
    double gearing = 1e6;
    QuoteConvention cost_convention = QuoteConvention::dollars;
    double contract_size = 1.0;
    std::optional<double> reference_price;
    double annualization = 252.0;
    std::string price_csv;  // as written in the file; resolved against the config directory

    bool operator==(const MarketConfig&) const = default;
};

struct OneFactorStrategy {
    OneFactorParams params;
    std::size_t n_steps = 10000;

    bool operator==(const OneFactorStrategy&) const = default;
};

struct MomentumStrategy {
    std::vector<CrossoverSpec> crossovers = {{2, 4}, {4, 8}, {8, 16}, {16, 32}};
    std::vector<double> weights;  // empty: equal weights summing to weight_scale (or fitted)
    bool fit_weights = false;
    double ridge = 1e-6;
    double weight_scale = 0.04;
    double vol_period = 32.0;
    double vol_relative_floor = 1e-6;
    double vol_absolute_floor = 0.0;
    double gamma_period = 32.0;  // forgetting factor alpha = 1 - 1/period
    double gamma_min_mass = 10.0;
    std::size_t warmup = 100;

    bool operator==(const MomentumStrategy&) const = default;
    /// Momentum settings with weights filled (explicit or equal split of weight_scale).
    MomentumConfig to_config() const;
};

struct ExperimentConfig {
    std::vector<double> epsilons;
    std::vector<double> lambdas;
    std::vector<std::uint64_t> seeds;
    std::vector<RiskKind> risk_measures = {RiskKind::stdev, RiskKind::var, RiskKind::esf};
    double tail_probability = 0.01;
    double initial_position = 0.0;
    std::size_t warmup = 0;
    unsigned threads = 0;  // 0: hardware concurrency

    bool operator==(const ExperimentConfig&) const = default;

    static std::vector<double> default_lambdas();
    static std::vector<std::uint64_t> default_seeds(std::uint64_t first = 1, std::size_t count = 20);
};

struct OutputConfig {
    std::string csv;

    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    MarketConfig market;
    StrategyKind kind = StrategyKind::one_factor;
    OneFactorStrategy one_factor;
    MomentumStrategy momentum;
    ExperimentConfig experiment;
    OutputConfig output;
    std::filesystem::path base_dir;  // directory of the config file; not serialised

    bool operator==(const RunConfig&) const = default;

    /// price_csv resolved against base_dir.
    std::filesystem::path price_csv_path() const;
};

/// Parses and validates; missing optional keys get defaults, unknown keys are
/// rejected. Every failure is a ConfigError whose path names the offending key.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Serialises every field, so parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

}  // namespace tcbuf
