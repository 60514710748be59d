#include "tcbuf/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tcbuf/error.hpp"

namespace tcbuf {

// ---------------------------------------------------------------------------
// Price CSV

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::optional<std::chrono::year_month_day> parse_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) || !parse_int(s.substr(8, 2), d))
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

[[noreturn]] void csv_fail(std::string_view source, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << source << ":" << line << ": " << what;
    throw ParseError(os.str(), line);
}

}  // namespace

PriceSeries parse_price_csv(std::istream& in, std::string_view source) {
    PriceSeries series;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            std::string lowered(line);
            std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            lowered.erase(std::remove(lowered.begin(), lowered.end(), ' '), lowered.end());
            if (lowered != "date,price") csv_fail(source, line_no, "expected header 'date,price'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            csv_fail(source, line_no, "expected exactly two fields");
        const auto date = parse_iso_date(trim(line.substr(0, comma)));
        if (!date) csv_fail(source, line_no, "malformed date (want YYYY-MM-DD)");
        const auto price = parse_double(trim(line.substr(comma + 1)));
        if (!price) csv_fail(source, line_no, "malformed price");
        if (!std::isfinite(*price)) csv_fail(source, line_no, "non-finite price");
        if (!series.dates.empty()) {
            if (*date == series.dates.back()) csv_fail(source, line_no, "duplicate date");
            if (*date < series.dates.back()) csv_fail(source, line_no, "dates not increasing");
        }
        series.dates.push_back(*date);
        series.prices.push_back(*price);
    }
    if (!header_seen) throw ParseError(std::string(source) + ": no data rows (empty file)");
    if (series.prices.empty()) throw ParseError(std::string(source) + ": no data rows");
    return series;
}

PriceSeries load_price_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse_price_csv(in, path.string());
}

// ---------------------------------------------------------------------------
// Cost conventions

std::string_view quote_convention_name(QuoteConvention c) noexcept {
    switch (c) {
        case QuoteConvention::fraction_of_price: return "fraction-of-price";
        case QuoteConvention::fraction_of_par: return "fraction-of-par";
        case QuoteConvention::dollars: return "dollars";
    }
    return "unknown";
}

QuoteConvention parse_quote_convention(std::string_view name) {
    for (auto c : {QuoteConvention::fraction_of_price, QuoteConvention::fraction_of_par, QuoteConvention::dollars})
        if (quote_convention_name(c) == name) return c;
    throw DomainError("unknown cost convention '" + std::string(name) +
                      "' (want fraction-of-price, fraction-of-par or dollars)");
}

double cost_from_quote(QuoteConvention convention, double value, double reference_price, double contract_size) {
    if (!(std::isfinite(value) && value >= 0.0)) throw DomainError("cost_from_quote: value must be >= 0");
    if (!(std::isfinite(contract_size) && contract_size > 0.0))
        throw DomainError("cost_from_quote: contract size must be > 0");
    constexpr double par = 100.0;
    switch (convention) {
        case QuoteConvention::dollars:
            return value;
        case QuoteConvention::fraction_of_par:
            return 0.5 * value / par * contract_size;
        case QuoteConvention::fraction_of_price:
            if (!(std::isfinite(reference_price) && reference_price > 0.0))
                throw DomainError("cost_from_quote: reference price must be > 0");
            return 0.5 * value / reference_price * contract_size;
    }
    throw DomainError("cost_from_quote: unknown convention");
}

// ---------------------------------------------------------------------------
// Run configuration

using nlohmann::json;

std::vector<double> ExperimentConfig::default_lambdas() {
    return {0.0, 0.125, 0.25, 0.5, 1.0 / std::sqrt(2.0), 1.0, std::sqrt(2.0), 2.0, 4.0, 8.0};
}

std::vector<std::uint64_t> ExperimentConfig::default_seeds(std::uint64_t first, std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) seeds[i] = first + i;
    return seeds;
}

MomentumConfig MomentumStrategy::to_config() const {
    MomentumConfig cfg;
    cfg.crossovers = crossovers;
    if (!weights.empty()) {
        cfg.weights = weights;
    } else {
        cfg.weights.assign(crossovers.size(), weight_scale / static_cast<double>(std::max<std::size_t>(crossovers.size(), 1)));
    }
    cfg.volatility.period = vol_period;
    cfg.volatility.relative_floor = vol_relative_floor;
    cfg.volatility.absolute_floor = vol_absolute_floor;
    cfg.gamma_alpha = 1.0 - 1.0 / gamma_period;
    cfg.gamma_min_mass = gamma_min_mass;
    cfg.warmup = warmup;
    return cfg;
}

std::filesystem::path RunConfig::price_csv_path() const {
    const std::filesystem::path p(market.price_csv);
    if (p.empty() || p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

namespace {

// Walks one JSON object, remembering the key path for error messages and
// which keys were consumed so leftovers can be rejected.
class ObjectReader {
public:
    ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& child(const std::string& key) {
        used_.insert(key);
        return node_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) return require_default(key, fallback);
        const json& v = child(key);
        if (!v.is_number()) throw ConfigError(child_path(key), "expected a number");
        return v.get<double>();
    }

    std::uint64_t unsigned_int(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
        if (!has(key)) {
            if (!fallback) throw ConfigError(child_path(key), "missing required key");
            return *fallback;
        }
        return as_unsigned(child(key), child_path(key));
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = child(key);
        if (!v.is_boolean()) throw ConfigError(child_path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            if (!fallback) throw ConfigError(child_path(key), "missing required key");
            return *fallback;
        }
        const json& v = child(key);
        if (!v.is_string()) throw ConfigError(child_path(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) {
        if (!has(key)) {
            if (!fallback) throw ConfigError(child_path(key), "missing required key");
            return *fallback;
        }
        const json& v = child(key);
        const std::string p = child_path(key);
        if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(p + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!used_.contains(it.key())) throw ConfigError(child_path(it.key()), "unknown key");
    }

    static std::uint64_t as_unsigned(const json& v, const std::string& path) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            const auto i = v.get<std::int64_t>();
            if (i >= 0) return static_cast<std::uint64_t>(i);
        }
        throw ConfigError(path, "expected a non-negative integer");
    }

private:
    double require_default(const std::string& key, std::optional<double> fallback) const {
        if (!fallback) throw ConfigError(child_path(key), "missing required key");
        return *fallback;
    }

    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

void check(bool ok, const std::string& path, const std::string& message) {
    if (!ok) throw ConfigError(path, message);
}

void check_positive(double v, const std::string& path) { check(v > 0.0, path, "must be > 0"); }

MarketConfig read_market(ObjectReader r) {
    MarketConfig m;
    m.gearing = r.number("gearing", 1e6);
    check_positive(m.gearing, r.child_path("gearing"));
    const std::string conv = r.string("cost_convention", "dollars");
    try {
        m.cost_convention = parse_quote_convention(conv);
    } catch (const DomainError& e) {
        throw ConfigError(r.child_path("cost_convention"), e.what());
    }
    m.contract_size = r.number("contract_size", 1.0);
    check_positive(m.contract_size, r.child_path("contract_size"));
    if (r.has("reference_price")) {
        m.reference_price = r.number("reference_price");
        check_positive(*m.reference_price, r.child_path("reference_price"));
    }
    m.annualization = r.number("annualization", 252.0);
    check_positive(m.annualization, r.child_path("annualization"));
    m.price_csv = r.string("price_csv", "");
    r.finish();
    return m;
}

OneFactorStrategy read_one_factor(ObjectReader& r) {
    OneFactorStrategy s;
    OneFactorParams& p = s.params;
    p.kappa = r.number("kappa", p.kappa);
    check_positive(p.kappa, r.child_path("kappa"));
    p.beta = r.number("beta", p.beta);
    p.sigma_x = r.number("sigma_x", p.sigma_x);
    check_positive(p.sigma_x, r.child_path("sigma_x"));
    p.rho01 = r.number("rho01", p.rho01);
    check(std::fabs(p.rho01) <= 1.0, r.child_path("rho01"), "must lie in [-1, 1]");
    p.dt = r.number("dt", p.dt);
    check_positive(p.dt, r.child_path("dt"));
    s.n_steps = r.unsigned_int("n_steps", s.n_steps);
    check(s.n_steps >= 2, r.child_path("n_steps"), "must be >= 2");
    return s;
}

MomentumStrategy read_momentum(ObjectReader& r) {
    MomentumStrategy s;
    if (r.has("crossovers")) {
        const json& list = r.child("crossovers");
        const std::string p = r.child_path("crossovers");
        check(list.is_array() && !list.empty(), p, "expected a non-empty array of [fast, slow] pairs");
        s.crossovers.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string ip = p + "[" + std::to_string(i) + "]";
            const json& pair = list[i];
            check(pair.is_array() && pair.size() == 2 && pair[0].is_number() && pair[1].is_number(), ip,
                  "expected [fast, slow]");
            CrossoverSpec c{pair[0].get<double>(), pair[1].get<double>()};
            check(c.t_fast > 0.0 && c.t_fast < c.t_slow, ip, "need 0 < fast < slow");
            s.crossovers.push_back(c);
        }
    }
    s.weights = r.numbers("weights", std::vector<double>{});
    check(s.weights.empty() || s.weights.size() == s.crossovers.size(), r.child_path("weights"),
          "must have one weight per crossover");
    s.fit_weights = r.boolean("fit_weights", s.fit_weights);
    check(!(s.fit_weights && !s.weights.empty()), r.child_path("fit_weights"),
          "cannot combine fit_weights with explicit weights");
    s.ridge = r.number("ridge", s.ridge);
    check(s.ridge >= 0.0, r.child_path("ridge"), "must be >= 0");
    s.weight_scale = r.number("weight_scale", s.weight_scale);
    s.vol_period = r.number("vol_period", s.vol_period);
    check(s.vol_period >= 2.0, r.child_path("vol_period"), "must be >= 2");
    s.vol_relative_floor = r.number("vol_relative_floor", s.vol_relative_floor);
    check(s.vol_relative_floor >= 0.0, r.child_path("vol_relative_floor"), "must be >= 0");
    s.vol_absolute_floor = r.number("vol_absolute_floor", s.vol_absolute_floor);
    check(s.vol_absolute_floor >= 0.0, r.child_path("vol_absolute_floor"), "must be >= 0");
    s.gamma_period = r.number("gamma_period", s.gamma_period);
    check(s.gamma_period > 1.0, r.child_path("gamma_period"), "must be > 1");
    s.gamma_min_mass = r.number("gamma_min_mass", s.gamma_min_mass);
    check(s.gamma_min_mass >= 0.0, r.child_path("gamma_min_mass"), "must be >= 0");
    s.warmup = r.unsigned_int("warmup", s.warmup);
    return s;
}

ExperimentConfig read_experiment(ObjectReader r) {
    ExperimentConfig e;
    e.epsilons = r.numbers("epsilons");
    check(!e.epsilons.empty(), r.child_path("epsilons"), "must not be empty");
    for (std::size_t i = 0; i < e.epsilons.size(); ++i)
        check(e.epsilons[i] >= 0.0, r.child_path("epsilons") + "[" + std::to_string(i) + "]", "must be >= 0");
    e.lambdas = r.numbers("lambdas", ExperimentConfig::default_lambdas());
    check(!e.lambdas.empty(), r.child_path("lambdas"), "must not be empty");
    for (std::size_t i = 0; i < e.lambdas.size(); ++i)
        check(e.lambdas[i] >= 0.0, r.child_path("lambdas") + "[" + std::to_string(i) + "]", "must be >= 0");
    if (r.has("seeds")) {
        const json& list = r.child("seeds");
        const std::string p = r.child_path("seeds");
        check(list.is_array() && !list.empty(), p, "expected a non-empty array of seeds");
        for (std::size_t i = 0; i < list.size(); ++i)
            e.seeds.push_back(ObjectReader::as_unsigned(list[i], p + "[" + std::to_string(i) + "]"));
    } else {
        e.seeds = ExperimentConfig::default_seeds();
    }
    if (r.has("risk_measures")) {
        const json& list = r.child("risk_measures");
        const std::string p = r.child_path("risk_measures");
        check(list.is_array() && !list.empty(), p, "expected a non-empty array");
        e.risk_measures.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string ip = p + "[" + std::to_string(i) + "]";
            check(list[i].is_string(), ip, "expected \"stdev\", \"var\" or \"esf\"");
            const auto kind = parse_risk_kind(list[i].get<std::string>());
            check(kind.has_value(), ip, "expected \"stdev\", \"var\" or \"esf\"");
            check(std::find(e.risk_measures.begin(), e.risk_measures.end(), *kind) == e.risk_measures.end(), ip,
                  "duplicate risk measure");
            e.risk_measures.push_back(*kind);
        }
    }
    e.tail_probability = r.number("tail_probability", e.tail_probability);
    check(e.tail_probability > 0.0 && e.tail_probability < 0.5, r.child_path("tail_probability"),
          "must lie in (0, 0.5)");
    e.initial_position = r.number("initial_position", e.initial_position);
    e.warmup = r.unsigned_int("warmup", e.warmup);
    const std::uint64_t threads = r.unsigned_int("threads", 0);
    check(threads <= 1024, r.child_path("threads"), "must be <= 1024");
    e.threads = static_cast<unsigned>(threads);
    r.finish();
    return e;
}

RunConfig read_config(const json& root, const std::filesystem::path& base_dir) {
    ObjectReader top(root, "");
    RunConfig cfg;
    cfg.base_dir = base_dir;

    if (top.has("market")) cfg.market = read_market(ObjectReader(top.child("market"), "market"));

    if (!top.has("strategy")) throw ConfigError("strategy", "missing required key");
    ObjectReader s(top.child("strategy"), "strategy");
    const std::string kind = s.string("kind");
    if (kind == "one_factor") {
        cfg.kind = StrategyKind::one_factor;
        cfg.one_factor = read_one_factor(s);
    } else if (kind == "momentum") {
        cfg.kind = StrategyKind::momentum;
        cfg.momentum = read_momentum(s);
    } else {
        throw ConfigError("strategy.kind", "expected \"one_factor\" or \"momentum\"");
    }
    s.finish();

    if (!top.has("experiment")) throw ConfigError("experiment", "missing required key");
    cfg.experiment = read_experiment(ObjectReader(top.child("experiment"), "experiment"));

    if (top.has("output")) {
        ObjectReader o(top.child("output"), "output");
        cfg.output.csv = o.string("csv", "");
        o.finish();
    }
    top.finish();

    if (cfg.market.cost_convention == QuoteConvention::fraction_of_price && cfg.kind == StrategyKind::one_factor)
        check(cfg.market.reference_price.has_value(), "market.reference_price",
              "required with fraction-of-price costs on a synthetic market");
    if (!cfg.market.price_csv.empty())
        check(std::filesystem::exists(cfg.price_csv_path()), "market.price_csv",
              "file not found: " + cfg.price_csv_path().string());
    return cfg;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    try {
        return read_config(root, base_dir);
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError("", std::string("invalid config: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::string emit_config(const RunConfig& c) {
    json root;
    json market = {{"gearing", c.market.gearing},
                   {"cost_convention", std::string(quote_convention_name(c.market.cost_convention))},
                   {"contract_size", c.market.contract_size},
                   {"annualization", c.market.annualization},
                   {"price_csv", c.market.price_csv}};
    if (c.market.reference_price) market["reference_price"] = *c.market.reference_price;
    root["market"] = market;

    if (c.kind == StrategyKind::one_factor) {
        const auto& p = c.one_factor.params;
        root["strategy"] = {{"kind", "one_factor"}, {"kappa", p.kappa}, {"beta", p.beta},
                            {"sigma_x", p.sigma_x}, {"rho01", p.rho01}, {"dt", p.dt},
                            {"n_steps", c.one_factor.n_steps}};
    } else {
        const auto& m = c.momentum;
        json crossovers = json::array();
        for (const auto& x : m.crossovers) crossovers.push_back({x.t_fast, x.t_slow});
        root["strategy"] = {{"kind", "momentum"},
                            {"crossovers", crossovers},
                            {"weights", m.weights},
                            {"fit_weights", m.fit_weights},
                            {"ridge", m.ridge},
                            {"weight_scale", m.weight_scale},
                            {"vol_period", m.vol_period},
                            {"vol_relative_floor", m.vol_relative_floor},
                            {"vol_absolute_floor", m.vol_absolute_floor},
                            {"gamma_period", m.gamma_period},
                            {"gamma_min_mass", m.gamma_min_mass},
                            {"warmup", m.warmup}};
    }

    json measures = json::array();
    for (RiskKind k : c.experiment.risk_measures) measures.push_back(std::string(risk_kind_name(k)));
    root["experiment"] = {{"epsilons", c.experiment.epsilons},
                          {"lambdas", c.experiment.lambdas},
                          {"seeds", c.experiment.seeds},
                          {"risk_measures", measures},
                          {"tail_probability", c.experiment.tail_probability},
                          {"initial_position", c.experiment.initial_position},
                          {"warmup", c.experiment.warmup},
                          {"threads", c.experiment.threads}};
    root["output"] = {{"csv", c.output.csv}};
    return root.dump(2) + "\n";
}

}  // namespace tcbuf
