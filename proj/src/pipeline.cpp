// pipeline.cpp
#include "fattails/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fattails/dist.hpp"
#include "fattails/errors.hpp"
#include "fattails/rng.hpp"

namespace fattails {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string to_hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

// Fixed-pool parallel map over [0, n). The body must not throw; results go
// into caller-owned slots so the outcome is independent of scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
    std::size_t k = jobs > 0 ? static_cast<std::size_t>(jobs)
                             : std::max(1u, std::thread::hardware_concurrency());
    k = std::min(k, n);
    if (k <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (std::size_t t = 0; t < k; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

void check_fraction(double v, const char* name) {
    if (!(v > 0.0 && v < 0.5))
        throw ConfigError(std::string(name) + " must lie strictly between 0 and 0.5");
}

void validate_config(const ExperimentConfig& cfg) {
    check_fraction(cfg.cap_fraction, "cap_fraction");
    check_fraction(cfg.trim_fraction, "trim_fraction");
    if (!(cfg.tail_threshold > 0.0) || !std::isfinite(cfg.tail_threshold))
        throw ConfigError("tail_threshold must be positive");
    if (cfg.coverage_levels.empty()) throw ConfigError("coverage_levels must be non-empty");
    for (double lv : cfg.coverage_levels)
        if (!(lv > 0.0 && lv < 1.0)) throw ConfigError("coverage levels must lie in (0, 1)");
    if (cfg.ks_reps < 1) throw ConfigError("ks_reps must be at least 1");
    if (cfg.arma_grid_max < 1 || cfg.egarch_grid_max < 1)
        throw ConfigError("grid maxima must be at least 1");
    if (cfg.min_observations < 10) throw ConfigError("min_observations must be at least 10");
    if (cfg.periods.empty()) throw ConfigError("at least one period is required");
    std::set<std::string> labels;
    for (const auto& p : cfg.periods) {
        if (p.label.empty()) throw ConfigError("period labels must be non-empty");
        if (!labels.insert(p.label).second)
            throw ConfigError("duplicate period label: " + p.label);
        if (p.end < p.start) throw ConfigError("period " + p.label + " has end before start");
    }
    if (cfg.prices_path.empty() || cfg.caps_path.empty())
        throw ConfigError("prices and caps paths must be non-empty");
    if (cfg.market_ticker.empty()) throw ConfigError("market_ticker must be non-empty");
}

std::string trim_mode_name(TrimMode m) {
    return m == TrimMode::per_statistic ? "per_statistic" : "shared";
}

// ---------------------------------------------------------------- measurement

enum class StockStatus { excl_data, excl_convergence, ok };

struct MeasureResult {
    StockStatus status = StockStatus::excl_data;
    StockRow row;
};

struct ModelGrids {
    std::vector<GarchSpec> arma;
    std::vector<GarchSpec> egarch;
};

ModelGrids build_grids(const ExperimentConfig& cfg) {
    ModelGrids g;
    for (std::size_t ar = 1; ar <= cfg.arma_grid_max; ++ar)
        for (std::size_t ma = 1; ma <= cfg.arma_grid_max; ++ma)
            for (std::size_t p = 1; p <= cfg.arma_grid_max; ++p)
                for (std::size_t q = 1; q <= cfg.arma_grid_max; ++q)
                    g.arma.push_back({ar, ma, VarianceKind::garch, p, q});
    for (std::size_t p = 1; p <= cfg.egarch_grid_max; ++p)
        for (std::size_t q = 1; q <= cfg.egarch_grid_max; ++q)
            g.egarch.push_back({0, 0, VarianceKind::egarch, p, q});
    return g;
}

std::string spec_label(const GarchSpec& s) {
    const auto num = [](std::size_t v) { return std::to_string(v); };
    if (s.kind == VarianceKind::egarch)
        return "egarch(" + num(s.p) + "," + num(s.q) + ")";
    if (s.ar == 0 && s.ma == 0) return "garch(" + num(s.p) + "," + num(s.q) + ")";
    return "arma(" + num(s.ar) + "," + num(s.ma) + ")-garch(" + num(s.p) + "," + num(s.q) +
           ")";
}

const ReturnSeries* find_series(const std::vector<ReturnSeries>& v, const std::string& t) {
    auto it = std::lower_bound(
        v.begin(), v.end(), t,
        [](const ReturnSeries& s, const std::string& key) { return s.ticker < key; });
    return (it != v.end() && it->ticker == t) ? &*it : nullptr;
}

std::vector<double> period_returns(const ReturnSeries& series, const PeriodSpec& period) {
    const ReturnSeries sliced = slice_period(series, period);
    std::vector<double> r;
    r.reserve(sliced.observations.size());
    for (const auto& o : sliced.observations) r.push_back(o.r);
    return r;
}

MeasureResult measure_stock(const ExperimentConfig& cfg, const ReturnSeries& series,
                            const PeriodSpec& period, const std::optional<ModelFamily>& family,
                            const ModelGrids& grids) {
    MeasureResult res;
    std::vector<double> r;
    try {
        r = period_returns(series, period);
    } catch (const EmptySliceError&) {
        return res;
    }
    if (r.size() < cfg.min_observations) return res;
    try {
        std::vector<double> x;
        std::string model;
        if (family) {
            GarchFit chosen;
            if (*family == ModelFamily::garch11) {
                chosen = fit_garch11(r);
            } else {
                const auto& grid =
                    *family == ModelFamily::best_arma_garch ? grids.arma : grids.egarch;
                std::vector<GarchFit> fits;
                for (const auto& s : grid) {
                    try {
                        fits.push_back(fit_garch(r, s));
                    } catch (const Error&) {
                        // this candidate failed; selection proceeds on the rest
                    }
                }
                if (fits.empty()) {
                    res.status = StockStatus::excl_convergence;
                    return res;
                }
                chosen = fits[select_best_fit(fits)];
            }
            if (!chosen.converged) {
                res.status = StockStatus::excl_convergence;
                return res;
            }
            model = spec_label(chosen.spec);
            x = standardize(chosen.std_residuals);
        } else {
            x = standardize(r);
        }
        const TailProbability tails = statistical_probability(x, cfg.tail_threshold);
        const FitResult tfit = fit_studentt(x);
        if (!tfit.converged) {
            res.status = StockStatus::excl_convergence;
            return res;
        }
        res.row.ticker = series.ticker;
        res.row.n_obs = r.size();
        res.row.neg = tails.neg;
        res.row.pos = tails.pos;
        res.row.nu = std::get<StudentTParams>(tfit.params).nu;
        res.row.model = model;
        res.status = StockStatus::ok;
    } catch (const TooShortError&) {
        res.status = StockStatus::excl_data;
    } catch (const ZeroVarianceError&) {
        res.status = StockStatus::excl_data;
    } catch (const Error&) {
        res.status = StockStatus::excl_convergence;
    }
    return res;
}

// Flags the 2*floor(trim*m) per-column outliers and fills the trimmed means.
void apply_trim(GroupTailReport& rep, double trim_fraction, TrimMode mode) {
    const std::size_t m = rep.stocks.size();
    const std::size_t k =
        static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(m)));
    rep.trimmed_per_side = k;
    rep.n_stocks = m >= 2 * k ? m - 2 * k : 0;
    if (m == 0) return;

    const auto survivors = [&](auto key) {
        std::vector<std::size_t> idx(m);
        for (std::size_t i = 0; i < m; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const double va = key(rep.stocks[a]), vb = key(rep.stocks[b]);
            if (va != vb) return va < vb;
            return rep.stocks[a].ticker < rep.stocks[b].ticker;
        });
        std::vector<char> in(m, 1);
        for (std::size_t j = 0; j < k; ++j) {
            in[idx[j]] = 0;
            in[idx[m - 1 - j]] = 0;
        }
        return in;
    };

    const auto neg_key = [](const StockRow& s) { return s.neg; };
    const auto pos_key = [](const StockRow& s) { return s.pos; };
    const auto nu_key = [](const StockRow& s) { return s.nu; };
    std::vector<char> in_neg = survivors(neg_key);
    std::vector<char> in_pos, in_nu;
    if (mode == TrimMode::per_statistic) {
        in_pos = survivors(pos_key);
        in_nu = survivors(nu_key);
    } else {
        in_pos = in_neg;
        in_nu = in_neg;
    }

    double sn = 0.0, sp = 0.0, sv = 0.0;
    std::size_t cn = 0, cp = 0, cv = 0;
    for (std::size_t i = 0; i < m; ++i) {
        auto& row = rep.stocks[i];
        row.in_neg = in_neg[i] != 0;
        row.in_pos = in_pos[i] != 0;
        row.in_nu = in_nu[i] != 0;
        if (row.in_neg) {
            sn += row.neg;
            ++cn;
        }
        if (row.in_pos) {
            sp += row.pos;
            ++cp;
        }
        if (row.in_nu) {
            sv += row.nu;
            ++cv;
        }
    }
    if (cn) rep.mean_neg = sn / static_cast<double>(cn);
    if (cp) rep.mean_pos = sp / static_cast<double>(cp);
    if (cv) rep.mean_nu = sv / static_cast<double>(cv);
}

GroupTailReport measure_group(const ExperimentConfig& cfg, const MarketData& data,
                              const PeriodSpec& period, const std::string& group_label,
                              const std::vector<std::string>& tickers,
                              const std::optional<ModelFamily>& family, const ModelGrids& grids,
                              int jobs) {
    GroupTailReport rep;
    rep.period = period.label;
    rep.group = group_label;
    rep.universe = tickers.size();

    std::vector<MeasureResult> results(tickers.size());
    parallel_for(tickers.size(), jobs, [&](std::size_t i) {
        const ReturnSeries* s = find_series(data.stocks, tickers[i]);
        if (s == nullptr) {
            results[i].status = StockStatus::excl_data;
            return;
        }
        results[i] = measure_stock(cfg, *s, period, family, grids);
    });

    for (auto& r : results) {
        switch (r.status) {
            case StockStatus::ok:
                rep.stocks.push_back(std::move(r.row));
                break;
            case StockStatus::excl_data:
                ++rep.excluded.data;
                break;
            case StockStatus::excl_convergence:
                ++rep.excluded.convergence;
                break;
        }
    }
    rep.n_measured = rep.stocks.size();
    rep.empty = rep.n_measured < 3;
    apply_trim(rep, cfg.trim_fraction, cfg.trim_mode);
    return rep;
}

std::vector<GroupTailReport> run_tail_tables(const ExperimentConfig& cfg,
                                             const MarketData& data,
                                             const std::optional<ModelFamily>& family,
                                             int jobs) {
    validate_config(cfg);
    const ModelGrids grids = build_grids(cfg);
    std::vector<GroupTailReport> reports;
    for (const auto& period : cfg.periods) {
        CapGroups groups;
        bool have_groups = true;
        try {
            groups = classify_cap_groups(data.caps, period, cfg.cap_fraction);
        } catch (const InsufficientUniverseError&) {
            have_groups = false;
        }
        const std::pair<const char*, const std::vector<std::string>*> sets[] = {
            {"all", &groups.all}, {"large", &groups.large}, {"small", &groups.small}};
        for (const auto& [label, tickers] : sets) {
            if (!have_groups) {
                GroupTailReport rep;
                rep.period = period.label;
                rep.group = label;
                rep.empty = true;
                reports.push_back(std::move(rep));
                continue;
            }
            reports.push_back(
                measure_group(cfg, data, period, label, *tickers, family, grids, jobs));
        }
    }
    return reports;
}

double phi_tail(double threshold) { return normal_cdf(-threshold, NormalParams{0.0, 1.0}); }

void require_market_length(const std::vector<double>& r) {
    if (r.size() < 500)
        throw TooShortError("market-series analyses need at least 500 returns, got " +
                            std::to_string(r.size()));
}

// ------------------------------------------------------------------- writers

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFileError("cannot open for writing: " + path.string());
    out << content;
}

ojson provenance_json(const ExperimentConfig& cfg) {
    ojson p;
    p["version"] = "0.1.0";
    p["seed"] = cfg.master_seed;
    p["config_digest"] = config_digest(cfg);
    return p;
}

bool want_json(const std::string& format) { return format != "csv"; }
bool want_csv(const std::string& format) { return format != "json"; }

void check_format(const std::string& format) {
    if (format != "json" && format != "csv" && format != "both")
        throw ConfigError("format must be json, csv or both");
}

ojson params_json(const DistParams& params) {
    ojson j;
    if (const auto* n = std::get_if<NormalParams>(&params)) {
        j["mu"] = n->mu;
        j["sigma"] = n->sigma;
    } else if (const auto* t = std::get_if<StudentTParams>(&params)) {
        j["nu"] = t->nu;
        j["mu"] = t->mu;
        j["sigma"] = t->sigma;
    } else {
        const auto& s = std::get<StableParams>(params);
        j["alpha"] = s.alpha;
        j["beta"] = s.beta;
        j["gamma"] = s.gamma;
        j["delta"] = s.delta;
    }
    return j;
}

}  // namespace

// ------------------------------------------------------------------- config

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.periods = {
        {"Entire", {1980, 1, 1}, {2015, 6, 30}},
        {"Sub1-P1", {1982, 7, 1}, {1997, 6, 30}},
        {"Sub1-P2", {2000, 7, 1}, {2015, 6, 30}},
        {"Sub2-P1", {1988, 7, 1}, {1997, 6, 30}},
        {"Sub2-P2", {1997, 7, 1}, {2006, 6, 30}},
        {"Sub2-P3", {2006, 7, 1}, {2015, 6, 30}},
        {"Sub3-P1", {2007, 7, 1}, {2009, 6, 30}},
        {"Sub3-P2", {2009, 7, 1}, {2015, 6, 30}},
    };
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    ojson j;
    j["prices"] = cfg.prices_path;
    j["caps"] = cfg.caps_path;
    j["market_ticker"] = cfg.market_ticker;
    j["periods"] = ojson::array();
    for (const auto& p : cfg.periods) {
        ojson jp;
        jp["label"] = p.label;
        jp["start"] = format_date(p.start);
        jp["end"] = format_date(p.end);
        j["periods"].push_back(jp);
    }
    j["cap_fraction"] = cfg.cap_fraction;
    j["trim_fraction"] = cfg.trim_fraction;
    j["trim_mode"] = trim_mode_name(cfg.trim_mode);
    j["tail_threshold"] = cfg.tail_threshold;
    j["coverage_levels"] = cfg.coverage_levels;
    j["ks_reps"] = cfg.ks_reps;
    j["ks_sample_size"] = cfg.ks_sample_size;
    j["master_seed"] = cfg.master_seed;
    j["min_observations"] = cfg.min_observations;
    j["arma_grid_max"] = cfg.arma_grid_max;
    j["egarch_grid_max"] = cfg.egarch_grid_max;
    return j.dump(2) + "\n";
}

std::string config_digest(const ExperimentConfig& cfg) {
    return to_hex16(hash_label(config_to_json(cfg)));
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFileError("cannot open config file: " + path);
    ojson j;
    try {
        j = ojson::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    ExperimentConfig cfg = default_config();
    static const std::set<std::string> known{
        "prices",       "caps",           "market_ticker",  "periods",
        "cap_fraction", "trim_fraction",  "trim_mode",      "tail_threshold",
        "coverage_levels", "ks_reps",     "ks_sample_size", "master_seed",
        "min_observations", "arma_grid_max", "egarch_grid_max"};
    try {
        for (const auto& [key, value] : j.items()) {
            if (!known.count(key)) throw ConfigError("unknown config key: " + key);
            if (key == "prices") cfg.prices_path = value.get<std::string>();
            else if (key == "caps") cfg.caps_path = value.get<std::string>();
            else if (key == "market_ticker") cfg.market_ticker = value.get<std::string>();
            else if (key == "cap_fraction") cfg.cap_fraction = value.get<double>();
            else if (key == "trim_fraction") cfg.trim_fraction = value.get<double>();
            else if (key == "tail_threshold") cfg.tail_threshold = value.get<double>();
            else if (key == "coverage_levels")
                cfg.coverage_levels = value.get<std::vector<double>>();
            else if (key == "ks_reps") cfg.ks_reps = value.get<int>();
            else if (key == "ks_sample_size") cfg.ks_sample_size = value.get<std::size_t>();
            else if (key == "master_seed") cfg.master_seed = value.get<std::uint64_t>();
            else if (key == "min_observations")
                cfg.min_observations = value.get<std::size_t>();
            else if (key == "arma_grid_max") cfg.arma_grid_max = value.get<std::size_t>();
            else if (key == "egarch_grid_max") cfg.egarch_grid_max = value.get<std::size_t>();
            else if (key == "trim_mode") {
                const std::string mode = value.get<std::string>();
                if (mode == "per_statistic") cfg.trim_mode = TrimMode::per_statistic;
                else if (mode == "shared") cfg.trim_mode = TrimMode::shared;
                else throw ConfigError("trim_mode must be per_statistic or shared");
            } else if (key == "periods") {
                if (!value.is_array()) throw ConfigError("periods must be an array");
                cfg.periods.clear();
                for (const auto& jp : value) {
                    if (!jp.is_object()) throw ConfigError("each period must be an object");
                    PeriodSpec p;
                    bool have_label = false, have_start = false, have_end = false;
                    for (const auto& [pk, pv] : jp.items()) {
                        if (pk == "label") {
                            p.label = pv.get<std::string>();
                            have_label = true;
                        } else if (pk == "start") {
                            p.start = parse_date(pv.get<std::string>());
                            have_start = true;
                        } else if (pk == "end") {
                            p.end = parse_date(pv.get<std::string>());
                            have_end = true;
                        } else {
                            throw ConfigError("unknown period key: " + pk);
                        }
                    }
                    if (!have_label || !have_start || !have_end)
                        throw ConfigError("periods need label, start and end");
                    cfg.periods.push_back(std::move(p));
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config value error: " + std::string(e.what()));
    } catch (const SchemaError& e) {
        throw ConfigError("config date error: " + std::string(e.what()));
    }
    validate_config(cfg);
    return cfg;
}

// -------------------------------------------------------------------- loading

MarketData load_market_data(const ExperimentConfig& cfg) {
    MarketData md;
    auto prices = load_prices(cfg.prices_path);
    md.caps = load_caps(cfg.caps_path);
    for (auto& ps : prices) {
        if (ps.ticker == cfg.market_ticker)
            md.market = log_returns(ps);
        else
            md.stocks.push_back(log_returns(ps));
    }
    std::sort(md.stocks.begin(), md.stocks.end(),
              [](const ReturnSeries& a, const ReturnSeries& b) { return a.ticker < b.ticker; });
    return md;
}

std::vector<double> standardize(const std::vector<double>& x) {
    if (x.size() < 2) throw TooShortError("standardize needs at least 2 observations");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo == *hi) throw ZeroVarianceError("standardize: all observations identical");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean) / sd;
    return z;
}

// ----------------------------------------------------------------- reports

std::string to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::garch11: return "garch11";
        case ModelFamily::best_arma_garch: return "best_arma_garch";
        case ModelFamily::best_egarch: return "best_egarch";
    }
    return "garch11";
}

std::vector<GroupTailReport> run_table3(const ExperimentConfig& cfg, const MarketData& data,
                                        int jobs) {
    return run_tail_tables(cfg, data, std::nullopt, jobs);
}

std::vector<GroupTailReport> run_table4(const ExperimentConfig& cfg, const MarketData& data,
                                        ModelFamily family, int jobs) {
    return run_tail_tables(cfg, data, family, jobs);
}

std::vector<GroupStatsReport> run_table1(const ExperimentConfig& cfg, const MarketData& data,
                                         int jobs) {
    validate_config(cfg);
    (void)jobs;  // per-stock moments are cheap; evaluation stays serial
    std::vector<GroupStatsReport> reports;
    for (const auto& period : cfg.periods) {
        CapGroups groups;
        bool have_groups = true;
        try {
            groups = classify_cap_groups(data.caps, period, cfg.cap_fraction);
        } catch (const InsufficientUniverseError&) {
            have_groups = false;
        }
        const std::pair<const char*, const std::vector<std::string>*> sets[] = {
            {"all", &groups.all}, {"large", &groups.large}, {"small", &groups.small}};
        for (const auto& [label, tickers] : sets) {
            GroupStatsReport rep;
            rep.period = period.label;
            rep.group = label;
            if (have_groups) {
                std::vector<double> pooled;
                DescriptiveStats acc{};
                for (const auto& t : *tickers) {
                    const ReturnSeries* s = find_series(data.stocks, t);
                    if (s == nullptr) continue;
                    std::vector<double> r;
                    try {
                        r = period_returns(*s, period);
                    } catch (const EmptySliceError&) {
                        continue;
                    }
                    if (r.size() < std::max<std::size_t>(cfg.min_observations, 4)) continue;
                    DescriptiveStats st;
                    try {
                        st = descriptive_stats(r);
                    } catch (const Error&) {
                        continue;
                    }
                    acc.mean += st.mean;
                    acc.stdev += st.stdev;
                    acc.skewness += st.skewness;
                    acc.kurtosis += st.kurtosis;
                    ++rep.n_stocks;
                    pooled.insert(pooled.end(), r.begin(), r.end());
                }
                if (rep.n_stocks >= 3) {
                    rep.n_obs = pooled.size();
                    rep.pooled = descriptive_stats(pooled);
                    const double ns = static_cast<double>(rep.n_stocks);
                    rep.averaged.mean = acc.mean / ns;
                    rep.averaged.stdev = acc.stdev / ns;
                    rep.averaged.skewness = acc.skewness / ns;
                    rep.averaged.kurtosis = acc.kurtosis / ns;
                    rep.averaged.n = rep.n_stocks;
                } else {
                    rep.empty = true;
                }
            } else {
                rep.empty = true;
            }
            reports.push_back(std::move(rep));
        }
    }
    return reports;
}

Table2Report run_table2(const ExperimentConfig& cfg, const std::vector<double>& market_returns) {
    validate_config(cfg);
    require_market_length(market_returns);
    Table2Report rep;
    rep.period = cfg.periods.front().label;
    rep.n_obs = market_returns.size();

    const FitResult nfit = fit_normal(market_returns);
    const FitResult sfit = fit_stable_koutrouvelis(market_returns);
    const FitResult tfit = fit_studentt(market_returns);

    const auto np = std::get<NormalParams>(nfit.params);
    const auto sp = std::get<StableParams>(sfit.params);
    const auto tp = std::get<StudentTParams>(tfit.params);

    const ModelSampler samplers[3] = {
        [np](std::size_t n, std::uint64_t seed) { return sample_normal(n, np, seed); },
        [sp](std::size_t n, std::uint64_t seed) { return sample_stable(n, sp, seed); },
        [tp](std::size_t n, std::uint64_t seed) { return sample_studentt(n, tp, seed); }};
    const FitResult fits[3] = {nfit, sfit, tfit};
    const char* names[3] = {"normal", "stable", "studentt"};

    for (int i = 0; i < 3; ++i) {
        Table2Panel panel;
        panel.name = names[i];
        panel.params = fits[i].params;
        panel.loglik = fits[i].loglik;
        const std::uint64_t seed = derive_seed(cfg.master_seed, "table2", cfg.market_ticker,
                                               static_cast<std::uint32_t>(i));
        panel.ks = ks_simulation(market_returns, samplers[i], cfg.ks_reps, seed,
                                 cfg.ks_sample_size);
        rep.panels.push_back(std::move(panel));
    }
    return rep;
}

Figure1Output run_figure1(const ExperimentConfig& cfg,
                          const std::vector<double>& market_returns) {
    validate_config(cfg);
    require_market_length(market_returns);
    Figure1Output out;
    out.period = cfg.periods.front().label;
    out.n_obs = market_returns.size();
    out.normal_fit = fit_normal(market_returns);
    out.stable_fit = fit_stable_koutrouvelis(market_returns);
    out.studentt_fit = fit_studentt(market_returns);

    const std::size_t n = market_returns.size();
    const auto np = std::get<NormalParams>(out.normal_fit.params);
    const auto sp = std::get<StableParams>(out.stable_fit.params);
    const auto tp = std::get<StudentTParams>(out.studentt_fit.params);
    const auto seed_for = [&](std::uint32_t stage) {
        return derive_seed(cfg.master_seed, "fig1", cfg.market_ticker, stage);
    };

    const std::pair<const char*, std::vector<double>> series[4] = {
        {"empirical", market_returns},
        {"normal", sample_normal(n, np, seed_for(0))},
        {"stable", sample_stable(n, sp, seed_for(1))},
        {"studentt", sample_studentt(n, tp, seed_for(2))}};
    for (const auto& [name, raw] : series) {
        Figure1Dataset ds;
        ds.name = name;
        const std::vector<double> x = standardize(raw);
        ds.hist = scott_histogram(x);
        ds.neg = empirical_ccdf(x, TailSide::negative);
        ds.pos = empirical_ccdf(x, TailSide::positive);
        out.datasets.push_back(std::move(ds));
    }
    return out;
}

Figure2Report run_figure2(const ExperimentConfig& cfg,
                          const std::vector<double>& market_returns) {
    validate_config(cfg);
    require_market_length(market_returns);
    Figure2Report rep;
    rep.period = cfg.periods.front().label;
    rep.n_obs = market_returns.size();
    const std::vector<double> x = standardize(market_returns);
    rep.at_threshold = statistical_probability(x, cfg.tail_threshold);
    rep.normal_tail_at_threshold = phi_tail(cfg.tail_threshold);
    rep.coverage = coverage_probabilities(x, cfg.coverage_levels);
    return rep;
}

std::vector<Figure3Row> run_figure3(const ExperimentConfig& cfg, const MarketData& data,
                                    int jobs) {
    validate_config(cfg);
    const ModelGrids grids = build_grids(cfg);
    std::vector<Figure3Row> rows;
    for (const auto& period : cfg.periods) {
        std::vector<std::string> all;
        bool have_groups = true;
        try {
            all = classify_cap_groups(data.caps, period, cfg.cap_fraction).all;
        } catch (const InsufficientUniverseError&) {
            have_groups = false;
        }
        const std::optional<ModelFamily> kinds[2] = {std::nullopt, ModelFamily::garch11};
        const char* kind_names[2] = {"raw", "filtered"};
        for (int k = 0; k < 2; ++k) {
            Figure3Row row;
            row.period = period.label;
            row.kind = kind_names[k];
            if (have_groups) {
                const GroupTailReport rep =
                    measure_group(cfg, data, period, "all", all, kinds[k], grids, jobs);
                row.n_stocks = rep.n_stocks;
                row.mean_neg = rep.mean_neg;
                row.mean_pos = rep.mean_pos;
                row.mean_nu = rep.mean_nu;
                row.empty = rep.empty;
            } else {
                row.empty = true;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

// ---------------------------------------------------------------- synthetic

void write_synthetic_universe(const std::string& out_dir, const SyntheticSpec& spec,
                              std::uint64_t seed) {
    if (spec.n_stocks < 1) throw InvalidParamsError("n_stocks must be at least 1");
    if (spec.n_days < 2) throw InvalidParamsError("n_days must be at least 2");
    if (spec.t_nu != 0.0 && !(spec.t_nu > 2.0))
        throw InvalidParamsError("t_nu must be 0 (normal) or > 2");
    if (!(spec.d > 0.0) || !(spec.beta >= 0.0) || !(spec.gamma >= 0.0) ||
        spec.beta + spec.gamma >= 1.0)
        throw InvalidParamsError("volatility coefficients must be stationary");

    fs::create_directories(out_dir);

    // business-day calendar, n_days + 1 price dates
    std::vector<Date> dates;
    dates.reserve(spec.n_days + 1);
    Date d{2000, 1, 3};
    while (dates.size() < spec.n_days + 1) {
        if (!is_weekend(d)) dates.push_back(d);
        d = add_days(d, 1);
    }

    std::vector<std::string> tickers;
    for (std::size_t i = 0; i < spec.n_stocks; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "S%03zu", i);
        tickers.emplace_back(buf);
    }

    GarchParams gp;
    gp.mu = spec.mu;
    gp.d = spec.d;
    gp.beta = {spec.beta};
    gp.gamma_coef = {spec.gamma};
    const double uncond_sd = std::sqrt(spec.d / (1.0 - spec.beta - spec.gamma));

    const auto draw_returns = [&](const std::string& ticker) {
        const std::uint64_t s = derive_seed(seed, "synthetic", ticker, 0);
        if (spec.clustered) return simulate_garch(spec.n_days, GarchSpec{}, gp, s, spec.t_nu);
        if (spec.t_nu > 2.0) {
            auto z = sample_studentt(spec.n_days, {spec.t_nu, 0.0, 1.0}, s);
            const double unit = std::sqrt((spec.t_nu - 2.0) / spec.t_nu);
            for (double& v : z) v = spec.mu + uncond_sd * unit * v;
            return z;
        }
        return sample_normal(spec.n_days, {spec.mu, uncond_sd}, s);
    };

    std::ostringstream prices;
    prices << "date,ticker,close\n";
    const auto emit_series = [&](const std::string& ticker) {
        const std::vector<double> r = draw_returns(ticker);
        double logp = std::log(100.0);
        prices << format_date(dates[0]) << ',' << ticker << ',' << fmt(100.0) << '\n';
        for (std::size_t t = 0; t < r.size(); ++t) {
            logp += r[t];
            prices << format_date(dates[t + 1]) << ',' << ticker << ',' << fmt(std::exp(logp))
                   << '\n';
        }
    };
    for (const auto& t : tickers) emit_series(t);
    emit_series("MARKET");
    write_text_file(fs::path(out_dir) / "prices.csv", prices.str());

    // constant monthly caps, strictly increasing with the stock index
    std::ostringstream caps;
    caps << "month,ticker,marketcap\n";
    const YearMonth last = year_month(dates.back());
    for (YearMonth ym = year_month(dates.front()); !(last < ym);) {
        const std::string month = format_month(ym);
        for (std::size_t i = 0; i < tickers.size(); ++i)
            caps << month << ',' << tickers[i] << ','
                 << fmt(1e9 * static_cast<double>(i + 1)) << '\n';
        ym.month += 1;
        if (ym.month > 12) {
            ym.month = 1;
            ym.year += 1;
        }
    }
    write_text_file(fs::path(out_dir) / "caps.csv", caps.str());

    ExperimentConfig cfg;
    cfg.prices_path = (fs::path(out_dir) / "prices.csv").string();
    cfg.caps_path = (fs::path(out_dir) / "caps.csv").string();
    cfg.market_ticker = "MARKET";
    cfg.periods = {{"Full", {2000, 1, 1}, {2035, 12, 31}}};
    cfg.master_seed = seed;
    write_text_file(fs::path(out_dir) / "config.json", config_to_json(cfg));
}

// ------------------------------------------------------------------- writers

void write_tail_reports(const std::vector<GroupTailReport>& reports,
                        const ExperimentConfig& cfg, const std::string& out_dir,
                        const std::string& stem, const std::string& format) {
    check_format(format);
    fs::create_directories(out_dir);
    if (want_json(format)) {
        ojson j;
        j["provenance"] = provenance_json(cfg);
        j["reports"] = ojson::array();
        for (const auto& r : reports) {
            ojson jr;
            jr["period"] = r.period;
            jr["group"] = r.group;
            jr["universe"] = r.universe;
            jr["n_measured"] = r.n_measured;
            jr["n_stocks"] = r.n_stocks;
            jr["trimmed_per_side"] = r.trimmed_per_side;
            jr["excluded"] = ojson{{"data", r.excluded.data},
                                   {"convergence", r.excluded.convergence}};
            jr["empty"] = r.empty;
            if (r.empty) {
                jr["mean_neg"] = nullptr;
                jr["mean_pos"] = nullptr;
                jr["mean_nu"] = nullptr;
            } else {
                jr["mean_neg"] = r.mean_neg;
                jr["mean_pos"] = r.mean_pos;
                jr["mean_nu"] = r.mean_nu;
            }
            jr["stocks"] = ojson::array();
            for (const auto& s : r.stocks) {
                ojson js;
                js["ticker"] = s.ticker;
                js["n_obs"] = s.n_obs;
                js["neg"] = s.neg;
                js["pos"] = s.pos;
                js["nu"] = s.nu;
                if (!s.model.empty()) js["model"] = s.model;
                js["in_neg"] = s.in_neg;
                js["in_pos"] = s.in_pos;
                js["in_nu"] = s.in_nu;
                jr["stocks"].push_back(std::move(js));
            }
            j["reports"].push_back(std::move(jr));
        }
        write_text_file(fs::path(out_dir) / (stem + ".json"), j.dump(2) + "\n");
    }
    if (want_csv(format)) {
        std::ostringstream summary;
        summary << "period,group,universe,n_measured,n_stocks,trimmed_per_side,"
                   "excluded_data,excluded_convergence,mean_neg,mean_pos,mean_nu,empty\n";
        for (const auto& r : reports) {
            summary << r.period << ',' << r.group << ',' << r.universe << ',' << r.n_measured
                    << ',' << r.n_stocks << ',' << r.trimmed_per_side << ','
                    << r.excluded.data << ',' << r.excluded.convergence << ',';
            if (r.empty)
                summary << ",,";
            else
                summary << fmt(r.mean_neg) << ',' << fmt(r.mean_pos) << ',' << fmt(r.mean_nu);
            summary << ',' << (r.empty ? 1 : 0) << '\n';
        }
        write_text_file(fs::path(out_dir) / (stem + ".csv"), summary.str());

        std::ostringstream detail;
        detail << "period,group,ticker,n_obs,neg,pos,nu,model,in_neg,in_pos,in_nu\n";
        for (const auto& r : reports)
            for (const auto& s : r.stocks)
                detail << r.period << ',' << r.group << ',' << s.ticker << ',' << s.n_obs
                       << ',' << fmt(s.neg) << ',' << fmt(s.pos) << ',' << fmt(s.nu) << ','
                       << s.model << ',' << (s.in_neg ? 1 : 0) << ',' << (s.in_pos ? 1 : 0)
                       << ',' << (s.in_nu ? 1 : 0) << '\n';
        write_text_file(fs::path(out_dir) / (stem + "_stocks.csv"), detail.str());
    }
}

void write_table1(const std::vector<GroupStatsReport>& reports, const ExperimentConfig& cfg,
                  const std::string& out_dir, const std::string& format) {
    check_format(format);
    fs::create_directories(out_dir);
    const auto stats_json = [](const DescriptiveStats& st) {
        ojson j;
        j["mean"] = st.mean;
        j["stdev"] = st.stdev;
        j["skewness"] = st.skewness;
        j["kurtosis"] = st.kurtosis;
        return j;
    };
    if (want_json(format)) {
        ojson j;
        j["provenance"] = provenance_json(cfg);
        j["reports"] = ojson::array();
        for (const auto& r : reports) {
            ojson jr;
            jr["period"] = r.period;
            jr["group"] = r.group;
            jr["n_stocks"] = r.n_stocks;
            jr["n_obs"] = r.n_obs;
            jr["empty"] = r.empty;
            if (!r.empty) {
                jr["pooled"] = stats_json(r.pooled);
                jr["averaged"] = stats_json(r.averaged);
            }
            j["reports"].push_back(std::move(jr));
        }
        write_text_file(fs::path(out_dir) / "table1.json", j.dump(2) + "\n");
    }
    if (want_csv(format)) {
        std::ostringstream csv;
        csv << "period,group,variant,n_stocks,n_obs,mean,stdev,skewness,kurtosis,empty\n";
        for (const auto& r : reports) {
            const std::pair<const char*, const DescriptiveStats*> variants[] = {
                {"pooled", &r.pooled}, {"averaged", &r.averaged}};
            for (const auto& [name, st] : variants) {
                csv << r.period << ',' << r.group << ',' << name << ',' << r.n_stocks << ','
                    << r.n_obs << ',';
                if (r.empty)
                    csv << ",,,";
                else
                    csv << fmt(st->mean) << ',' << fmt(st->stdev) << ',' << fmt(st->skewness)
                        << ',' << fmt(st->kurtosis);
                csv << ',' << (r.empty ? 1 : 0) << '\n';
            }
        }
        write_text_file(fs::path(out_dir) / "table1.csv", csv.str());
    }
}

void write_table2(const Table2Report& report, const ExperimentConfig& cfg,
                  const std::string& out_dir, const std::string& format) {
    check_format(format);
    fs::create_directories(out_dir);
    if (want_json(format)) {
        ojson j;
        j["provenance"] = provenance_json(cfg);
        j["period"] = report.period;
        j["n_obs"] = report.n_obs;
        j["panels"] = ojson::array();
        for (const auto& p : report.panels) {
            ojson jp;
            jp["name"] = p.name;
            jp["params"] = params_json(p.params);
            if (p.loglik)
                jp["loglik"] = *p.loglik;
            else
                jp["loglik"] = nullptr;
            jp["ks"] = ojson{{"mean_statistic", p.ks.mean_statistic},
                             {"reject_1pct", p.ks.reject_1pct},
                             {"reject_5pct", p.ks.reject_5pct},
                             {"reject_10pct", p.ks.reject_10pct},
                             {"n_reps", p.ks.n_reps}};
            j["panels"].push_back(std::move(jp));
        }
        write_text_file(fs::path(out_dir) / "table2.json", j.dump(2) + "\n");
    }
    if (want_csv(format)) {
        std::ostringstream csv;
        csv << "panel,mu,sigma,nu,alpha,beta,gamma,delta,loglik,"
               "mean_ks_statistic,reject_1pct,reject_5pct,reject_10pct,n_reps\n";
        for (const auto& p : report.panels) {
            std::string mu, sigma, nu, alpha, beta, gamma, delta;
            if (const auto* n = std::get_if<NormalParams>(&p.params)) {
                mu = fmt(n->mu);
                sigma = fmt(n->sigma);
            } else if (const auto* t = std::get_if<StudentTParams>(&p.params)) {
                nu = fmt(t->nu);
                mu = fmt(t->mu);
                sigma = fmt(t->sigma);
            } else {
                const auto& s = std::get<StableParams>(p.params);
                alpha = fmt(s.alpha);
                beta = fmt(s.beta);
                gamma = fmt(s.gamma);
                delta = fmt(s.delta);
            }
            csv << p.name << ',' << mu << ',' << sigma << ',' << nu << ',' << alpha << ','
                << beta << ',' << gamma << ',' << delta << ','
                << (p.loglik ? fmt(*p.loglik) : std::string()) << ','
                << fmt(p.ks.mean_statistic) << ',' << p.ks.reject_1pct << ','
                << p.ks.reject_5pct << ',' << p.ks.reject_10pct << ',' << p.ks.n_reps << '\n';
        }
        write_text_file(fs::path(out_dir) / "table2.csv", csv.str());
    }
}

void write_figure1(const Figure1Output& out, const ExperimentConfig& cfg,
                   const std::string& out_dir, const std::string& format) {
    check_format(format);
    fs::create_directories(out_dir);
    std::vector<std::string> files;
    for (const auto& ds : out.datasets) {
        const std::string hist_name = "fig1_hist_" + ds.name + ".csv";
        write_histogram_csv(ds.hist, (fs::path(out_dir) / hist_name).string());
        files.push_back(hist_name);
        const std::string neg_name = "fig1_ccdf_" + ds.name + "_neg.csv";
        const std::string pos_name = "fig1_ccdf_" + ds.name + "_pos.csv";
        write_ccdf_csv(ds.neg, (fs::path(out_dir) / neg_name).string());
        write_ccdf_csv(ds.pos, (fs::path(out_dir) / pos_name).string());
        files.push_back(neg_name);
        files.push_back(pos_name);
    }
    ojson j;
    j["provenance"] = provenance_json(cfg);
    j["period"] = out.period;
    j["n_obs"] = out.n_obs;
    j["fits"] = ojson{{"normal", params_json(out.normal_fit.params)},
                      {"stable", params_json(out.stable_fit.params)},
                      {"studentt", params_json(out.studentt_fit.params)}};
    j["files"] = files;
    write_text_file(fs::path(out_dir) / "fig1.json", j.dump(2) + "\n");
}

void write_figure2(const Figure2Report& report, const ExperimentConfig& cfg,
                   const std::string& out_dir, const std::string& format) {
    check_format(format);
    fs::create_directories(out_dir);
    if (want_json(format)) {
        ojson j;
        j["provenance"] = provenance_json(cfg);
        j["period"] = report.period;
        j["n_obs"] = report.n_obs;
        j["threshold"] = ojson{
            {"value", report.at_threshold.threshold},
            {"empirical_neg", report.at_threshold.neg},
            {"empirical_pos", report.at_threshold.pos},
            {"normal_per_side", report.normal_tail_at_threshold}};
        j["coverage"] = ojson::array();
        for (const auto& row : report.coverage) {
            ojson jr;
            jr["level"] = row.level;
            jr["threshold"] = row.threshold;
            jr["empirical_central"] = row.central;
            jr["empirical_neg"] = row.neg;
            jr["empirical_pos"] = row.pos;
            jr["normal_central"] = row.level;
            jr["normal_per_side"] = (1.0 - row.level) / 2.0;
            j["coverage"].push_back(std::move(jr));
        }
        write_text_file(fs::path(out_dir) / "fig2.json", j.dump(2) + "\n");
    }
    if (want_csv(format)) {
        std::ostringstream csv;
        csv << "kind,level,threshold,empirical_central,empirical_neg,empirical_pos,"
               "normal_central,normal_per_side\n";
        csv << "threshold,," << fmt(report.at_threshold.threshold) << ','
            << fmt(1.0 - report.at_threshold.neg - report.at_threshold.pos) << ','
            << fmt(report.at_threshold.neg) << ',' << fmt(report.at_threshold.pos) << ",,"
            << fmt(report.normal_tail_at_threshold) << '\n';
        for (const auto& row : report.coverage)
            csv << "coverage," << fmt(row.level) << ',' << fmt(row.threshold) << ','
                << fmt(row.central) << ',' << fmt(row.neg) << ',' << fmt(row.pos) << ','
                << fmt(row.level) << ',' << fmt((1.0 - row.level) / 2.0) << '\n';
        write_text_file(fs::path(out_dir) / "fig2.csv", csv.str());
    }
}

void write_figure3(const std::vector<Figure3Row>& rows, const ExperimentConfig& cfg,
                   const std::string& out_dir, const std::string& format) {
    check_format(format);
    fs::create_directories(out_dir);
    if (want_json(format)) {
        ojson j;
        j["provenance"] = provenance_json(cfg);
        j["rows"] = ojson::array();
        for (const auto& r : rows) {
            ojson jr;
            jr["period"] = r.period;
            jr["kind"] = r.kind;
            jr["n_stocks"] = r.n_stocks;
            jr["empty"] = r.empty;
            if (r.empty) {
                jr["mean_neg"] = nullptr;
                jr["mean_pos"] = nullptr;
                jr["mean_nu"] = nullptr;
            } else {
                jr["mean_neg"] = r.mean_neg;
                jr["mean_pos"] = r.mean_pos;
                jr["mean_nu"] = r.mean_nu;
            }
            j["rows"].push_back(std::move(jr));
        }
        write_text_file(fs::path(out_dir) / "fig3.json", j.dump(2) + "\n");
    }
    if (want_csv(format)) {
        std::ostringstream csv;
        csv << "period,kind,n_stocks,mean_neg,mean_pos,mean_nu,empty\n";
        for (const auto& r : rows) {
            csv << r.period << ',' << r.kind << ',' << r.n_stocks << ',';
            if (r.empty)
                csv << ",,";
            else
                csv << fmt(r.mean_neg) << ',' << fmt(r.mean_pos) << ',' << fmt(r.mean_nu);
            csv << ',' << (r.empty ? 1 : 0) << '\n';
        }
        write_text_file(fs::path(out_dir) / "fig3.csv", csv.str());
    }
}

}  // namespace fattails
