// pipeline.hpp
//
// End-to-end experiment driver: load a stock universe, slice periods, form
// capitalization groups, measure tail fatness per stock (raw returns or
// volatility-filter residuals), trim, aggregate, and write JSON/CSV reports.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fattails/estim.hpp"
#include "fattails/garch.hpp"
#include "fattails/ingest.hpp"
#include "fattails/kstest.hpp"
#include "fattails/tailstats.hpp"

namespace fattails {

// How stocks are trimmed before group averaging:
//   per_statistic - each reported column independently drops its own top and
//                   bottom trim_fraction of stocks (default);
//   shared        - one stock set, ranked by the negative-tail statistic,
//                   is used for every column.
enum class TrimMode { per_statistic, shared };

struct ExperimentConfig {
    std::string prices_path = "prices.csv";
    std::string caps_path = "caps.csv";
    std::string market_ticker = "MARKET";
    std::vector<PeriodSpec> periods;  // first entry is the full-span period
    double cap_fraction = 0.40;       // top/bottom share per cap group
    double trim_fraction = 0.05;      // per side, of measured stocks
    TrimMode trim_mode = TrimMode::per_statistic;
    double tail_threshold = 2.58;
    std::vector<double> coverage_levels = {0.90, 0.95, 0.99};
    int ks_reps = 100;
    std::size_t ks_sample_size = 0;  // 0 = match the empirical length
    std::uint64_t master_seed = 20150630;
    std::size_t min_observations = 100;
    std::size_t arma_grid_max = 2;    // ar, ma, p, q range over 1..max
    std::size_t egarch_grid_max = 3;  // p, q range over 1..max
};

// The eight experiment windows: the full span, the two-way split around the
// 1997 crisis, the three-way split, and the 2007-2009 crisis sub-split.
ExperimentConfig default_config();

// Parse a JSON config file. Missing keys keep their defaults; unknown keys
// (top-level or nested) are ConfigError; all invariants are validated
// (fractions in (0, 0.5), threshold > 0, non-empty periods with start <=
// end and unique labels, grid maxima >= 1, ks_reps >= 1).
ExperimentConfig load_config(const std::string& path);

// Canonical JSON serialization of a config (used for the report digest).
std::string config_to_json(const ExperimentConfig& cfg);

// FNV-1a hex digest of the canonical config serialization.
std::string config_digest(const ExperimentConfig& cfg);

// Loaded universe: per-ticker daily log returns, the market index series
// (empty ticker if absent), and the cap table.
struct MarketData {
    std::vector<ReturnSeries> stocks;  // market ticker excluded, sorted by ticker
    ReturnSeries market;
    CapTable caps;
};

MarketData load_market_data(const ExperimentConfig& cfg);

// z = (x - mean) / sd with the n-1 standard deviation.
std::vector<double> standardize(const std::vector<double>& x);

// One measured stock within a (period, group) report.
struct StockRow {
    std::string ticker;
    std::size_t n_obs = 0;
    double neg = 0.0;  // statistical probability below -threshold
    double pos = 0.0;  // statistical probability above +threshold
    double nu = 0.0;   // fitted t degrees of freedom
    std::string model;  // volatility filter label; empty in raw-return reports
    bool in_neg = true;  // survived the trim for the neg column
    bool in_pos = true;
    bool in_nu = true;
};

struct ExclusionTally {
    std::size_t data = 0;         // missing/short/degenerate period series
    std::size_t convergence = 0;  // filter or t fit did not converge
};

struct GroupTailReport {
    std::string period;
    std::string group;  // "all" | "large" | "small"
    std::size_t universe = 0;    // group tickers eligible in the period
    std::size_t n_measured = 0;  // stocks with computed statistics (= rows)
    std::size_t n_stocks = 0;    // per-column count after trimming
    std::size_t trimmed_per_side = 0;
    double mean_neg = 0.0;
    double mean_pos = 0.0;
    double mean_nu = 0.0;
    std::vector<StockRow> stocks;
    ExclusionTally excluded;
    bool empty = false;  // fewer than 3 measured stocks
};

enum class ModelFamily { garch11, best_arma_garch, best_egarch };

std::string to_string(ModelFamily family);

// Raw-return tail reports: one per (period, group). jobs <= 0 uses all
// hardware threads; results are identical for any jobs value.
std::vector<GroupTailReport> run_table3(const ExperimentConfig& cfg, const MarketData& data,
                                        int jobs = 0);

// Same protocol on standardized residuals of the selected filter family.
std::vector<GroupTailReport> run_table4(const ExperimentConfig& cfg, const MarketData& data,
                                        ModelFamily family, int jobs = 0);

// Descriptive statistics per (period, group), both pooled across stocks and
// averaged over per-stock statistics.
struct GroupStatsReport {
    std::string period;
    std::string group;
    std::size_t n_stocks = 0;
    std::size_t n_obs = 0;  // pooled observation count
    DescriptiveStats pooled;
    DescriptiveStats averaged;  // arithmetic means of per-stock statistics
    bool empty = false;
};

std::vector<GroupStatsReport> run_table1(const ExperimentConfig& cfg, const MarketData& data,
                                         int jobs = 0);

// Market-series distribution comparison: fitted parameters for all three
// models plus Monte-Carlo KS rejection tallies against the empirical data.
struct Table2Panel {
    std::string name;  // "normal" | "stable" | "studentt"
    DistParams params;
    std::optional<double> loglik;
    KsSimResult ks;
};

struct Table2Report {
    std::string period;
    std::size_t n_obs = 0;
    std::vector<Table2Panel> panels;
};

Table2Report run_table2(const ExperimentConfig& cfg, const std::vector<double>& market_returns);

// Market-series central/tail comparison: fit the three models, draw
// matched-size samples, standardize everything, and export histograms and
// per-side CCDF point sets.
struct Figure1Dataset {
    std::string name;  // "empirical" | "normal" | "stable" | "studentt"
    Histogram hist;
    CcdfPoints neg;
    CcdfPoints pos;
};

struct Figure1Output {
    std::string period;
    std::size_t n_obs = 0;
    FitResult normal_fit;
    FitResult stable_fit;
    FitResult studentt_fit;
    std::vector<Figure1Dataset> datasets;  // empirical first
};

Figure1Output run_figure1(const ExperimentConfig& cfg, const std::vector<double>& market_returns);

// Market-series tail calibration against the standard normal: the
// fixed-threshold statistical probability plus exact-quantile coverage rows,
// each paired with its theoretical normal benchmark.
struct Figure2Report {
    std::string period;
    std::size_t n_obs = 0;
    TailProbability at_threshold;
    double normal_tail_at_threshold = 0.0;  // Phi(-threshold)
    std::vector<CoverageRow> coverage;      // empirical, exact-quantile thresholds
};

Figure2Report run_figure2(const ExperimentConfig& cfg, const std::vector<double>& market_returns);

// Per-period raw vs GARCH(1,1)-filtered tail summary for the all-stocks
// group, including empty-window degradation.
struct Figure3Row {
    std::string period;
    std::string kind;  // "raw" | "filtered"
    std::size_t n_stocks = 0;
    double mean_neg = 0.0;
    double mean_pos = 0.0;
    double mean_nu = 0.0;
    bool empty = false;
};

std::vector<Figure3Row> run_figure3(const ExperimentConfig& cfg, const MarketData& data,
                                    int jobs = 0);

// Synthetic-universe generator for the test oracles. Writes prices.csv,
// caps.csv and config.json (single full-span period) into out_dir. Stock
// returns follow GARCH(1,1) volatility when clustered = true, i.i.d. draws
// otherwise; innovations are scaled t(nu) when nu > 2, normal when nu == 0.
// The market index gets its own independent series. Deterministic in seed.
struct SyntheticSpec {
    std::size_t n_stocks = 50;
    std::size_t n_days = 6000;  // returns per stock
    bool clustered = true;
    double t_nu = 4.0;  // 0 = normal innovations
    double mu = 0.0003;
    double d = 4e-6;
    double beta = 0.88;
    double gamma = 0.10;
};

void write_synthetic_universe(const std::string& out_dir, const SyntheticSpec& spec,
                              std::uint64_t seed);

// Report writers: each emits <stem>.json and, for formats containing csv,
// the CSV twin(s). format is "json", "csv" or "both".
void write_tail_reports(const std::vector<GroupTailReport>& reports, const ExperimentConfig& cfg,
                        const std::string& out_dir, const std::string& stem,
                        const std::string& format);
void write_table1(const std::vector<GroupStatsReport>& reports, const ExperimentConfig& cfg,
                  const std::string& out_dir, const std::string& format);
void write_table2(const Table2Report& report, const ExperimentConfig& cfg,
                  const std::string& out_dir, const std::string& format);
void write_figure1(const Figure1Output& out, const ExperimentConfig& cfg,
                   const std::string& out_dir, const std::string& format);
void write_figure2(const Figure2Report& report, const ExperimentConfig& cfg,
                   const std::string& out_dir, const std::string& format);
void write_figure3(const std::vector<Figure3Row>& rows, const ExperimentConfig& cfg,
                   const std::string& out_dir, const std::string& format);

}  // namespace fattails
