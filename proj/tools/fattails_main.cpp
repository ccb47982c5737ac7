// fattails_main.cpp
//
// Batch front end: validate a data set, emit the tabular and plot-data
// reports, or generate synthetic universes. Exit codes: 0 success, 1 data or
// numeric failure, 2 usage/config error.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fattails/errors.hpp"
#include "fattails/pipeline.hpp"

namespace {

using namespace fattails;

std::vector<double> full_span_market(const ExperimentConfig& cfg, const MarketData& data) {
    if (data.market.observations.empty())
        throw EmptyInputError("market series '" + cfg.market_ticker +
                              "' not found in the price file");
    const ReturnSeries sliced = slice_period(data.market, cfg.periods.front());
    std::vector<double> r;
    r.reserve(sliced.observations.size());
    for (const auto& o : sliced.observations) r.push_back(o.r);
    return r;
}

ModelFamily parse_family(const std::string& name) {
    if (name == "garch11") return ModelFamily::garch11;
    if (name == "best_arma_garch") return ModelFamily::best_arma_garch;
    return ModelFamily::best_egarch;
}

void print_ingest_summary(const ExperimentConfig& cfg, const MarketData& data) {
    std::size_t n_obs = 0;
    Date lo{9999, 12, 31}, hi{0, 1, 1};
    for (const auto& s : data.stocks) {
        n_obs += s.observations.size();
        if (!s.observations.empty()) {
            lo = std::min(lo, s.observations.front().date);
            hi = std::max(hi, s.observations.back().date);
        }
    }
    std::printf("prices: %zu stock series, %zu returns", data.stocks.size(), n_obs);
    if (n_obs > 0)
        std::printf(" (%s .. %s)", format_date(lo).c_str(), format_date(hi).c_str());
    std::printf("\n");
    if (data.market.observations.empty())
        std::printf("market: '%s' not present\n", cfg.market_ticker.c_str());
    else
        std::printf("market: %s, %zu returns\n", data.market.ticker.c_str(),
                    data.market.observations.size());
    std::set<std::string> cap_tickers;
    YearMonth mlo{9999, 12}, mhi{0, 1};
    for (const auto& e : data.caps.entries) {
        cap_tickers.insert(e.ticker);
        mlo = std::min(mlo, e.month);
        mhi = std::max(mhi, e.month);
    }
    std::printf("caps: %zu entries, %zu tickers", data.caps.entries.size(),
                cap_tickers.size());
    if (!data.caps.entries.empty())
        std::printf(" (%s .. %s)", format_month(mlo).c_str(), format_month(mhi).c_str());
    std::printf("\n");
    std::printf("periods: %zu configured, full span = %s (%s .. %s)\n", cfg.periods.size(),
                cfg.periods.front().label.c_str(),
                format_date(cfg.periods.front().start).c_str(),
                format_date(cfg.periods.front().end).c_str());
    std::printf("config digest: %s\n", config_digest(cfg).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fat-tail analysis of daily return distributions"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string config_path;
    std::string out_dir = "out";
    std::string format = "both";
    std::uint64_t seed = 0;
    int jobs = 0;
    app.add_option("--config", config_path, "experiment config JSON (defaults built in)");
    auto* seed_opt = app.add_option("--seed", seed, "override the config master seed");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--format", format, "report file format")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();
    app.add_option("--jobs", jobs, "worker threads, 0 = all cores")
        ->capture_default_str();

    app.add_subcommand("ingest", "load and validate the configured data set");
    app.add_subcommand("table1", "descriptive statistics per period and cap group");
    app.add_subcommand("table2", "market-series distribution comparison with KS tallies");
    app.add_subcommand("table3", "raw-return tail statistics per period and cap group");
    auto* t4 = app.add_subcommand(
        "table4", "volatility-filtered tail statistics per period and cap group");
    std::string model = "garch11";
    t4->add_option("--model", model, "volatility filter family")
        ->check(CLI::IsMember({"garch11", "best_arma_garch", "best_egarch"}))
        ->capture_default_str();
    app.add_subcommand("appendix",
                       "filtered tail statistics for both best-fit filter families");
    app.add_subcommand("fig1", "density and tail plot data for the market series");
    app.add_subcommand("fig2", "normal-benchmark tail calibration for the market series");
    app.add_subcommand("fig3", "per-period raw vs filtered tail summary");
    auto* sim = app.add_subcommand("simulate", "generate a synthetic universe into --out");
    std::size_t sim_stocks = 50;
    std::size_t sim_days = 6000;
    double sim_nu = 4.0;
    std::string sim_model = "garch";
    sim->add_option("--stocks", sim_stocks, "number of stocks")->capture_default_str();
    sim->add_option("--days", sim_days, "returns per stock")->capture_default_str();
    sim->add_option("--nu", sim_nu, "innovation t degrees of freedom, 0 = normal")
        ->capture_default_str();
    sim->add_option("--model", sim_model, "volatility structure")
        ->check(CLI::IsMember({"garch", "iid"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    fattails::ExperimentConfig cfg;
    try {
        cfg = config_path.empty() ? fattails::default_config()
                                  : fattails::load_config(config_path);
    } catch (const fattails::Error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    if (seed_opt->count() > 0) cfg.master_seed = seed;

    try {

        if (command == "simulate") {
            fattails::SyntheticSpec spec;
            spec.n_stocks = sim_stocks;
            spec.n_days = sim_days;
            spec.clustered = sim_model == "garch";
            spec.t_nu = sim_nu;
            fattails::write_synthetic_universe(out_dir, spec, cfg.master_seed);
            std::printf("wrote %zu-stock universe (%s, nu=%g) to %s\n", spec.n_stocks,
                        sim_model.c_str(), spec.t_nu, out_dir.c_str());
            return 0;
        }

        const fattails::MarketData data = fattails::load_market_data(cfg);
        if (command == "ingest") {
            print_ingest_summary(cfg, data);
        } else if (command == "table1") {
            fattails::write_table1(fattails::run_table1(cfg, data, jobs), cfg, out_dir,
                                   format);
        } else if (command == "table2") {
            fattails::write_table2(fattails::run_table2(cfg, full_span_market(cfg, data)),
                                   cfg, out_dir, format);
        } else if (command == "table3") {
            fattails::write_tail_reports(fattails::run_table3(cfg, data, jobs), cfg, out_dir,
                                         "table3", format);
        } else if (command == "table4") {
            const fattails::ModelFamily family = parse_family(model);
            const std::string stem = family == fattails::ModelFamily::garch11
                                         ? "table4"
                                         : "table4_" + fattails::to_string(family);
            fattails::write_tail_reports(fattails::run_table4(cfg, data, family, jobs), cfg,
                                         out_dir, stem, format);
        } else if (command == "appendix") {
            for (const auto family : {fattails::ModelFamily::best_arma_garch,
                                      fattails::ModelFamily::best_egarch})
                fattails::write_tail_reports(
                    fattails::run_table4(cfg, data, family, jobs), cfg, out_dir,
                    "table4_" + fattails::to_string(family), format);
        } else if (command == "fig1") {
            fattails::write_figure1(fattails::run_figure1(cfg, full_span_market(cfg, data)),
                                    cfg, out_dir, format);
        } else if (command == "fig2") {
            fattails::write_figure2(fattails::run_figure2(cfg, full_span_market(cfg, data)),
                                    cfg, out_dir, format);
        } else if (command == "fig3") {
            fattails::write_figure3(fattails::run_figure3(cfg, data, jobs), cfg, out_dir,
                                    format);
        }
    } catch (const fattails::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const fattails::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
