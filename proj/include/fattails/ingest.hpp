// ingest.hpp
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fattails {

// Calendar day. Comparisons are plain lexicographic (year, month, day).
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;
    friend auto operator<=>(const Date&, const Date&) = default;
};

struct YearMonth {
    int year = 0;
    int month = 0;
    friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

// Strict "YYYY-MM-DD" / "YYYY-MM"; rejects impossible calendar dates.
Date parse_date(const std::string& text);
YearMonth parse_month(const std::string& text);
std::string format_date(const Date& d);
std::string format_month(const YearMonth& m);
YearMonth year_month(const Date& d);

Date add_days(const Date& d, int n);
bool is_weekend(const Date& d);

struct PriceObs {
    Date date;
    double close = 0.0;
};

// Dates strictly increasing, all closes > 0, at least 2 observations.
struct PriceSeries {
    std::string ticker;
    std::vector<PriceObs> observations;
};

struct ReturnObs {
    Date date;
    double r = 0.0;
};

struct ReturnSeries {
    std::string ticker;
    std::vector<ReturnObs> observations;
};

// Inclusive [start, end] window.
struct PeriodSpec {
    std::string label;
    Date start;
    Date end;
};

struct CapEntry {
    std::string ticker;
    YearMonth month;
    double marketcap = 0.0;
};

struct CapTable {
    std::vector<CapEntry> entries;
};

// Ticker sets, each sorted lexicographically.
struct CapGroups {
    std::vector<std::string> all;
    std::vector<std::string> large;
    std::vector<std::string> small;
};

struct DescriptiveStats {
    double mean = 0.0;
    double stdev = 0.0;     // n-1 denominator
    double skewness = 0.0;  // m3 / m2^(3/2), n-denominator central moments
    double kurtosis = 0.0;  // m4 / m2^2, non-excess (normal = 3)
    std::size_t n = 0;
};

// CSV with header "date,ticker,close". One series per ticker, each sorted by
// date. Throws MissingFileError, SchemaError (row 0 = header; duplicate dates
// report the later row), NonPositivePriceError, TooShortError (< 2 rows for a
// ticker).
std::vector<PriceSeries> load_prices(const std::string& path);

// CSV with header "month,ticker,marketcap"; months as "YYYY-MM". Entries keep
// file order. Throws MissingFileError, SchemaError (duplicate (ticker, month)
// reports the later row), NonPositiveCapError.
CapTable load_caps(const std::string& path);

// r_t = ln P_t - ln P_{t-1}; each return dated by the later observation.
ReturnSeries log_returns(const PriceSeries& prices);

// Observations with start <= date <= end. Throws EmptySliceError if none.
ReturnSeries slice_period(const ReturnSeries& series, const PeriodSpec& period);

// Rank tickers by their average monthly cap over the months the period
// touches (year_month(start) <= m <= year_month(end)); the top `fraction`
// go to `large`, the bottom `fraction` to `small`, sizes floor(fraction * n).
// Average ties are broken by ticker order. Throws InsufficientUniverseError
// when fewer than 3 tickers have an in-period entry.
CapGroups classify_cap_groups(const CapTable& caps, const PeriodSpec& period,
                              double fraction = 0.4);

DescriptiveStats descriptive_stats(const std::vector<double>& values);
DescriptiveStats descriptive_stats(const ReturnSeries& series);

}  // namespace fattails
