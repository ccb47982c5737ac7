// ingest.cpp
#include "fattails/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include "fattails/errors.hpp"

namespace fattails {

namespace {

constexpr int kMonthDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

bool all_digits(const std::string& s, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

int read_int(const std::string& s, std::size_t lo, std::size_t hi) {
    int v = 0;
    std::from_chars(s.data() + lo, s.data() + hi, v);
    return v;
}

// Days since 1970-01-01 (Gregorian, proleptic).
long civil_to_days(const Date& dt) {
    long y = dt.year;
    y -= dt.month <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        (153u * static_cast<unsigned>(dt.month + (dt.month > 2 ? -3 : 9)) + 2u) / 5u +
        static_cast<unsigned>(dt.day) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

Date days_to_civil(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_positive_field(const std::string& field, std::size_t row, const char* column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
        throw SchemaError("row " + std::to_string(row) + ": cannot parse " + column + " '" +
                              field + "'",
                          row, column);
    return v;
}

std::vector<std::string> read_lines(const std::string& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw MissingFileError("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    if (lines.empty() || lines[0] != header)
        throw SchemaError("'" + path + "': expected header '" + header + "'", 0, "header");
    return lines;
}

}  // namespace

bool is_leap_year(int year) {
    return year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
}

int days_in_month(int year, int month) {
    if (month == 2 && is_leap_year(year)) return 29;
    return kMonthDays[month - 1];
}

Date parse_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !all_digits(text, 0, 4) ||
        !all_digits(text, 5, 7) || !all_digits(text, 8, 10))
        throw SchemaError("malformed date '" + text + "' (want YYYY-MM-DD)", 0, "date");
    const Date d{read_int(text, 0, 4), read_int(text, 5, 7), read_int(text, 8, 10)};
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw SchemaError("impossible date '" + text + "'", 0, "date");
    return d;
}

YearMonth parse_month(const std::string& text) {
    if (text.size() != 7 || text[4] != '-' || !all_digits(text, 0, 4) ||
        !all_digits(text, 5, 7))
        throw SchemaError("malformed month '" + text + "' (want YYYY-MM)", 0, "month");
    const YearMonth m{read_int(text, 0, 4), read_int(text, 5, 7)};
    if (m.month < 1 || m.month > 12)
        throw SchemaError("impossible month '" + text + "'", 0, "month");
    return m;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

std::string format_month(const YearMonth& m) {
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", m.year, m.month);
    return buf;
}

YearMonth year_month(const Date& d) { return {d.year, d.month}; }

Date add_days(const Date& d, int n) { return days_to_civil(civil_to_days(d) + n); }

bool is_weekend(const Date& d) {
    const long z = civil_to_days(d);
    const unsigned wd =
        static_cast<unsigned>(z >= -4 ? (z + 4) % 7 : (z + 5) % 7 + 6);  // 0 = Sunday
    return wd == 0 || wd == 6;
}

std::vector<PriceSeries> load_prices(const std::string& path) {
    const auto lines = read_lines(path, "date,ticker,close");
    struct Row {
        std::size_t row;
        PriceObs obs;
    };
    std::map<std::string, std::vector<Row>> by_ticker;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv(lines[i]);
        if (fields.size() != 3)
            throw SchemaError("row " + std::to_string(i) + ": expected 3 columns, got " +
                                  std::to_string(fields.size()),
                              i, "row");
        Date date;
        try {
            date = parse_date(fields[0]);
        } catch (const SchemaError& e) {
            throw SchemaError("row " + std::to_string(i) + ": " + e.what(), i, "date");
        }
        if (fields[1].empty())
            throw SchemaError("row " + std::to_string(i) + ": empty ticker", i, "ticker");
        const double close = parse_positive_field(fields[2], i, "close");
        if (close <= 0.0)
            throw NonPositivePriceError(
                "row " + std::to_string(i) + ": close " + fields[2] + " for " + fields[1], i);
        by_ticker[fields[1]].push_back({i, {date, close}});
    }
    std::vector<PriceSeries> out;
    out.reserve(by_ticker.size());
    for (auto& [ticker, rows] : by_ticker) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.obs.date < b.obs.date; });
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].obs.date == rows[i - 1].obs.date)
                throw SchemaError("row " + std::to_string(rows[i].row) + ": duplicate date " +
                                      format_date(rows[i].obs.date) + " for " + ticker,
                                  rows[i].row, "date");
        if (rows.size() < 2)
            throw TooShortError("ticker " + ticker + " has fewer than 2 price rows");
        PriceSeries s;
        s.ticker = ticker;
        s.observations.reserve(rows.size());
        for (const auto& r : rows) s.observations.push_back(r.obs);
        out.push_back(std::move(s));
    }
    return out;
}

CapTable load_caps(const std::string& path) {
    const auto lines = read_lines(path, "month,ticker,marketcap");
    CapTable table;
    std::set<std::pair<std::string, YearMonth>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv(lines[i]);
        if (fields.size() != 3)
            throw SchemaError("row " + std::to_string(i) + ": expected 3 columns, got " +
                                  std::to_string(fields.size()),
                              i, "row");
        YearMonth month;
        try {
            month = parse_month(fields[0]);
        } catch (const SchemaError& e) {
            throw SchemaError("row " + std::to_string(i) + ": " + e.what(), i, "month");
        }
        if (fields[1].empty())
            throw SchemaError("row " + std::to_string(i) + ": empty ticker", i, "ticker");
        const double cap = parse_positive_field(fields[2], i, "marketcap");
        if (cap <= 0.0)
            throw NonPositiveCapError(
                "row " + std::to_string(i) + ": marketcap " + fields[2] + " for " + fields[1],
                i);
        if (!seen.insert({fields[1], month}).second)
            throw SchemaError("row " + std::to_string(i) + ": duplicate month " +
                                  format_month(month) + " for " + fields[1],
                              i, "month");
        table.entries.push_back({fields[1], month, cap});
    }
    return table;
}

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.observations.size() < 2)
        throw TooShortError("need at least 2 prices for returns (ticker " + prices.ticker +
                            ")");
    ReturnSeries out;
    out.ticker = prices.ticker;
    out.observations.reserve(prices.observations.size() - 1);
    for (std::size_t i = 1; i < prices.observations.size(); ++i) {
        const double r =
            std::log(prices.observations[i].close) - std::log(prices.observations[i - 1].close);
        out.observations.push_back({prices.observations[i].date, r});
    }
    return out;
}

ReturnSeries slice_period(const ReturnSeries& series, const PeriodSpec& period) {
    const auto lo = std::lower_bound(
        series.observations.begin(), series.observations.end(), period.start,
        [](const ReturnObs& o, const Date& d) { return o.date < d; });
    const auto hi = std::upper_bound(
        series.observations.begin(), series.observations.end(), period.end,
        [](const Date& d, const ReturnObs& o) { return d < o.date; });
    if (lo >= hi)
        throw EmptySliceError("ticker " + series.ticker + " has no observations in period '" +
                              period.label + "'");
    ReturnSeries out;
    out.ticker = series.ticker;
    out.observations.assign(lo, hi);
    return out;
}

CapGroups classify_cap_groups(const CapTable& caps, const PeriodSpec& period,
                              double fraction) {
    if (!(fraction >= 0.0 && fraction <= 0.5))
        throw InvalidParamsError("cap group fraction must lie in [0, 0.5]");
    const YearMonth lo = year_month(period.start);
    const YearMonth hi = year_month(period.end);
    struct Acc {
        double sum = 0.0;
        std::size_t count = 0;
    };
    std::map<std::string, Acc> acc;
    for (const auto& e : caps.entries) {
        if (e.month < lo || hi < e.month) continue;
        auto& a = acc[e.ticker];
        a.sum += e.marketcap;
        a.count += 1;
    }
    if (acc.size() < 3)
        throw InsufficientUniverseError("only " + std::to_string(acc.size()) +
                                        " tickers have caps in period '" + period.label + "'");
    std::vector<std::pair<std::string, double>> ranked;
    ranked.reserve(acc.size());
    for (const auto& [ticker, a] : acc)
        ranked.emplace_back(ticker, a.sum / static_cast<double>(a.count));
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    const std::size_t k =
        static_cast<std::size_t>(fraction * static_cast<double>(ranked.size()));
    CapGroups g;
    for (const auto& [ticker, avg] : ranked) g.all.push_back(ticker);
    g.large.assign(g.all.begin(), g.all.begin() + static_cast<std::ptrdiff_t>(k));
    g.small.assign(g.all.end() - static_cast<std::ptrdiff_t>(k), g.all.end());
    std::sort(g.all.begin(), g.all.end());
    std::sort(g.large.begin(), g.large.end());
    std::sort(g.small.begin(), g.small.end());
    return g;
}

DescriptiveStats descriptive_stats(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 4) throw TooShortError("descriptive stats need at least 4 observations");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double var_unbiased = m2 / static_cast<double>(n - 1);
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    const auto [vlo, vhi] = std::minmax_element(values.begin(), values.end());
    if (m2 == 0.0 || *vlo == *vhi) throw ZeroVarianceError("all observations identical");
    DescriptiveStats st;
    st.mean = mean;
    st.stdev = std::sqrt(var_unbiased);
    st.skewness = m3 / (m2 * std::sqrt(m2));
    st.kurtosis = m4 / (m2 * m2);
    st.n = n;
    return st;
}

DescriptiveStats descriptive_stats(const ReturnSeries& series) {
    std::vector<double> values;
    values.reserve(series.observations.size());
    for (const auto& o : series.observations) values.push_back(o.r);
    return descriptive_stats(values);
}

}  // namespace fattails
