// tailstats.cpp
#include "fattails/tailstats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "fattails/dist.hpp"
#include "fattails/errors.hpp"

namespace fattails {

namespace {

void check_finite(const std::vector<double>& x, const char* who) {
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidParamsError(std::string(who) + ": non-finite value");
}

struct MeanSd {
    double mean, sd;  // sd with n-1 denominator
};

MeanSd mean_sd(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    const double mean = s / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = x.size() > 1 ? std::sqrt(ss / (static_cast<double>(x.size()) - 1.0)) : 0.0;
    return {mean, sd};
}

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

TailProbability statistical_probability(const std::vector<double>& x, double threshold) {
    if (x.empty()) throw EmptyInputError("statistical_probability: empty input");
    if (!(threshold > 0.0) || !std::isfinite(threshold))
        throw InvalidParamsError("statistical_probability: threshold must be positive");
    check_finite(x, "statistical_probability");

    TailProbability res;
    res.threshold = threshold;
    res.n_total = x.size();
    for (double v : x) {
        if (v < -threshold)
            ++res.n_neg;
        else if (v > threshold)
            ++res.n_pos;
    }
    const double n = static_cast<double>(res.n_total);
    res.neg = static_cast<double>(res.n_neg) / n;
    res.pos = static_cast<double>(res.n_pos) / n;
    const MeanSd ms = mean_sd(x);
    res.input_ok = std::fabs(ms.mean) < 0.1 && ms.sd >= 0.5 && ms.sd <= 2.0;
    return res;
}

std::vector<CoverageRow> coverage_probabilities(const std::vector<double>& x,
                                                const std::vector<double>& levels) {
    if (x.empty()) throw EmptyInputError("coverage_probabilities: empty input");
    check_finite(x, "coverage_probabilities");
    std::vector<CoverageRow> rows;
    rows.reserve(levels.size());
    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0))
            throw InvalidParamsError("coverage_probabilities: level must be in (0,1)");
        CoverageRow row;
        row.level = level;
        row.threshold = normal_quantile(0.5 * (1.0 + level));
        std::size_t nneg = 0, npos = 0;
        for (double v : x) {
            if (v < -row.threshold)
                ++nneg;
            else if (v > row.threshold)
                ++npos;
        }
        const double n = static_cast<double>(x.size());
        row.neg = static_cast<double>(nneg) / n;
        row.pos = static_cast<double>(npos) / n;
        row.central = 1.0 - row.neg - row.pos;
        rows.push_back(row);
    }
    return rows;
}

Histogram scott_histogram(const std::vector<double>& x) {
    if (x.size() < 2) throw TooShortError("scott_histogram: need at least 2 observations");
    check_finite(x, "scott_histogram");
    const MeanSd ms = mean_sd(x);
    const auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
    if (!(ms.sd > 0.0) || *xlo == *xhi)
        throw ZeroVarianceError("scott_histogram: zero variance");

    const double n = static_cast<double>(x.size());
    const double h = 3.49 * ms.sd * std::pow(n, -1.0 / 3.0);
    const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    const double mn = *mn_it, mx = *mx_it;
    const std::size_t nbins =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((mx - mn) / h)));

    Histogram hist;
    hist.edges.resize(nbins + 1);
    for (std::size_t i = 0; i <= nbins; ++i)
        hist.edges[i] = mn + h * static_cast<double>(i);
    hist.counts.assign(nbins, 0);
    for (double v : x) {
        std::size_t idx = static_cast<std::size_t>((v - mn) / h);
        if (idx >= nbins) idx = nbins - 1;  // the last bin is closed at the top
        ++hist.counts[idx];
    }
    hist.density.resize(nbins);
    for (std::size_t i = 0; i < nbins; ++i)
        hist.density[i] = static_cast<double>(hist.counts[i]) / (n * h);
    return hist;
}

CcdfPoints empirical_ccdf(const std::vector<double>& x, TailSide side) {
    if (x.empty()) throw EmptyInputError("empirical_ccdf: empty input");
    check_finite(x, "empirical_ccdf");

    std::vector<double> mags;
    for (double v : x) {
        if (side == TailSide::positive && v > 0.0) mags.push_back(v);
        if (side == TailSide::negative && v < 0.0) mags.push_back(-v);
    }
    if (mags.empty())
        throw EmptySideError(side == TailSide::positive
                                 ? "empirical_ccdf: no positive observations"
                                 : "empirical_ccdf: no negative observations");
    std::sort(mags.begin(), mags.end());

    // One point per distinct magnitude; P = count(side |v| >= m) / n_total.
    const double n = static_cast<double>(x.size());
    CcdfPoints pts;
    std::size_t i = 0;
    while (i < mags.size()) {
        std::size_t j = i;
        while (j < mags.size() && mags[j] == mags[i]) ++j;
        pts.magnitude.push_back(mags[i]);
        pts.probability.push_back(static_cast<double>(mags.size() - i) / n);
        i = j;
    }
    return pts;
}

void write_histogram_csv(const Histogram& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MissingFileError("cannot open for writing: " + path);
    out << "bin_left,bin_right,density\n";
    for (std::size_t i = 0; i < h.density.size(); ++i)
        out << fmt(h.edges[i]) << ',' << fmt(h.edges[i + 1]) << ',' << fmt(h.density[i])
            << '\n';
}

void write_ccdf_csv(const CcdfPoints& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MissingFileError("cannot open for writing: " + path);
    out << "magnitude,probability\n";
    for (std::size_t i = 0; i < c.magnitude.size(); ++i)
        out << fmt(c.magnitude[i]) << ',' << fmt(c.probability[i]) << '\n';
}

}  // namespace fattails
