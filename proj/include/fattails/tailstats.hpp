// tailstats.hpp
//
// Tail measurement on standardized return series: the fraction of mass
// beyond a fixed threshold, exact-quantile coverage probabilities, and the
// histogram / complementary-CDF exports used for distribution plots.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fattails {

struct TailProbability {
    double threshold = 0.0;
    double neg = 0.0;          // fraction with x < -threshold
    double pos = 0.0;          // fraction with x > +threshold
    std::size_t n_total = 0;
    std::size_t n_neg = 0;
    std::size_t n_pos = 0;
    bool input_ok = true;      // loose standardization check: |mean| < 0.1, sd in [0.5, 2]
};

// Fraction of observations strictly beyond +-threshold.  Boundary values
// count as central.  The input is expected to be standardized; the check is
// loose and only sets input_ok, it never rejects.
TailProbability statistical_probability(const std::vector<double>& x, double threshold);

struct CoverageRow {
    double level = 0.0;      // central coverage target, e.g. 0.99
    double threshold = 0.0;  // standard normal quantile at (1+level)/2
    double central = 0.0;    // 1 - neg - pos, exactly
    double neg = 0.0;
    double pos = 0.0;
};

// Empirical central/tail coverage at exact normal-quantile thresholds,
// one row per requested level (levels in (0,1)).
std::vector<CoverageRow> coverage_probabilities(const std::vector<double>& x,
                                                const std::vector<double>& levels);

struct Histogram {
    std::vector<double> edges;         // nbins + 1, increasing, anchored at min(x)
    std::vector<std::size_t> counts;   // nbins
    std::vector<double> density;       // counts / (n * width); total mass 1
};

// Bin width h = 3.49 * stdev * n^(-1/3); the last bin is closed so the
// maximum is always counted.
Histogram scott_histogram(const std::vector<double>& x);

enum class TailSide { negative, positive };

struct CcdfPoints {
    std::vector<double> magnitude;    // ascending, distinct
    std::vector<double> probability;  // P(|X| >= m on the chosen side), non-increasing, in (0,1]
};

// Rank-from-top survival points for one tail on a log-log-plottable scale:
// one point per distinct magnitude, P = count(side values with |v| >= m) / n_total.
// Zeros belong to neither side.  Throws EmptySideError when the side is empty.
CcdfPoints empirical_ccdf(const std::vector<double>& x, TailSide side);

// CSV exports.  Columns are pinned: "bin_left,bin_right,density" and
// "magnitude,probability".
void write_histogram_csv(const Histogram& h, const std::string& path);
void write_ccdf_csv(const CcdfPoints& c, const std::string& path);

}  // namespace fattails
