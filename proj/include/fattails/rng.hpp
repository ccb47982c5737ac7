// rng.hpp
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fattails {

// Deterministic generator for all sampling in the library.
//
// The engine is std::mt19937_64 (fully specified by the standard); every
// variate transform below is implemented here rather than via the standard
// <random> distributions, whose output is implementation-defined.  A given
// seed therefore yields the same stream on any conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on the open interval (0,1), 53-bit resolution.
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the spare half of each pair is cached.
    double normal();

    // Exponential with mean 1.
    double exponential();

    // Gamma(shape, scale 1) via Marsaglia-Tsang squeeze; shape > 0.
    double gamma(double shape);

    // Chi-square with dof degrees of freedom (dof > 0, not necessarily integer).
    double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// splitmix64 finalizer; good 64-bit avalanche mixer.
std::uint64_t mix64(std::uint64_t x);

// FNV-1a hash of a label.
std::uint64_t hash_label(std::string_view s);

// Fans one master seed out into independent per-(period, ticker, stage)
// streams.  Every sampling site in the pipeline derives its seed through
// this function, so results do not depend on scheduling or thread count.
std::uint64_t derive_seed(std::uint64_t master, std::string_view period,
                          std::string_view ticker, std::uint32_t stage);

}  // namespace fattails
