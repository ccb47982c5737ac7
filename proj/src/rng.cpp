// rng.cpp
#include "fattails/rng.hpp"

#include <cmath>
#include <numbers>

#include "fattails/errors.hpp"

namespace fattails {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape))
        throw InvalidParamsError("gamma: shape must be positive");
    if (shape < 1.0) {
        // G(k) = G(k+1) * U^(1/k)
        const double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;  // FNV prime
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view period,
                          std::string_view ticker, std::uint32_t stage) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ hash_label(period));
    h = mix64(h ^ hash_label(ticker));
    h = mix64(h ^ stage);
    return h;
}

}  // namespace fattails
