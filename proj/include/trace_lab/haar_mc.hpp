#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "errors.hpp"
#include "radial.hpp"

namespace trace_lab {

/// Empirical shell histogram from uniform samples of Z_p.
struct HaarSample {
    Prime p;
    int depth;
    std::int64_t count;
    /// counts[k] = number of samples with |y|_p = p^{-k}; counts[depth] holds
    /// the all-zero strings, read as y = 0.
    std::vector<std::int64_t> counts;

    [[nodiscard]] double shell_frequency(int k) const {
        return static_cast<double>(counts.at(static_cast<std::size_t>(k))) / static_cast<double>(count);
    }
    /// Fraction of samples in the ball |y|_p <= p^{-k}.
    [[nodiscard]] double ball_frequency(int k) const {
        std::int64_t c = 0;
        for (std::size_t i = static_cast<std::size_t>(k); i < counts.size(); ++i) c += counts[i];
        return static_cast<double>(c) / static_cast<double>(count);
    }
};

/// Mean and binomial/sample standard error of a functional.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Samples `count` elements of Z_p as base-p digit strings of length `depth`.
/// Only the position of the first nonzero digit matters for radial
/// functionals, so digits after it are not drawn. Digits come from raw
/// mt19937_64 output with rejection, which is reproducible across platforms.
inline HaarSample mc_haar_zp(Prime p, int depth, std::int64_t count, std::uint64_t seed) {
    require(depth >= 1, "mc_haar_zp: depth must be >= 1");
    require(count >= 1, "mc_haar_zp: count must be >= 1");
    std::mt19937_64 rng(seed);
    const std::uint64_t base = p.value();
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % base;
    auto digit = [&] {
        std::uint64_t r;
        do r = rng();
        while (r >= limit);
        return r % base;
    };
    HaarSample out{p, depth, count, std::vector<std::int64_t>(static_cast<std::size_t>(depth) + 1, 0)};
    for (std::int64_t i = 0; i < count; ++i) {
        int k = 0;
        while (k < depth && digit() == 0) ++k;
        ++out.counts[static_cast<std::size_t>(k)];
    }
    return out;
}

/// Empirical mean of g(|y|_p) over the sample, with its standard error.
template <class G>
McEstimate mc_mean(const HaarSample& s, G&& g) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < s.counts.size(); ++k) {
        if (s.counts[k] == 0) continue;
        const bool zero = static_cast<int>(k) == s.depth;
        const double v = g(PAdicNormValue{-static_cast<std::int64_t>(k), zero});
        const auto c = static_cast<double>(s.counts[k]);
        sum += c * v;
        sum_sq += c * v * v;
    }
    const auto n = static_cast<double>(s.count);
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    return {mean, std::sqrt(var / n)};
}

/// Binomial standard error for an empirical frequency.
inline double binomial_std_error(double prob, std::int64_t count) {
    return std::sqrt(prob * (1.0 - prob) / static_cast<double>(count));
}

} // namespace trace_lab
