#pragma once

#include <cmath>

#include <boost/math/special_functions/bernoulli.hpp>

#include "errors.hpp"

namespace trace_lab {

/// Hurwitz zeta sum_{k>=0} (q + k)^{-s} for s > 1, q > 0, by direct
/// summation up to q + N >= 32 followed by Euler-Maclaurin with eight
/// Bernoulli corrections.
inline double hurwitz_zeta(double s, double q) {
    require(s > 1.0, "hurwitz_zeta: s must exceed 1");
    require(q > 0.0, "hurwitz_zeta: q must be positive");
    double head = 0.0;
    double a = q;
    while (a < 32.0) {
        head += std::pow(a, -s);
        a += 1.0;
    }
    double tail = std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
    double rising = s; // s (s+1) ... (s + 2j - 2)
    double fact = 2.0; // (2j)!
    for (int j = 1; j <= 8; ++j) {
        tail += boost::math::bernoulli_b2n<double>(j) / fact * rising * std::pow(a, -s - 2.0 * j + 1.0);
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    }
    return head + tail;
}

} // namespace trace_lab
