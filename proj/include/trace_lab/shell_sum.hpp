#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "summation.hpp"

namespace trace_lab::detail {

/// base * p^{-m} * 2^{-|m|}, computed in logs and clamped to a positive finite range.
inline double shell_scaled_tolerance(double base, double p, std::int64_t m) {
    const double md = static_cast<double>(m);
    const double v = base * std::exp(-md * std::log(p) - std::abs(md) * std::numbers::ln2);
    return std::clamp(v, 1e-300, 1e300);
}

/// Inclusive index range actually summed.
struct Window {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

/// Sums term(n) over an integer window that grows from [lo, hi] toward
/// -infinity (when open_below) and +infinity (when open_above) until the
/// geometric tail estimate on each open side is below half the tolerance.
/// The final sum runs in ascending n so the result does not depend on how
/// the window was discovered.
template <class Term>
EvalResult shell_series(Term&& term, std::int64_t lo, std::int64_t hi, bool open_below, bool open_above,
                        const ShellSumPlan& plan, Window* window = nullptr) {
    plan.validate();
    const double side_tol = (open_below && open_above) ? plan.tail_tolerance / 2 : plan.tail_tolerance;
    double below = 0.0;
    double above = 0.0;
    auto count = [&] { return hi - lo + 1; };

    if (open_below) {
        while (true) {
            below = geometric_tail_bound(term(lo - 1), term(lo - 2));
            if (below <= side_tol || count() >= plan.max_terms) break;
            --lo;
        }
    }
    if (open_above) {
        while (true) {
            above = geometric_tail_bound(term(hi + 1), term(hi + 2));
            if (above <= side_tol || count() >= plan.max_terms) break;
            ++hi;
        }
    }

    if (window) *window = {lo, hi};
    CompensatedSum acc;
    for (std::int64_t n = lo; n <= hi; ++n) acc.add(term(n));

    EvalResult r;
    r.value = acc.value();
    r.error_bound = below + above;
    r.terms_used = count();
    r.converged = std::isfinite(r.value) && r.error_bound <= plan.tail_tolerance;
    return r;
}

} // namespace trace_lab::detail
