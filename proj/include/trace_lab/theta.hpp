#pragma once

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "quadrature.hpp"
#include "summation.hpp"

namespace trace_lab {

/// theta(t) - 1 = 2 sum_{n>=1} e^{-t pi n^2}, summed until the Gaussian tail
/// (bounded by a geometric series with ratio e^{-t pi (2N+3)}) is below tol.
inline EvalResult theta_minus_one(double t, const ShellSumPlan& plan = {}) {
    require(t > 0.0, "theta: t must be positive");
    const double pi = std::numbers::pi;
    std::int64_t n = 1;
    double tail = 0.0;
    // Find the cutoff first, then sum smallest terms first.
    for (;; ++n) {
        const double next = 2.0 * std::exp(-t * pi * double(n + 1) * double(n + 1));
        const double ratio = std::exp(-t * pi * double(2 * n + 3));
        tail = next / (1.0 - ratio);
        if (tail <= plan.tail_tolerance * 1e-4 || n >= plan.max_terms) break;
    }
    CompensatedSum acc;
    for (std::int64_t k = n; k >= 1; --k) acc.add(2.0 * std::exp(-t * pi * double(k) * double(k)));
    EvalResult r;
    r.value = acc.value();
    r.error_bound = tail;
    r.terms_used = n;
    r.converged = tail <= plan.tail_tolerance;
    return r;
}

/// Jacobi theta: theta(t) = sum_{n in Z} e^{-t pi n^2}.
inline EvalResult theta(double t, const ShellSumPlan& plan = {}) {
    EvalResult r = theta_minus_one(t, plan);
    r.value += 1.0;
    return r;
}

/// |theta(1/t) - sqrt(t) theta(t)|.
inline double theta_functional_defect(double t) {
    require(t > 0.0, "theta: t must be positive");
    ShellSumPlan plan;
    plan.tail_tolerance = 1e-17;
    return std::abs(theta(1.0 / t, plan).value - std::sqrt(t) * theta(t, plan).value);
}

struct ThetaPotentialIntegral {
    /// int_0^inf (theta(t) - 1) dt.
    EvalResult total;
    /// int_1^inf (theta(t) - 1) dt on its own.
    EvalResult upper_part;
    /// 2 sum_{n>=1} e^{-pi n^2} / (pi n^2), the term-wise value of upper_part.
    double upper_part_termwise;
    double reference; // pi / 3
};

/// int_0^inf (theta(t) - 1) dt. On (0, 1] the functional equation
/// theta(t) = t^{-1/2} theta(1/t) and u = 1/t turn the piece into
/// int_1^inf (u^{1/2} theta(u) - 1) u^{-2} du, whose elementary part
/// int_1^inf (u^{-3/2} - u^{-2}) du equals 1. What remains is
/// int_1^inf (theta(u) - 1)(1 + u^{-3/2}) du, integrated numerically.
inline ThetaPotentialIntegral theta_potential_integral(const QuadratureConfig& quad = {}) {
    const double pi = std::numbers::pi;
    ShellSumPlan plan;
    plan.tail_tolerance = 1e-17;
    auto tm1 = [&](double u) { return theta_minus_one(u, plan).value; };
    const double inf = std::numeric_limits<double>::infinity();

    EvalResult upper = integrate(tm1, 1.0, inf, quad);
    EvalResult lower_rest = integrate([&](double u) { return tm1(u) * std::pow(u, -1.5); }, 1.0, inf, quad);

    ThetaPotentialIntegral out;
    out.upper_part = upper;
    out.total.value = 1.0 + upper.value + lower_rest.value;
    out.total.error_bound = upper.error_bound + lower_rest.error_bound;
    out.total.terms_used = upper.terms_used + lower_rest.terms_used;
    out.total.converged = upper.converged && lower_rest.converged;

    CompensatedSum acc;
    for (int n = 40; n >= 1; --n) acc.add(2.0 * std::exp(-pi * n * n) / (pi * n * n));
    out.upper_part_termwise = acc.value();
    out.reference = pi / 3.0;
    return out;
}

} // namespace trace_lab
