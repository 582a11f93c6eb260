#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "padic.hpp"
#include "shell_sum.hpp"
#include "summation.hpp"

namespace trace_lab {

/// A function of |y|_p only, evaluated on a norm value p^n or 0.
using RadialFunction = std::function<double(const PAdicNormValue&)>;

enum class RadialDomain { unit_ball, full };

/// Haar mass of the shell {|y|_p = p^n}, with Z_p normalized to mass one.
inline double shell_measure(Prime p, std::int64_t n) {
    return p.pow(static_cast<double>(n)) * (1.0 - 1.0 / p.as_double());
}

/// Integral of a radial function over Z_p or Q_p, summed shell by shell.
template <class G>
EvalResult integrate_radial(G&& g, Prime p, RadialDomain domain, const ShellSumPlan& plan = {}) {
    auto term = [&](std::int64_t n) {
        const double v = g(PAdicNormValue{n, false});
        return v == 0.0 ? 0.0 : v * shell_measure(p, n);
    };
    if (domain == RadialDomain::unit_ball) {
        const std::int64_t lo = std::min<std::int64_t>(plan.n_min, 0);
        return detail::shell_series(term, lo, 0, true, false, plan);
    }
    return detail::shell_series(term, plan.n_min, plan.n_max, true, true, plan);
}

/// Integral of chi_1(x y) over the ball |y|_p <= p^n: p^n when |x|_p <= p^{-n}, else 0.
inline double ball_char_integral(Prime p, std::int64_t n, const PAdicNormValue& x) {
    if (x.is_zero || x.exponent <= -n) return p.pow(static_cast<double>(n));
    return 0.0;
}

/// Integral of chi_1(x y) over the shell |y|_p = p^n (difference of two ball integrals):
///   p^n (1 - 1/p)  if |x|_p <= p^{-n}
///   -p^{n-1}       if |x|_p == p^{-n+1}
///   0              otherwise.
inline double shell_char_integral(Prime p, std::int64_t n, const PAdicNormValue& x) {
    if (x.is_zero || x.exponent <= -n) return shell_measure(p, n);
    if (x.exponent == -n + 1) return -p.pow(static_cast<double>(n - 1));
    return 0.0;
}

inline double shell_char_integral(Prime p, std::int64_t n, const Rational& x) {
    return shell_char_integral(p, n, padic_norm(x, p));
}

/// Closed-form evaluations of the integrals of exp(-tau |y|_p^gamma) over Z_p and Q_p.
namespace maxstab {

/// Integral over Z_p: (p-1)/p * sum_{n>=0} exp(-tau p^{-n gamma}) / p^n.
inline EvalResult unit_ball(Prime p, double gamma, double tau, double tol = 1e-15) {
    require(gamma > 0 && tau > 0, "maxstab: gamma and tau must be positive");
    const double pd = p.as_double();
    CompensatedSum acc;
    std::int64_t n = 0;
    // Terms are bounded by p^{-n}; stop once the geometric remainder is negligible.
    for (;; ++n) {
        const double w = std::pow(pd, -static_cast<double>(n));
        acc.add(std::exp(-tau * std::pow(pd, -static_cast<double>(n) * gamma)) * w);
        if (w / (pd - 1.0) < tol) break;
    }
    EvalResult r;
    r.value = (pd - 1.0) / pd * acc.value();
    r.error_bound = std::pow(pd, -static_cast<double>(n + 1));
    r.terms_used = n + 1;
    return r;
}

/// How to read the weight psi(p, n) in the series for the integral over Q_p.
enum class PsiReading {
    /// psi = 1/p for every n; reproduces the shell-by-shell iteration exactly.
    iteration,
    /// psi as displayed: 1/p (n < 0), exp(-tau p^gamma) (n > 0), their sum (n = 0).
    as_displayed,
};

inline double psi(Prime p, std::int64_t n, double gamma, double tau, PsiReading reading) {
    const double inv = 1.0 / p.as_double();
    if (reading == PsiReading::iteration || n < 0) return inv;
    const double e = std::exp(-tau * std::pow(p.as_double(), gamma));
    return n == 0 ? inv + e : e;
}

/// Integral over Q_p: (p-1) * sum_{n in Z} psi(p,n) p^n exp(-tau p^{n gamma}).
inline EvalResult full(Prime p, double gamma, double tau, PsiReading reading = PsiReading::iteration,
                       double tol = 1e-15) {
    require(gamma > 0 && tau > 0, "maxstab: gamma and tau must be positive");
    const double pd = p.as_double();
    auto term = [&](std::int64_t n) {
        const double nd = static_cast<double>(n);
        return (pd - 1.0) * psi(p, n, gamma, tau, reading) *
               std::exp(nd * std::log(pd) - tau * std::pow(pd, nd * gamma));
    };
    // Negative n: weights p^{n-1}(p-1) sum to at most p^{lo}; positive n: super-exponential decay.
    std::int64_t lo = 0;
    while (std::pow(pd, static_cast<double>(lo)) > tol) --lo;
    std::int64_t hi = 0;
    while (std::abs(term(hi + 1)) > tol * 1e-3 || hi < 2) ++hi;
    CompensatedSum acc;
    for (std::int64_t n = lo; n <= hi; ++n) acc.add(term(n));
    EvalResult r;
    r.value = acc.value();
    r.error_bound = std::pow(pd, static_cast<double>(lo)) + 2.0 * std::abs(term(hi + 1));
    r.terms_used = hi - lo + 1;
    return r;
}

} // namespace maxstab

} // namespace trace_lab
