#pragma once

#include <cmath>

#include "errors.hpp"
#include "radial.hpp"

namespace trace_lab {

enum class GammaMode { closed, shell_oracle };

/// Gel'fand-Graev gamma function Gamma_p(s) = (1 - p^{s-1}) / (1 - p^{-s}) for real s.
inline double gamma_p_closed(Prime p, double s) {
    if (s == 0.0) throw PoleError("Gamma_p has a pole at s = 0");
    const double pd = p.as_double();
    // expm1 keeps accuracy for s near 0 and 1.
    const double log_p = std::log(pd);
    return std::expm1((s - 1.0) * log_p) / std::expm1(-s * log_p);
}

/// Gamma_p(s) as the shell series of int_{Q_p} chi_1(x) |x|_p^{s-1} dx.
/// Shells above |x|_p = p vanish; below, the series converges for s > 0.
inline EvalResult gamma_p_shell(Prime p, double s, const ShellSumPlan& plan = {}) {
    require(s > 0.0 && s < 1.0, "Gamma_p shell oracle requires 0 < s < 1");
    const PAdicNormValue one{0, false};
    auto term = [&](std::int64_t n) {
        if (n > 1) return 0.0;
        return p.pow(static_cast<double>(n) * (s - 1.0)) * shell_char_integral(p, n, one);
    };
    return detail::shell_series(term, std::min<std::int64_t>(plan.n_min, 0), 1, true, false, plan);
}

inline EvalResult gamma_p(Prime p, double s, GammaMode mode, const ShellSumPlan& plan = {}) {
    if (mode == GammaMode::shell_oracle) return gamma_p_shell(p, s, plan);
    EvalResult r;
    r.value = gamma_p_closed(p, s);
    r.terms_used = 1;
    return r;
}

} // namespace trace_lab
