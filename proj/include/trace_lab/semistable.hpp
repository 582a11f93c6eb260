#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "detail/mp_real.hpp"
#include "gamma_p.hpp"
#include "padic.hpp"
#include "radial.hpp"
#include "shell_sum.hpp"

namespace trace_lab {

/// Rotationally invariant gamma-semistable law on Q_p with Fourier transform
/// exp(-C t |y|_p^gamma). Scaling x -> p x maps mu_t to mu_{p^{-gamma} t}.
struct SemistableLaw {
    Prime p;
    double gamma;
    double C;

    SemistableLaw(Prime p_, double gamma_, double C_) : p(p_), gamma(gamma_), C(C_) {
        require(gamma > 0.0 && std::isfinite(gamma), "semistable law: gamma must be positive");
        require(C > 0.0 && std::isfinite(C), "semistable law: C must be positive");
    }

    /// |y|_p^gamma for a norm value.
    [[nodiscard]] double norm_power(const PAdicNormValue& y) const {
        return y.is_zero ? 0.0 : p.pow(static_cast<double>(y.exponent) * gamma);
    }
};

inline double char_fn(const SemistableLaw& law, double t, const PAdicNormValue& y) {
    require(t >= 0.0, "char_fn: t must be nonnegative");
    return std::exp(-law.C * t * law.norm_power(y));
}

inline double char_fn(const SemistableLaw& law, double t, const Rational& y) {
    return char_fn(law, t, padic_norm(y, law.p));
}

enum class DensityMethod { series, shell };

namespace detail {

/// Multiplies by an MPFR constant, using the linear-time variants when the
/// constant is a small integer or an exact double.
class Multiplier {
public:
    explicit Multiplier(const MpReal& v) : v_(v) {
        const mpfr_srcptr r = v_.get();
        if (mpfr_integer_p(r) && mpfr_fits_slong_p(r, MPFR_RNDN)) {
            kind_ = Kind::slong;
            si_ = mpfr_get_si(r, MPFR_RNDN);
        } else if (mpfr_cmp_d(r, mpfr_get_d(r, MPFR_RNDN)) == 0) {
            kind_ = Kind::dbl;
            d_ = mpfr_get_d(r, MPFR_RNDN);
        }
    }
    void apply(MpReal& x) const {
        switch (kind_) {
        case Kind::slong: mpfr_mul_si(x.get(), x.get(), si_, MPFR_RNDN); break;
        case Kind::dbl: mpfr_mul_d(x.get(), x.get(), d_, MPFR_RNDN); break;
        case Kind::full: mpfr_mul(x.get(), x.get(), v_.get(), MPFR_RNDN); break;
        }
    }

private:
    enum class Kind { full, slong, dbl };
    MpReal v_;
    Kind kind_ = Kind::full;
    long si_ = 0;
    double d_ = 0.0;
};

} // namespace detail

/// Density by the convergent series
///   f_t(x) = sum_{n>=0} (-1)^n/n! (Ct)^n |x|_p^{-(n gamma + 1)} Gamma_p(n gamma + 1),  x != 0.
///
/// Terms reach size ~ e^X with X = Ct (p/|x|_p)^gamma before the factorial
/// takes over, while the sum is O(1); the series is therefore evaluated in
/// MPFR with enough guard bits to absorb the cancellation. The tail after n
/// uses |Gamma_p(s)| <= p^{s-1}: |term_n| <= |x|^{-1} X^n / n!.
inline EvalResult density_series(const SemistableLaw& law, double t, const PAdicNormValue& x,
                                 const ShellSumPlan& plan = {}) {
    require(t > 0.0, "density: t must be positive");
    require(!x.is_zero, "density: the series expansion requires x != 0");
    using detail::MpReal;

    const double ct = law.C * t;
    const double pd = law.p.as_double();
    const double e = static_cast<double>(x.exponent); // |x| = p^e
    const double log_x_inv = -e * std::log(pd);
    const double X = ct * std::pow(pd, (1.0 - e) * law.gamma);
    const double log2e = 1.4426950408889634;

    // Guard bits: peak term magnitude, the result scale, and term count.
    const double n_est = std::max(16.0, 3.0 * X + 64.0);
    const double peak_bits = std::max(0.0, X * log2e + log_x_inv * log2e);
    const auto bits = static_cast<mpfr_prec_t>(std::ceil(112.0 + peak_bits + std::log2(n_est) +
                                                         std::max(0.0, -log_x_inv * log2e)));

    auto make = [&](double v) { return MpReal(bits, v); };
    // ratio_a = -Ct |x|^{-gamma}; ratio_b = ratio_a * p^gamma = -X; q_step = p^{-gamma}
    MpReal pg = make(pd);
    {
        MpReal g = make(law.gamma);
        mpfr_pow(pg.get(), pg.get(), g.get(), MPFR_RNDN);
    }
    MpReal xg = make(pd);
    {
        MpReal ex = make(law.gamma);
        mpfr_mul_d(ex.get(), ex.get(), -e, MPFR_RNDN);
        mpfr_pow(xg.get(), xg.get(), ex.get(), MPFR_RNDN); // |x|^{-gamma}
    }
    MpReal ratio_a = make(ct);
    mpfr_mul(ratio_a.get(), ratio_a.get(), xg.get(), MPFR_RNDN);
    mpfr_neg(ratio_a.get(), ratio_a.get(), MPFR_RNDN);
    MpReal ratio_b = ratio_a;
    mpfr_mul(ratio_b.get(), ratio_b.get(), pg.get(), MPFR_RNDN);
    const detail::Multiplier mul_a(ratio_a);
    const detail::Multiplier mul_b(ratio_b);
    MpReal q_step = make(1.0);
    mpfr_div(q_step.get(), q_step.get(), pg.get(), MPFR_RNDN);
    const detail::Multiplier mul_q(q_step);

    MpReal a = make(pd);
    mpfr_pow_si(a.get(), a.get(), -x.exponent, MPFR_RNDN); // |x|^{-1}
    MpReal b = a;
    MpReal q = make(1.0 / pd); // p^{-n gamma - 1}
    MpReal sum = make(0.0);
    MpReal diff(bits);
    MpReal denom(bits);
    bool q_negligible = false;

    const double tol = plan.tail_tolerance;
    const std::int64_t cap = std::max<std::int64_t>(plan.max_terms, 64);
    double tail = std::numeric_limits<double>::infinity();
    std::int64_t n = 0;
    for (n = 1; n <= cap; ++n) {
        mul_a.apply(a);
        mpfr_div_ui(a.get(), a.get(), static_cast<unsigned long>(n), MPFR_RNDN);
        mul_b.apply(b);
        mpfr_div_ui(b.get(), b.get(), static_cast<unsigned long>(n), MPFR_RNDN);
        mpfr_sub(diff.get(), a.get(), b.get(), MPFR_RNDN); // a_n (1 - p^{n gamma})
        if (!q_negligible) {
            mul_q.apply(q);
            if (q.exponent2() < -bits - 4) {
                q_negligible = true;
            } else {
                mpfr_ui_sub(denom.get(), 1, q.get(), MPFR_RNDN);
                mpfr_div(diff.get(), diff.get(), denom.get(), MPFR_RNDN);
            }
        }
        mpfr_add(sum.get(), sum.get(), diff.get(), MPFR_RNDN);

        // Remainder after term n: |x|^{-1} sum_{k>n} X^k/k!, bounded geometrically once k > X.
        const double k = static_cast<double>(n + 1);
        if (n >= 3 && k + 1.0 > 2.0 * X) {
            const double log_next = log_x_inv + k * std::log(X) - std::lgamma(k + 1.0);
            tail = std::exp(log_next) / (1.0 - X / (k + 1.0));
            if (tail < tol) break;
        }
    }

    EvalResult r;
    r.value = mpfr_get_d(sum.get(), MPFR_RNDN);
    const double rounding = std::ldexp(1.0, static_cast<int>(peak_bits) + 4 - static_cast<int>(bits)) *
                            static_cast<double>(n + 1);
    r.error_bound = tail + rounding + std::abs(r.value) * 0x1p-52;
    r.terms_used = std::min(n, cap);
    r.converged = tail < tol;
    return r;
}

/// Density by Fourier inversion over shells,
///   f_t(x) = sum_n exp(-Ct p^{n gamma}) * (integral of chi_1(x y) over |y| = p^n).
/// For x != 0 the shell integrals sum to zero, so exp(.) - 1 is summed
/// instead; the shells above |y| = p|x|^{-1} vanish identically.
inline EvalResult density_shell(const SemistableLaw& law, double t, const PAdicNormValue& x,
                                const ShellSumPlan& plan = {}) {
    require(t > 0.0, "density: t must be positive");
    const double ct = law.C * t;
    if (x.is_zero) {
        auto g = [&](const PAdicNormValue& y) { return std::exp(-ct * law.norm_power(y)); };
        return integrate_radial(g, law.p, RadialDomain::full, plan);
    }
    auto term = [&](std::int64_t n) {
        const double w = shell_char_integral(law.p, n, x);
        if (w == 0.0) return 0.0;
        return std::expm1(-ct * law.p.pow(static_cast<double>(n) * law.gamma)) * w;
    };
    const std::int64_t top = -x.exponent + 1;
    return detail::shell_series(term, std::min(plan.n_min, top), top, true, false, plan);
}

inline EvalResult density(const SemistableLaw& law, double t, const PAdicNormValue& x, DensityMethod method,
                          const ShellSumPlan& plan = {}) {
    return method == DensityMethod::series ? density_series(law, t, x, plan) : density_shell(law, t, x, plan);
}

inline EvalResult density(const SemistableLaw& law, double t, const Rational& x, DensityMethod method,
                          const ShellSumPlan& plan = {}) {
    return density(law, t, padic_norm(x, law.p), method, plan);
}

struct MassCheck {
    EvalResult mass;
    double min_density = std::numeric_limits<double>::infinity();
    std::int64_t min_density_exponent = 0;
    std::int64_t shells_scanned = 0;
};

/// Total mass of the shell-mode density over Q_p, integrated shell by shell.
/// Inner density tolerances shrink with the shell mass so the accumulated
/// inner error stays below half the tail tolerance.
inline MassCheck mass_check(const SemistableLaw& law, double t, const ShellSumPlan& plan = {}) {
    require(t > 0.0, "mass_check: t must be positive");
    const double half = plan.tail_tolerance / 2;
    const double pd = law.p.as_double();
    double inner_error = 0.0;
    MassCheck out;

    auto density_at = [&](std::int64_t m) {
        ShellSumPlan inner = plan;
        inner.tail_tolerance = detail::shell_scaled_tolerance(half / 3.0, pd, m);
        return density_shell(law, t, PAdicNormValue{m, false}, inner);
    };
    auto term = [&](std::int64_t m) {
        const double f = density_at(m).value;
        return f == 0.0 ? 0.0 : f * shell_measure(law.p, m);
    };

    ShellSumPlan outer = plan;
    outer.tail_tolerance = half;
    detail::Window window;
    EvalResult mass = detail::shell_series(term, plan.n_min, plan.n_max, true, true, outer, &window);

    for (std::int64_t m = window.lo; m <= window.hi; ++m) {
        const EvalResult f = density_at(m);
        inner_error += f.error_bound * shell_measure(law.p, m);
        if (f.value < out.min_density) {
            out.min_density = f.value;
            out.min_density_exponent = m;
        }
    }
    out.shells_scanned = window.hi - window.lo + 1;
    mass.error_bound += inner_error;
    mass.converged = mass.converged && mass.error_bound <= plan.tail_tolerance;
    out.mass = mass;
    return out;
}

} // namespace trace_lab
