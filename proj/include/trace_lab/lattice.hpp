#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "real_stable.hpp"
#include "special.hpp"
#include "summation.hpp"

namespace trace_lab {

/// A symmetric convolution semigroup on R^d, d <= 3, seen through the
/// lattice Z^d: its symbol eta on Z^d and (where available) its density.
class LatticeLawSpec {
public:
    enum class Kind { gaussian, stable };

    /// Heat kernel t^{-d/2} e^{-pi |x|^2 / t}; eta(n) = pi |n|^2.
    static LatticeLawSpec gaussian(int d = 1) { return LatticeLawSpec(Kind::gaussian, 2.0, std::numbers::pi, d); }
    /// Rotationally invariant stable law; eta(n) = sigma |n|^alpha.
    static LatticeLawSpec stable(double alpha, double sigma, int d = 1) {
        return LatticeLawSpec(Kind::stable, alpha, sigma, d);
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double sigma() const { return sigma_; }
    [[nodiscard]] int dim() const { return d_; }

    [[nodiscard]] double eta_of_norm2(double norm2) const {
        return kind_ == Kind::gaussian ? std::numbers::pi * norm2 : sigma_ * std::pow(norm2, alpha_ / 2.0);
    }

    /// Density on R^d exists in closed or numeric form for gaussians and for d = 1.
    [[nodiscard]] bool has_density() const { return kind_ == Kind::gaussian || d_ == 1; }

    /// Density at a point of R^d.
    [[nodiscard]] EvalResult density(double t, std::span<const double> x, const QuadratureConfig& quad = {}) const {
        if (kind_ == Kind::gaussian) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            EvalResult r;
            r.value = std::pow(t, -0.5 * d_) * std::exp(-std::numbers::pi * r2 / t);
            return r;
        }
        if (d_ != 1) throw CapabilityError("lattice: no density evaluator for stable laws with d > 1");
        return stable_density(StableSymbol(alpha_, sigma_, 1), t, x[0], quad);
    }

private:
    LatticeLawSpec(Kind kind, double alpha, double sigma, int d) : kind_(kind), alpha_(alpha), sigma_(sigma), d_(d) {
        require(d >= 1 && d <= 3, "lattice: dimension must be 1, 2 or 3");
        require(alpha > 0.0 && alpha <= 2.0, "lattice: alpha must lie in (0, 2]");
        require(sigma > 0.0, "lattice: sigma must be positive");
    }

    Kind kind_;
    double alpha_;
    double sigma_;
    int d_;
};

namespace detail {

/// Number of points of Z^d with sup-norm exactly k.
inline double cube_shell_count(int d, std::int64_t k) {
    if (k == 0) return 1.0;
    return std::pow(2.0 * double(k) + 1.0, d) - std::pow(2.0 * double(k) - 1.0, d);
}

/// Bound on sum over |n|_inf > R of e^{-t eta(n)}, using |n| >= |n|_inf.
inline double spectral_tail(const LatticeLawSpec& spec, double t, std::int64_t R) {
    double total = 0.0;
    for (std::int64_t k = R + 1;; ++k) {
        const double term = cube_shell_count(spec.dim(), k) * std::exp(-t * spec.eta_of_norm2(double(k) * double(k)));
        total += term;
        if (term <= 1e-4 * total * 1e-16 || term < 1e-300 || k > R + 100000) break;
    }
    return total;
}

/// Visits every n in the cube [-R, R]^d in lexicographic order.
template <class Visit>
void for_each_in_cube(int d, std::int64_t R, Visit&& visit) {
    std::array<std::int64_t, 3> n{0, 0, 0};
    const std::int64_t lo = -R;
    for (n[0] = lo; n[0] <= R; ++n[0]) {
        if (d == 1) {
            visit(std::span<const std::int64_t>(n.data(), 1));
            continue;
        }
        for (n[1] = lo; n[1] <= R; ++n[1]) {
            if (d == 2) {
                visit(std::span<const std::int64_t>(n.data(), 2));
                continue;
            }
            for (n[2] = lo; n[2] <= R; ++n[2]) visit(std::span<const std::int64_t>(n.data(), 3));
        }
    }
}

inline std::int64_t spectral_radius(const LatticeLawSpec& spec, double t, const ShellSumPlan& plan) {
    std::int64_t R = std::max<std::int64_t>(1, plan.n_max);
    while (spectral_tail(spec, t, R) > plan.tail_tolerance && R < plan.max_terms) R = R < 8 ? R + 1 : R + R / 4;
    return R;
}

} // namespace detail

/// tr(P_t) = sum_{n in Z^d} e^{-t eta(n)}.
inline EvalResult spectral_trace(const LatticeLawSpec& spec, double t, const ShellSumPlan& plan = {}) {
    require(t > 0.0, "spectral_trace: t must be positive");
    const std::int64_t R = detail::spectral_radius(spec, t, plan);
    CompensatedSum acc;
    std::int64_t count = 0;
    detail::for_each_in_cube(spec.dim(), R, [&](std::span<const std::int64_t> n) {
        double r2 = 0.0;
        for (auto v : n) r2 += double(v) * double(v);
        acc.add(std::exp(-t * spec.eta_of_norm2(r2)));
        ++count;
    });
    EvalResult r;
    r.value = acc.value();
    r.error_bound = detail::spectral_tail(spec, t, R);
    r.terms_used = count;
    r.converged = r.error_bound <= plan.tail_tolerance;
    return r;
}

enum class WrapMode { lattice, spectral };

/// Cutoff for the explicit part of a stable lattice sum; beyond it the large-|x| expansion is summed in closed form.
inline constexpr std::int64_t kStableLatticeRadius = 64;

namespace detail {

/// sum over |n| > R of f(x + n) for a d = 1 stable law, via the large-|x|
/// expansion and Hurwitz zeta sums. Returns value and an error estimate
/// (twice the first omitted order).
inline EvalResult stable_lattice_tail(const LatticeLawSpec& spec, double t, double x, std::int64_t R, double tol) {
    EvalResult r;
    if (spec.alpha() == 2.0) {
        // Gaussian tail: f(y) = sqrt(pi/c) e^{-pi^2 y^2/c}, |x + n| >= |n| - 1.
        const double c = spec.sigma() * t;
        const double pi = std::numbers::pi;
        const double a = double(R);
        r.value = 0.0;
        r.error_bound = 2.0 * std::sqrt(pi / c) * std::exp(-pi * pi * a * a / c) /
                        (1.0 - std::exp(-pi * pi * (2.0 * a + 1.0) / c));
        return r;
    }
    const StableSymbol sym(spec.alpha(), spec.sigma(), 1);
    const auto expansion = stable_tail_expansion(sym, t, 24);
    const double q_plus = double(R + 1) + x;
    const double q_minus = double(R + 1) - x;
    CompensatedSum acc;
    double last = 0.0;
    std::size_t k = 0;
    for (; k < expansion.size(); ++k) {
        const auto& term = expansion[k];
        if (term.coefficient == 0.0) continue;
        const double contrib =
            term.coefficient * (hurwitz_zeta(term.power, q_plus) + hurwitz_zeta(term.power, q_minus));
        acc.add(contrib);
        last = std::abs(contrib);
        if (last < tol * 1e-3) break;
    }
    r.value = acc.value();
    r.error_bound = 2.0 * last;
    r.terms_used = static_cast<std::int64_t>(k + 1);
    return r;
}

} // namespace detail

/// Density of the projected law on T^d at x in [0, 1)^d.
///   lattice:  sum_{n in Z^d} f_t(x + n)
///   spectral: sum_{n in Z^d} e^{-t eta(n)} cos(2 pi n.x)
inline EvalResult wrapped_density(const LatticeLawSpec& spec, double t, std::span<const double> x, WrapMode mode,
                                  const ShellSumPlan& plan = {}, const QuadratureConfig& quad = {}) {
    require(t > 0.0, "wrapped_density: t must be positive");
    require(static_cast<int>(x.size()) == spec.dim(), "wrapped_density: point dimension mismatch");
    std::array<double, 3> xr{0, 0, 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(std::isfinite(x[i]), "wrapped_density: point must be finite");
        xr[i] = x[i] - std::floor(x[i]);
    }
    const int d = spec.dim();
    EvalResult r;

    if (mode == WrapMode::spectral) {
        const std::int64_t R = detail::spectral_radius(spec, t, plan);
        CompensatedSum acc;
        detail::for_each_in_cube(d, R, [&](std::span<const std::int64_t> n) {
            double r2 = 0.0;
            double phase = 0.0;
            for (int i = 0; i < d; ++i) {
                r2 += double(n[i]) * double(n[i]);
                phase += double(n[i]) * xr[i];
            }
            phase -= std::floor(phase);
            acc.add(std::exp(-t * spec.eta_of_norm2(r2)) * boost::math::cos_pi(2.0 * phase));
            ++r.terms_used;
        });
        r.value = acc.value();
        r.error_bound = detail::spectral_tail(spec, t, R);
        r.converged = r.error_bound <= plan.tail_tolerance;
        return r;
    }

    if (!spec.has_density()) throw CapabilityError("wrapped_density: lattice mode needs a density evaluator");

    if (spec.kind() == LatticeLawSpec::Kind::gaussian) {
        // |x + n| >= |n|_inf - 1 for x in [0,1)^d.
        const double pi = std::numbers::pi;
        auto tail = [&](std::int64_t R) {
            double total = 0.0;
            for (std::int64_t k = R + 1; k < R + 10000; ++k) {
                const double term = detail::cube_shell_count(d, k) * std::pow(t, -0.5 * d) *
                                    std::exp(-pi * double(k - 1) * double(k - 1) / t);
                total += term;
                if (term < 1e-300 || term < total * 1e-20) break;
            }
            return total;
        };
        std::int64_t R = std::max<std::int64_t>(1, plan.n_max);
        while (tail(R) > plan.tail_tolerance && R < plan.max_terms) ++R;
        CompensatedSum acc;
        detail::for_each_in_cube(d, R, [&](std::span<const std::int64_t> n) {
            std::array<double, 3> y{0, 0, 0};
            for (int i = 0; i < d; ++i) y[i] = xr[i] + double(n[i]);
            acc.add(spec.density(t, std::span<const double>(y.data(), d)).value);
            ++r.terms_used;
        });
        r.value = acc.value();
        r.error_bound = tail(R);
        r.converged = r.error_bound <= plan.tail_tolerance;
        return r;
    }

    // d = 1 stable: explicit terms for |n| <= R, expansion for the rest.
    const std::int64_t R = kStableLatticeRadius;
    const auto count = static_cast<std::size_t>(2 * R + 1);
    const auto values = parallel_map(count, [&](std::size_t i) {
        const double y = xr[0] + double(static_cast<std::int64_t>(i) - R);
        return spec.density(t, std::span<const double>(&y, 1), quad);
    });
    CompensatedSum acc;
    double quad_error = 0.0;
    bool ok = true;
    for (const auto& v : values) {
        acc.add(v.value);
        quad_error += v.error_bound;
        ok = ok && v.converged;
    }
    const EvalResult tail = detail::stable_lattice_tail(spec, t, xr[0], R, plan.tail_tolerance);
    acc.add(tail.value);
    r.value = acc.value();
    r.error_bound = quad_error + tail.error_bound;
    r.terms_used = static_cast<std::int64_t>(count) + tail.terms_used;
    r.converged = ok;
    return r;
}

inline EvalResult wrapped_density(const LatticeLawSpec& spec, double t, double x, WrapMode mode,
                                  const ShellSumPlan& plan = {}, const QuadratureConfig& quad = {}) {
    return wrapped_density(spec, t, std::span<const double>(&x, 1), mode, plan, quad);
}

/// Both sides of F_t(0) = tr(P_t).
struct TraceReport {
    double t = 0.0;
    EvalResult lattice;
    EvalResult spectral;
    double defect = 0.0;
    /// Sum of the two sides' error bounds.
    double combined_bound = 0.0;
};

inline TraceReport trace_defect(const LatticeLawSpec& spec, double t, const ShellSumPlan& plan = {},
                                const QuadratureConfig& quad = {}) {
    require(spec.has_density(), "trace_defect: law has no density evaluator");
    const std::vector<double> origin(static_cast<std::size_t>(spec.dim()), 0.0);
    TraceReport rep;
    rep.t = t;
    rep.lattice = wrapped_density(spec, t, origin, WrapMode::lattice, plan, quad);
    rep.spectral = spectral_trace(spec, t, plan);
    rep.defect = std::abs(rep.lattice.value - rep.spectral.value);
    rep.combined_bound = rep.lattice.error_bound + rep.spectral.error_bound;
    return rep;
}

/// int_0^inf (F_t(0) - 1) dt = sum_{n != 0} 1/eta(n) on the circle.
struct PotentialIdentity {
    bool diverged = false;
    EvalResult value;
    double reference = 0.0;
    double defect = 0.0;
};

/// Term-wise integration of the spectral side: each e^{-t eta(n)} integrates
/// to 1/eta(n), so the total is (2/sigma) sum_{n>=1} n^{-alpha}. The sum is
/// taken to N terms with an Euler-Maclaurin tail; the reference is
/// 2 zeta(alpha)/sigma. For alpha <= 1 the sum diverges.
inline PotentialIdentity potential_identity(const LatticeLawSpec& spec, std::int64_t terms = 1000) {
    require(spec.dim() == 1, "potential_identity: implemented on the circle (d = 1)");
    PotentialIdentity out;
    const double alpha = spec.alpha();
    if (alpha <= 1.0) {
        out.diverged = true;
        return out;
    }
    const double sigma = spec.sigma();
    CompensatedSum acc;
    for (std::int64_t n = terms; n >= 1; --n) acc.add(2.0 / (sigma * std::pow(double(n), alpha)));
    const double tail = 2.0 / sigma * hurwitz_zeta(alpha, double(terms + 1));
    acc.add(tail);
    out.value.value = acc.value();
    out.value.error_bound = 1e-13 * out.value.value;
    out.value.terms_used = terms;
    out.reference = spec.kind() == LatticeLawSpec::Kind::gaussian ? std::numbers::pi / 3.0
                                                                  : 2.0 * boost::math::zeta(alpha) / sigma;
    out.defect = std::abs(out.value.value - out.reference);
    return out;
}

/// Centered finite-difference residual of dF/dt - (1/4 pi) d^2F/dx^2 for the
/// wrapped heat kernel on the circle.
inline double heat_equation_residual(double t, double x, double h) {
    require(t > h && h > 0.0, "heat_equation_residual: need t > h > 0");
    ShellSumPlan plan;
    plan.tail_tolerance = 1e-17;
    const auto spec = LatticeLawSpec::gaussian(1);
    auto F = [&](double tt, double xx) { return wrapped_density(spec, tt, xx, WrapMode::spectral, plan).value; };
    const double dt = (F(t + h, x) - F(t - h, x)) / (2.0 * h);
    const double dxx = (F(t, x + h) - 2.0 * F(t, x) + F(t, x - h)) / (h * h);
    return std::abs(dt - dxx / (4.0 * std::numbers::pi));
}

} // namespace trace_lab
