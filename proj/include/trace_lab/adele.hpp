#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/miller_rabin.hpp>

#include "errors.hpp"
#include "padic.hpp"
#include "quadrature.hpp"
#include "radial.hpp"
#include "rational.hpp"
#include "real_stable.hpp"
#include "semistable.hpp"
#include "shell_sum.hpp"

namespace trace_lab {

namespace detail {

/// Removes every prime in `primes` from n.
inline BigInt strip_primes(BigInt n, const std::set<std::uint64_t>& primes) {
    if (n < 0) n = -n;
    for (auto p : primes) {
        if (n == 0) break;
        strip_factor(n, p);
    }
    return n;
}

/// Prime factors of |n|, by trial division up to 10^6 and a probable-prime
/// test on what remains.
inline std::set<std::uint64_t> prime_factors(BigInt n) {
    std::set<std::uint64_t> out;
    if (n < 0) n = -n;
    require(n != 0, "prime_factors: zero has no factorisation");
    for (std::uint64_t d = 2; d <= 1000000 && BigInt(d) * d <= n; d += (d == 2 ? 1 : 2)) {
        if (n % d == 0) {
            out.insert(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) {
        require(n <= std::numeric_limits<std::uint64_t>::max() && boost::multiprecision::miller_rabin_test(n, 25),
                "prime_factors: cofactor too large to factor by trial division");
        out.insert(n.convert_to<std::uint64_t>());
    }
    return out;
}

inline std::set<std::uint64_t> support_primes(const Rational& q) {
    std::set<std::uint64_t> out;
    if (q.is_zero()) return out;
    out = prime_factors(q.num());
    auto d = prime_factors(q.den());
    out.insert(d.begin(), d.end());
    return out;
}

} // namespace detail

/// A point of the adele ring with finitely many explicit p-adic components.
/// Every other component equals `fill`, which must lie in Z_p at those primes;
/// the default fill 0 is the "unspecified" reading.
struct AdelePoint {
    Rational real;
    std::map<std::uint64_t, Rational> finite;
    Rational fill;

    AdelePoint() = default;
    AdelePoint(Rational real_, std::map<std::uint64_t, Rational> finite_ = {}, Rational fill_ = {})
        : real(std::move(real_)), finite(std::move(finite_)), fill(std::move(fill_)) {
        validate();
    }

    /// The rational q embedded diagonally.
    static AdelePoint diagonal(const Rational& q) {
        std::map<std::uint64_t, Rational> f;
        for (auto p : detail::prime_factors(q.den())) f.emplace(p, q);
        return {q, f, q};
    }

    [[nodiscard]] Rational component(std::uint64_t p) const {
        auto it = finite.find(p);
        return it == finite.end() ? fill : it->second;
    }

    [[nodiscard]] std::set<std::uint64_t> explicit_primes() const {
        std::set<std::uint64_t> s;
        for (const auto& [p, v] : finite) s.insert(p);
        return s;
    }

    void validate() const {
        for (const auto& [p, v] : finite) require(is_prime(p), "adele point: component key " + std::to_string(p) + " is not prime");
        require(detail::strip_primes(fill.den(), explicit_primes()) == 1,
                "adele point: fill value must be integral at every implicit prime");
    }

    friend AdelePoint operator+(const AdelePoint& a, const AdelePoint& b) {
        std::map<std::uint64_t, Rational> f;
        for (const auto& [p, v] : a.finite) f[p] = v + b.component(p);
        for (const auto& [p, v] : b.finite)
            if (!f.contains(p)) f[p] = a.component(p) + v;
        return {a.real + b.real, f, a.fill + b.fill};
    }
};

/// An idele with finitely many explicit components; every other component
/// equals `fill`, which must be a unit at those primes (default 1).
struct Idele {
    Rational real{1};
    std::map<std::uint64_t, Rational> finite;
    Rational fill{1};

    Idele() = default;
    Idele(Rational real_, std::map<std::uint64_t, Rational> finite_ = {}, Rational fill_ = Rational(1))
        : real(std::move(real_)), finite(std::move(finite_)), fill(std::move(fill_)) {
        validate();
    }

    static Idele from_real(double r) { return Idele(Rational::from_double(r)); }

    /// q != 0 embedded diagonally: explicit at every prime dividing q.
    static Idele diagonal(const Rational& q) {
        require(!q.is_zero(), "idele: diagonal embedding needs q != 0");
        std::map<std::uint64_t, Rational> f;
        for (auto p : detail::support_primes(q)) f.emplace(p, q);
        return {q, f, q};
    }

    [[nodiscard]] Rational component(std::uint64_t p) const {
        auto it = finite.find(p);
        return it == finite.end() ? fill : it->second;
    }

    [[nodiscard]] std::set<std::uint64_t> explicit_primes() const {
        std::set<std::uint64_t> s;
        for (const auto& [p, v] : finite) s.insert(p);
        return s;
    }

    void validate() const {
        require(!real.is_zero(), "idele: real component must be nonzero");
        require(!fill.is_zero(), "idele: fill must be nonzero");
        for (const auto& [p, v] : finite) {
            require(is_prime(p), "idele: component key " + std::to_string(p) + " is not prime");
            require(!v.is_zero(), "idele: components must be nonzero");
        }
        const auto s = explicit_primes();
        require(detail::strip_primes(fill.num(), s) == 1 && detail::strip_primes(fill.den(), s) == 1,
                "idele: fill must be a unit at every implicit prime");
    }

    friend Idele operator*(const Idele& a, const Idele& b) {
        std::map<std::uint64_t, Rational> f;
        for (const auto& [p, v] : a.finite) f[p] = v * b.component(p);
        for (const auto& [p, v] : b.finite)
            if (!f.contains(p)) f[p] = a.component(p) * v;
        return {a.real * b.real, f, a.fill * b.fill};
    }

    [[nodiscard]] Idele inverse() const {
        std::map<std::uint64_t, Rational> f;
        for (const auto& [p, v] : finite) f[p] = v.inverse();
        return {real.inverse(), f, fill.inverse()};
    }

    /// a x, component-wise.
    [[nodiscard]] AdelePoint act(const AdelePoint& x) const {
        std::map<std::uint64_t, Rational> f;
        for (const auto& [p, v] : finite) f[p] = v * x.component(p);
        for (const auto& [p, v] : x.finite)
            if (!f.contains(p)) f[p] = component(p) * v;
        return {real * x.real, f, fill * x.fill};
    }
};

/// ||a|| = |a_inf| prod_p |a_p|_p, exactly.
inline Rational idele_norm(const Idele& a) {
    Rational out = a.real.abs();
    for (const auto& [p, v] : a.finite) out *= padic_norm(v, Prime(p)).exact(Prime(p));
    return out;
}

/// e^{-2 pi i x_inf y_inf} prod_p chi_{y_p}(x_p). Only primes explicit in x or
/// y can contribute; elsewhere both components are integral.
inline UnitComplex adele_char(const AdelePoint& y, const AdelePoint& x) {
    UnitComplex out = UnitComplex::from_turns(-(x.real * y.real));
    std::set<std::uint64_t> primes = x.explicit_primes();
    for (const auto& [p, v] : y.finite) primes.insert(p);
    for (auto p : primes) out = out * char_qp(y.component(p), x.component(p), Prime(p));
    return out;
}

/// Real factor of a Bruhat-Schwartz function.
struct RealFactor {
    enum class Kind { gaussian, stable };
    Kind kind = Kind::gaussian;
    double alpha = 2.0;
    double sigma = std::numbers::pi;
    double t = 1.0;

    static RealFactor gaussian(double t) { return {Kind::gaussian, 2.0, std::numbers::pi, t}; }
    static RealFactor stable(double alpha, double sigma, double t) { return {Kind::stable, alpha, sigma, t}; }

    void validate() const {
        require(t > 0.0, "real factor: t must be positive");
        if (kind == Kind::stable) StableSymbol(alpha, sigma);
    }

    [[nodiscard]] EvalResult density(double x, const QuadratureConfig& quad = {}) const {
        if (kind == Kind::gaussian) {
            EvalResult r;
            r.value = gaussian_density(t, x);
            return r;
        }
        return stable_density(StableSymbol(alpha, sigma), t, x, quad);
    }

    [[nodiscard]] double transform(double y) const {
        return kind == Kind::gaussian ? gaussian_transform(t, y) : stable_transform(StableSymbol(alpha, sigma), t, y);
    }
};

struct SemistableFactor {
    double gamma = 1.0;
    double C = 1.0;
    double t = 1.0;
};

/// f = f_inf x prod_{p in S} (semistable density) x prod_{p not in S} 1_{Z_p}.
struct BruhatSchwartzSpec {
    RealFactor real;
    std::map<std::uint64_t, SemistableFactor> S;

    void validate() const {
        real.validate();
        for (const auto& [p, f] : S) {
            SemistableLaw(Prime(p), f.gamma, f.C);
            require(f.t > 0.0, "Bruhat-Schwartz spec: t must be positive");
        }
    }

    [[nodiscard]] SemistableLaw law(std::uint64_t p) const {
        const auto& f = S.at(p);
        return {Prime(p), f.gamma, f.C};
    }

    [[nodiscard]] std::set<std::uint64_t> primes() const {
        std::set<std::uint64_t> s;
        for (const auto& [p, f] : S) s.insert(p);
        return s;
    }
};

enum class BsSide { density, transform };

/// Density or transform side of a Bruhat-Schwartz product at a point.
inline EvalResult bs_eval(const BruhatSchwartzSpec& spec, const AdelePoint& x, BsSide side,
                          const ShellSumPlan& plan = {}, const QuadratureConfig& quad = {}) {
    spec.validate();
    EvalResult r;
    double value = 1.0;
    double rel_err = 0.0;

    // Primes outside S contribute indicators of Z_p; only explicit ones can fail.
    // The fill lies in Z_p at implicit primes by construction.
    for (const auto& [p, v] : x.finite) {
        if (spec.S.contains(p)) continue;
        if (padic_norm(v, Prime(p)).exponent > 0 && !v.is_zero()) {
            r.value = 0.0;
            r.converged = true;
            return r;
        }
    }

    if (side == BsSide::transform) {
        value *= spec.real.transform(x.real.to_double());
        for (const auto& [p, f] : spec.S) value *= char_fn(spec.law(p), f.t, x.component(p));
    } else {
        const EvalResult re = spec.real.density(x.real.to_double(), quad);
        value *= re.value;
        if (re.value != 0.0) rel_err += re.error_bound / std::abs(re.value);
        r.converged = re.converged;
        for (const auto& [p, f] : spec.S) {
            const EvalResult d = density_shell(spec.law(p), f.t, padic_norm(x.component(p), Prime(p)), plan);
            value *= d.value;
            if (d.value != 0.0) rel_err += d.error_bound / std::abs(d.value);
            r.converged = r.converged && d.converged;
            r.terms_used += d.terms_used;
        }
    }
    r.value = value;
    r.error_bound = std::abs(value) * rel_err;
    return r;
}

/// Component-wise results of scaling f by an idele a: f_a(x) = ||a|| f(a x).
struct ScaledBruhatSchwartz {
    BruhatSchwartzSpec spec;
    Idele a;
    Rational norm;

    [[nodiscard]] EvalResult operator()(const AdelePoint& x, const ShellSumPlan& plan = {}) const {
        EvalResult r = bs_eval(spec, a.act(x), BsSide::density, plan);
        r.value *= norm.to_double();
        r.error_bound *= norm.to_double();
        return r;
    }

    /// f^(a^{-1} y), the expected transform of f_a.
    [[nodiscard]] double transform_expected(const AdelePoint& y) const {
        return bs_eval(spec, a.inverse().act(y), BsSide::transform).value;
    }
};

struct ComponentCheck {
    std::string place; // "inf" or the prime
    EvalResult value;
};

struct ScalingReport {
    ScaledBruhatSchwartz scaled;
    /// Total mass as the product of component masses.
    EvalResult mass;
    std::vector<ComponentCheck> component_masses;
    /// Grid of diagonal points y and the two sides of f_a^(y) = f^(a^{-1} y).
    std::vector<Rational> grid;
    std::vector<EvalResult> transform_numeric;
    std::vector<double> transform_expected;
    double max_transform_defect = 0.0;
};

namespace detail {

/// int_{Q_p} |a|_p g(|a x|_p) chi_y(x) dx for a radial g given on norm
/// exponents; g also receives the absolute tolerance it should meet.
template <class G>
EvalResult scaled_padic_transform(G&& g, Prime p, std::int64_t a_exp, const PAdicNormValue& y,
                                  const ShellSumPlan& plan) {
    // On the shell |x| = p^m, |a x| = p^{m + a_exp}.
    const double anorm = p.pow(static_cast<double>(a_exp));
    auto term = [&](std::int64_t m) {
        const double w = y.is_zero ? shell_measure(p, m) : shell_char_integral(p, m, y);
        if (w == 0.0) return 0.0;
        // Inner tolerance shrinks with the shell weight, as in mass_check.
        const double inner = shell_scaled_tolerance(plan.tail_tolerance * 1e-2 / anorm, p.as_double(), m);
        const double v = g(m + a_exp, inner);
        return v == 0.0 ? 0.0 : anorm * v * w;
    };
    if (y.is_zero) return shell_series(term, plan.n_min - a_exp, plan.n_max - a_exp, true, true, plan);
    const std::int64_t top = -y.exponent + 1;
    return shell_series(term, std::min(plan.n_min - a_exp, top), top, true, false, plan);
}

} // namespace detail

/// Mass and Fourier scaling checks for f_a. Real component by quadrature,
/// primes in S by shell sums of the density, other primes exactly.
inline ScalingReport scale_by_idele(const BruhatSchwartzSpec& spec, const Idele& a, std::vector<Rational> grid = {},
                                    const ShellSumPlan& plan = {}, const QuadratureConfig& quad = {}) {
    spec.validate();
    a.validate();
    ScalingReport rep{{spec, a, idele_norm(a)}, {}, {}, std::move(grid), {}, {}, 0.0};
    if (rep.grid.empty())
        for (int k = -10; k < 10; ++k) rep.grid.emplace_back(BigInt(k), BigInt(4));

    const double areal = std::abs(a.real.to_double());
    ShellSumPlan inner = plan;
    inner.tail_tolerance = std::min(plan.tail_tolerance, 1e-13);

    // Real component: int |a| f(a x) e^{-2 pi i x y} dx, an even integrand.
    auto real_transform = [&](double y) {
        auto integrand = [&](double x) {
            return 2.0 * areal * spec.real.density(areal * x, quad).value * std::cos(2.0 * std::numbers::pi * x * y);
        };
        return integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), quad);
    };

    // p-adic components on norm exponents.
    std::set<std::uint64_t> primes = a.explicit_primes();
    for (auto p : spec.primes()) primes.insert(p);
    auto padic_transform = [&](std::uint64_t p, const PAdicNormValue& y) {
        const Prime pr(p);
        const std::int64_t ae = padic_norm(a.component(p), pr).exponent;
        if (spec.S.contains(p)) {
            const auto law = spec.law(p);
            const double t = spec.S.at(p).t;
            auto g = [&](std::int64_t e, double tol) {
                ShellSumPlan dplan = inner;
                dplan.tail_tolerance = tol;
                return density_shell(law, t, PAdicNormValue{e, false}, dplan).value;
            };
            return detail::scaled_padic_transform(g, pr, ae, y, inner);
        }
        // |a| 1_{Z_p}(a x) has transform |a| * ball integral over |x| <= |a|^{-1}.
        EvalResult r;
        r.value = pr.pow(static_cast<double>(ae)) * ball_char_integral(pr, -ae, y);
        r.converged = true;
        return r;
    };

    EvalResult mass;
    mass.value = 1.0;
    mass.converged = true;
    {
        EvalResult m = real_transform(0.0);
        rep.component_masses.push_back({"inf", m});
        mass.value *= m.value;
        mass.error_bound += m.error_bound;
        mass.converged = mass.converged && m.converged;
    }
    for (auto p : primes) {
        EvalResult m = padic_transform(p, PAdicNormValue{0, true});
        rep.component_masses.push_back({std::to_string(p), m});
        mass.value *= m.value;
        mass.error_bound += m.error_bound;
        mass.converged = mass.converged && m.converged;
    }
    rep.mass = mass;

    for (const auto& y : rep.grid) {
        EvalResult num = real_transform(y.to_double());
        for (auto p : primes) {
            const EvalResult c = padic_transform(p, padic_norm(y, Prime(p)));
            num.error_bound = std::abs(num.value) * c.error_bound + std::abs(c.value) * num.error_bound;
            num.value *= c.value;
            num.converged = num.converged && c.converged;
        }
        // Primes outside both supports: |a_p| = 1 and y is p-integral unless p divides den(y).
        for (auto p : detail::prime_factors(y.den()))
            if (!primes.contains(p)) num.value = 0.0;
        const double expected = rep.scaled.transform_expected(AdelePoint::diagonal(y));
        rep.transform_numeric.push_back(num);
        rep.transform_expected.push_back(expected);
        rep.max_transform_defect = std::max(rep.max_transform_defect, std::abs(num.value - expected));
    }
    return rep;
}

/// r = a/b lies in D when b is a product of primes in S (so r is in Z_p for p outside S).
inline bool in_D(const std::set<std::uint64_t>& S, const Rational& r) {
    return detail::strip_primes(r.den(), S) == 1;
}

/// Height of a/b in lowest terms: max(|a|, b).
inline BigInt height(const Rational& r) {
    BigInt a = r.num() < 0 ? BigInt(-r.num()) : r.num();
    return std::max(a, r.den());
}

/// All r in D with height <= h, ordered by height then value.
inline std::vector<Rational> enumerate_D(const std::set<std::uint64_t>& S, std::int64_t h) {
    require(h >= 0, "enumerate_D: height must be nonnegative");
    for (auto p : S) require(is_prime(p), "enumerate_D: S must contain primes");
    // S-smooth denominators up to h.
    std::vector<std::int64_t> dens{1};
    for (auto p : S) {
        const auto current = dens.size();
        for (std::size_t i = 0; i < current; ++i)
            for (std::int64_t b = dens[i] * static_cast<std::int64_t>(p); b <= h; b *= static_cast<std::int64_t>(p))
                dens.push_back(b);
    }
    std::vector<Rational> out;
    for (auto b : dens)
        for (std::int64_t a = -h; a <= h; ++a)
            if (std::gcd(a, b) == 1 || (a == 0 && b == 1)) out.emplace_back(BigInt(a), BigInt(b));
    std::sort(out.begin(), out.end(), [](const Rational& x, const Rational& y) {
        const auto hx = height(x);
        const auto hy = height(y);
        if (hx != hy) return hx < hy;
        return x < y;
    });
    return out;
}

struct CharSumReport {
    std::vector<std::int64_t> heights;
    std::vector<double> partial_sums;
    std::vector<std::int64_t> terms;
    /// partial_sums[i] - partial_sums[i-1]; the first entry repeats partial_sums[0].
    std::vector<double> differences;
    /// differences[i] / differences[i-1]; NaN where undefined.
    std::vector<double> difference_ratios;
    bool monotone = true;
};

/// sum_{r in D, height(r) <= H} f^(r) for every H in the schedule.
inline CharSumReport rational_char_sum(const BruhatSchwartzSpec& spec, std::vector<std::int64_t> heights) {
    spec.validate();
    require(!spec.S.empty(), "rational_char_sum: S must be nonempty");
    require(!heights.empty(), "rational_char_sum: empty height schedule");
    std::sort(heights.begin(), heights.end());
    const auto points = enumerate_D(spec.primes(), heights.back());

    CharSumReport rep;
    rep.heights = heights;
    CompensatedSum acc;
    std::size_t i = 0;
    std::int64_t count = 0;
    for (auto h : heights) {
        for (; i < points.size() && height(points[i]) <= h; ++i, ++count) {
            double v = spec.real.transform(points[i].to_double());
            for (const auto& [p, f] : spec.S) v *= char_fn(spec.law(p), f.t, points[i]);
            acc.add(v);
        }
        const double s = acc.value();
        if (!rep.partial_sums.empty() && s < rep.partial_sums.back()) rep.monotone = false;
        const double diff = rep.partial_sums.empty() ? s : s - rep.partial_sums.back();
        rep.difference_ratios.push_back(rep.differences.empty() || rep.differences.back() == 0.0
                                            ? std::numeric_limits<double>::quiet_NaN()
                                            : diff / rep.differences.back());
        rep.differences.push_back(diff);
        rep.partial_sums.push_back(s);
        rep.terms.push_back(count);
    }
    return rep;
}

/// The two displayed lower-bound series, taken literally:
///   first:  sum_{n=1}^M e^{-sigma t (A / p0^n)^alpha}
///   second: sum_{m=1}^M e^{-C t p0^{m gamma}}
struct PaperBoundSeries {
    std::uint64_t p0 = 2;
    std::vector<double> first_partial;
    std::vector<double> second_partial;
    double first_last_term = 0.0;
};

inline PaperBoundSeries paper_bound_series(const BruhatSchwartzSpec& spec, std::int64_t A, std::int64_t M) {
    spec.validate();
    require(!spec.S.empty(), "paper_bound: S must be nonempty");
    require(M >= 1, "paper_bound: M must be positive");
    require(spec.real.kind == RealFactor::Kind::stable || spec.real.kind == RealFactor::Kind::gaussian,
            "paper_bound: unknown real factor");
    PaperBoundSeries out;
    out.p0 = *spec.primes().begin();
    require(A != 0 && A % static_cast<std::int64_t>(out.p0) != 0, "paper_bound: A must be coprime to p0");
    const auto& f = spec.S.at(out.p0);
    const double p0 = static_cast<double>(out.p0);
    CompensatedSum first;
    CompensatedSum second;
    for (std::int64_t n = 1; n <= M; ++n) {
        const double r = std::abs(double(A)) * std::pow(p0, -double(n));
        const double term = std::exp(-spec.real.sigma * spec.real.t * std::pow(r, spec.real.alpha));
        first.add(term);
        out.first_last_term = term;
        second.add(std::exp(-f.C * f.t * std::pow(p0, double(n) * f.gamma)));
        out.first_partial.push_back(first.value());
        out.second_partial.push_back(second.value());
    }
    return out;
}

/// sum_r f(a r) against ||a||^{-1} sum_r f^(a^{-1} r) for a = (lambda, units) and
/// S empty: only integers survive, leaving the theta functional equation.
struct AdelicThetaReport {
    double lambda = 1.0;
    double t = 1.0;
    EvalResult left;
    EvalResult right;
    double defect = 0.0;
};

inline AdelicThetaReport adelic_theta_reduction(const BruhatSchwartzSpec& spec, double lambda, std::int64_t h = 64) {
    spec.validate();
    require(spec.S.empty(), "adelic_theta: S must be empty");
    require(spec.real.kind == RealFactor::Kind::gaussian, "adelic_theta: real factor must be gaussian");
    require(lambda > 0.0 && std::isfinite(lambda), "adelic_theta: lambda must be positive");
    require(h >= 1, "adelic_theta: height must be positive");
    const double t = spec.real.t;
    const double pi = std::numbers::pi;
    AdelicThetaReport rep;
    rep.lambda = lambda;
    rep.t = t;
    CompensatedSum left;
    CompensatedSum right;
    for (std::int64_t n = h; n >= 1; --n) {
        const double nd = double(n);
        left.add(2.0 * gaussian_density(t, lambda * nd));
        right.add(2.0 * gaussian_transform(t, nd / lambda) / lambda);
    }
    left.add(gaussian_density(t, 0.0));
    right.add(gaussian_transform(t, 0.0) / lambda);
    rep.left.value = left.value();
    rep.right.value = right.value();
    // Gaussian tails beyond h, bounded by geometric series.
    auto tail = [&](double scale, double first) {
        const double a = pi * scale;
        const double term = std::exp(-a * (first + 1) * (first + 1));
        const double ratio = std::exp(-a * (2 * first + 3));
        return ratio < 1.0 ? 2.0 * term / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    };
    rep.left.error_bound = tail(lambda * lambda / t, double(h)) / std::sqrt(t);
    rep.right.error_bound = tail(t / (lambda * lambda), double(h)) / lambda;
    rep.left.terms_used = rep.right.terms_used = 2 * h + 1;
    rep.left.converged = rep.left.error_bound <= 1e-13;
    rep.right.converged = rep.right.error_bound <= 1e-13;
    rep.defect = std::abs(rep.left.value - rep.right.value);
    return rep;
}

} // namespace trace_lab
