#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include "errors.hpp"
#include "quadrature.hpp"
#include "summation.hpp"

// Fourier convention on R^d throughout: f^(y) = int f(x) e^{-2 pi i x.y} dx.

namespace trace_lab {

/// Heat kernel t^{-1/2} e^{-pi x^2 / t}; its transform is e^{-t pi y^2}.
inline double gaussian_density(double t, double x) {
    require(t > 0.0, "gaussian_density: t must be positive");
    return std::exp(-std::numbers::pi * x * x / t) / std::sqrt(t);
}

inline double gaussian_transform(double t, double y) { return std::exp(-t * std::numbers::pi * y * y); }

/// Rotationally invariant alpha-stable symbol eta(y) = sigma |y|^alpha on R^d.
struct StableSymbol {
    double alpha;
    double sigma;
    int d = 1;

    StableSymbol(double alpha_, double sigma_, int d_ = 1) : alpha(alpha_), sigma(sigma_), d(d_) {
        require(alpha > 0.0 && alpha <= 2.0, "stable symbol: alpha must lie in (0, 2]");
        require(sigma > 0.0 && std::isfinite(sigma), "stable symbol: sigma must be positive");
        require(d >= 1, "stable symbol: dimension must be >= 1");
    }

    [[nodiscard]] double eta(double norm) const { return sigma * std::pow(norm, alpha); }
};

inline double stable_transform(const StableSymbol& s, double t, double y) {
    return std::exp(-t * s.eta(std::abs(y)));
}

/// Inverse transform of e^{-c|y|}: 2c / (c^2 + 4 pi^2 x^2).
inline double cauchy_density(double c, double x) {
    const double w = 2.0 * std::numbers::pi * x;
    return 2.0 * c / (c * c + w * w);
}

/// Inverse transform of e^{-c y^2}: sqrt(pi/c) e^{-pi^2 x^2 / c}.
inline double gaussian_density_sigma(double c, double x) {
    const double pi = std::numbers::pi;
    return std::sqrt(pi / c) * std::exp(-pi * pi * x * x / c);
}

namespace detail {

/// In u = 2 pi y the density is (1/pi) int_0^inf exp(-k u^alpha) cos(|x| u) du
/// with k = c / (2 pi)^alpha. The integrand continues analytically into the
/// sector 0 < arg u < theta as long as alpha * theta < pi/2; on the rotated ray
/// both factors decay, which removes the oscillation.
inline EvalResult stable_contour_inversion(double alpha, double c, double x, const QuadratureConfig& quad) {
    const double pi = std::numbers::pi;
    const double k = c / std::pow(2.0 * pi, alpha);
    const double ax = std::abs(x);
    const double theta = ax == 0.0 ? 0.0 : 0.5 * std::min(pi / 2.0, pi / (2.0 * alpha));
    const double ca = std::cos(alpha * theta);
    const double sa = std::sin(alpha * theta);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);

    // Natural length scale of the decay along the ray.
    double scale = std::pow(k * ca, -1.0 / alpha);
    if (ax > 0.0) scale = std::min(scale, 1.0 / (ax * st));

    auto integrand = [&](double v) {
        const double s = scale * v;
        const double sp = std::pow(s, alpha);
        const double re = -k * sp * ca - ax * s * st;
        const double im = -k * sp * sa + ax * s * ct;
        return scale * std::exp(re) * std::cos(theta + im);
    };
    QuadratureConfig inner = quad;
    inner.abs_tolerance = quad.abs_tolerance * pi;
    EvalResult r = integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), inner);
    r.value /= pi;
    r.error_bound /= pi;
    r.converged = r.error_bound <= quad.abs_tolerance;
    return r;
}

} // namespace detail

/// Density of the law with transform exp(-t sigma |y|^alpha) on R, always by
/// numerical inversion.
inline EvalResult stable_density_numeric(const StableSymbol& s, double t, double x, const QuadratureConfig& quad = {}) {
    require(t > 0.0, "stable_density: t must be positive");
    if (s.d != 1) throw CapabilityError("stable_density: numerical inversion is implemented for d = 1 only");
    return detail::stable_contour_inversion(s.alpha, s.sigma * t, x, quad);
}

/// Closed forms for alpha = 2 and alpha = 1, numerical inversion otherwise.
inline EvalResult stable_density(const StableSymbol& s, double t, double x, const QuadratureConfig& quad = {}) {
    require(t > 0.0, "stable_density: t must be positive");
    if (s.d != 1) throw CapabilityError("stable_density: numerical inversion is implemented for d = 1 only");
    const double c = s.sigma * t;
    EvalResult r;
    r.terms_used = 1;
    if (s.alpha == 2.0) {
        r.value = gaussian_density_sigma(c, x);
        return r;
    }
    if (s.alpha == 1.0) {
        r.value = cauchy_density(c, x);
        return r;
    }
    return stable_density_numeric(s, t, x, quad);
}

/// One term A |x|^{-power} of the large-|x| expansion of a stable density.
struct PowerTerm {
    double coefficient;
    double power;
};

/// Large-|x| expansion
///   f(x) ~ (1/pi) sum_k (-1)^{k+1} Gamma(alpha k + 1)/k! k'^k sin(pi alpha k / 2) |x|^{-alpha k - 1},
/// with k' = sigma t / (2 pi)^alpha. Convergent for alpha < 1, asymptotic for 1 < alpha < 2,
/// identically zero for alpha = 2.
inline std::vector<PowerTerm> stable_tail_expansion(const StableSymbol& s, double t, int terms) {
    const double pi = std::numbers::pi;
    const double kp = s.sigma * t / std::pow(2.0 * pi, s.alpha);
    std::vector<PowerTerm> out;
    out.reserve(static_cast<std::size_t>(terms));
    for (int k = 1; k <= terms; ++k) {
        const double kd = k;
        const double log_mag = std::lgamma(s.alpha * kd + 1.0) - std::lgamma(kd + 1.0) + kd * std::log(kp);
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        const double sn = boost::math::sin_pi(s.alpha * kd / 2.0);
        out.push_back({sign * sn * std::exp(log_mag) / pi, s.alpha * kd + 1.0});
    }
    return out;
}

/// Smallest K with f(x) <= K / (1 + |x|^{1+alpha}) on the supplied grid.
template <class Density>
double fit_moderate_decrease(Density&& f, double alpha, const std::vector<double>& grid) {
    double k = 0.0;
    for (double x : grid) k = std::max(k, std::abs(f(x)) * (1.0 + std::pow(std::abs(x), 1.0 + alpha)));
    return k;
}

enum class CauchyConvention { paper, consistent };

/// Both sides of the Poisson summation formula for the Cauchy law at t = 1.
struct CauchyPsfReport {
    CauchyConvention convention;
    /// Lattice side: sum_n f(n) (paper mode: the printed upper bound).
    double lattice_side;
    /// Transform side: sum_n f^(n).
    double transform_side;
    double difference;
    /// sum_n 1/(pi(1+n^2)) actually computed, for comparison with the bound.
    double lattice_sum_computed;
    double lattice_error_bound;
};

/// sum_{|n|<=N} 1/(pi(1+n^2)) for each N in cutoffs.
inline std::vector<double> cauchy_lattice_partial_sums(const std::vector<long>& cutoffs) {
    std::vector<double> out;
    out.reserve(cutoffs.size());
    for (long cut : cutoffs) {
        CompensatedSum acc;
        for (long n = cut; n >= 1; --n) acc.add(2.0 / (std::numbers::pi * (1.0 + double(n) * double(n))));
        acc.add(1.0 / std::numbers::pi);
        out.push_back(acc.value());
    }
    return out;
}

/// sum_n 1/(pi(1+n^2)) by a partial sum plus the midpoint-rule tail
/// 2/pi (pi/2 - atan(N + 1/2)); the tail error is below 1/(6 pi N^3).
inline EvalResult cauchy_lattice_sum(long cutoff = 4096) {
    const double pi = std::numbers::pi;
    const double partial = cauchy_lattice_partial_sums({cutoff}).front();
    const double tail = 2.0 / pi * std::atan(1.0 / (double(cutoff) + 0.5));
    EvalResult r;
    r.value = partial + tail;
    r.error_bound = 1.0 / (6.0 * pi * std::pow(double(cutoff), 3.0)) + 4e-16 * r.value;
    r.terms_used = 2 * cutoff + 1;
    return r;
}

inline CauchyPsfReport cauchy_psf_report(CauchyConvention convention) {
    const double pi = std::numbers::pi;
    const double e = std::numbers::e;
    const EvalResult lattice = cauchy_lattice_sum();
    CauchyPsfReport r{convention, 0.0, 0.0, 0.0, lattice.value, lattice.error_bound};
    if (convention == CauchyConvention::paper) {
        // f^(x) = e^{-|x|}: sum_n e^{-|n|} = 1 + 2/(e - 1); lattice side via sum 1/(1+n^2) <= pi^2/6.
        r.lattice_side = (1.0 + pi * pi / 3.0) / pi;
        r.transform_side = 1.0 + 2.0 / (e - 1.0);
    } else {
        // f^(y) = e^{-2 pi |y|}: sum_n e^{-2 pi |n|} = 1 + 2/(e^{2 pi} - 1) = coth(pi).
        r.lattice_side = lattice.value;
        r.transform_side = 1.0 + 2.0 / std::expm1(2.0 * pi);
    }
    r.difference = r.lattice_side - r.transform_side;
    return r;
}

} // namespace trace_lab
