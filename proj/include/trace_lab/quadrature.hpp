#pragma once

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "summation.hpp"

namespace trace_lab {

/// Settings for adaptive Gauss-Kronrod quadrature. Every quadrature value
/// is reported with the Kronrod error estimate.
struct QuadratureConfig {
    double abs_tolerance = 1e-8;
    /// Relative termination threshold handed to the adaptive bisection.
    double rel_tolerance = 1e-10;
    /// Maximum bisection depth per panel.
    unsigned max_depth = 20;
    /// Upper limit on the number of panels for piecewise integrals.
    int panel_limit = 4096;

    void validate() const {
        require(abs_tolerance > 0.0, "quadrature: tolerance must be positive");
        require(panel_limit > 0, "quadrature: panel limit must be positive");
    }
};

/// Adaptive 61-point Gauss-Kronrod on [a, b]; either end may be infinite.
template <class F>
EvalResult integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
    cfg.validate();
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double err = 0.0;
    double l1 = 0.0;
    const double value = GK::integrate(f, a, b, cfg.max_depth, cfg.rel_tolerance, &err, &l1);
    EvalResult r;
    r.value = value;
    r.error_bound = err;
    r.terms_used = 61;
    r.converged = err <= cfg.abs_tolerance || err <= 4 * std::numeric_limits<double>::epsilon() * l1;
    return r;
}

} // namespace trace_lab
