#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "errors.hpp"

namespace trace_lab {

/// Value of a truncated infinite sum or integral together with a bound on
/// what the truncation left out.
struct EvalResult {
    double value = 0.0;
    double error_bound = 0.0;
    std::int64_t terms_used = 0;
    bool converged = true;
};

/// Truncation policy shared by shell series over Q_p and lattice sums over Z^d.
///
/// [n_min, n_max] is always included; summation extends outward until the
/// tail estimate drops below tail_tolerance or max_terms is reached.
struct ShellSumPlan {
    std::int64_t n_min = -8;
    std::int64_t n_max = 8;
    double tail_tolerance = 1e-12;
    std::int64_t max_terms = 1 << 20;

    void validate() const {
        require(n_min <= n_max, "plan: n_min must not exceed n_max");
        require(tail_tolerance > 0.0, "plan: tail_tolerance must be positive");
        require(max_terms > 0, "plan: max_terms must be positive");
    }
};

/// Neumaier's variant of Kahan summation. Order of add() calls is the
/// caller's contract; results are bit-reproducible for a fixed order.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Geometric-comparison bound for the tail t1 + t2 + ... given the first two
/// omitted terms; infinite if the ratio does not indicate decay.
inline double geometric_tail_bound(double first_omitted, double second_omitted) {
    const double a = std::abs(first_omitted);
    const double b = std::abs(second_omitted);
    if (a == 0.0) return 0.0;
    const double ratio = b / a;
    if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
    return a / (1.0 - ratio);
}

} // namespace trace_lab
