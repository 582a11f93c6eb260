#pragma once

#include <mpfr.h>

#include <utility>

namespace trace_lab::detail {

/// Minimal owning wrapper over an mpfr_t. Arithmetic is done through the
/// MPFR API directly so callers can pick the linear-time _ui/_d variants.
class MpReal {
public:
    explicit MpReal(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
    MpReal(mpfr_prec_t bits, double x) { mpfr_init2(v_, bits); mpfr_set_d(v_, x, MPFR_RNDN); }
    MpReal(const MpReal& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    MpReal(MpReal&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    MpReal& operator=(MpReal o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~MpReal() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    [[nodiscard]] mpfr_srcptr get() const { return v_; }
    [[nodiscard]] double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    /// log2 of the magnitude; very negative for zero.
    [[nodiscard]] long exponent2() const { return mpfr_zero_p(v_) ? -(1L << 30) : mpfr_get_exp(v_); }

private:
    mpfr_t v_;
};

} // namespace trace_lab::detail
