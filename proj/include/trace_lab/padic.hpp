#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/special_functions/cos_pi.hpp>

#include "errors.hpp"
#include "rational.hpp"

namespace trace_lab {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d <= n / d; d += 2)
        if (n % d == 0) return false;
    return true;
}

/// A rational prime, validated on construction.
class Prime {
public:
    explicit Prime(std::uint64_t p) : p_(p) {
        if (!is_prime(p)) throw ParameterError(std::to_string(p) + " is not prime");
    }
    [[nodiscard]] std::uint64_t value() const { return p_; }
    [[nodiscard]] double as_double() const { return static_cast<double>(p_); }
    /// p^n as a double (n may be negative).
    [[nodiscard]] double pow(double n) const { return std::pow(as_double(), n); }
    friend bool operator==(Prime a, Prime b) { return a.p_ == b.p_; }
    friend auto operator<=>(Prime a, Prime b) { return a.p_ <=> b.p_; }

private:
    std::uint64_t p_;
};

/// |x|_p stored as an exact exponent: the norm is p^exponent, or 0.
struct PAdicNormValue {
    std::int64_t exponent = 0;
    bool is_zero = false;

    [[nodiscard]] double value(Prime p) const { return is_zero ? 0.0 : p.pow(static_cast<double>(exponent)); }
    [[nodiscard]] Rational exact(Prime p) const {
        if (is_zero) return {};
        return Rational(BigInt(p.value())).pow(exponent);
    }
    friend bool operator==(const PAdicNormValue&, const PAdicNormValue&) = default;
};

/// Valuation result; `valuation` is empty for q = 0 (the +infinity sentinel).
struct ValuationAndNorm {
    std::optional<std::int64_t> valuation;
    PAdicNormValue norm;
};

namespace detail {

inline std::int64_t strip_factor(BigInt& n, std::uint64_t p) {
    std::int64_t k = 0;
    const BigInt bp = p;
    while (n != 0) {
        BigInt q, r;
        boost::multiprecision::divide_qr(n, bp, q, r);
        if (r != 0) break;
        n = std::move(q);
        ++k;
    }
    return k;
}

/// Inverse of a modulo m via the extended Euclidean algorithm; gcd(a, m) = 1.
inline BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    BigInt old_r = a % m, r = m;
    if (old_r < 0) old_r += m;
    BigInt old_s = 1, s = 0;
    while (r != 0) {
        BigInt q = old_r / r;
        BigInt tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1) throw ParameterError("mod_inverse: arguments not coprime");
    BigInt inv = old_s % m;
    if (inv < 0) inv += m;
    return inv;
}

} // namespace detail

inline std::int64_t valuation(const BigInt& n, Prime p) {
    BigInt m = boost::multiprecision::abs(n);
    return detail::strip_factor(m, p.value());
}

/// v_p(q) and |q|_p = p^{-v_p(q)}; zero maps to (+inf, norm 0).
inline ValuationAndNorm valuation_and_norm(const Rational& q, Prime p) {
    if (q.is_zero()) return {std::nullopt, PAdicNormValue{0, true}};
    const std::int64_t v = valuation(q.num(), p) - valuation(q.den(), p);
    return {v, PAdicNormValue{-v, false}};
}

inline PAdicNormValue padic_norm(const Rational& q, Prime p) { return valuation_and_norm(q, p).norm; }

/// The fractional part [q]_p = k/p^m with 0 <= k < p^m and q - [q]_p in Z_p.
inline Rational frac_part(const Rational& q, Prime p) {
    if (q.is_zero()) return {};
    BigInt den = q.den();
    const std::int64_t m = detail::strip_factor(den, p.value()); // den = p^m * b'
    if (m == 0) return {};
    const BigInt pm = boost::multiprecision::pow(BigInt(p.value()), static_cast<unsigned>(m));
    BigInt k = (q.num() % pm) * detail::mod_inverse(den, pm) % pm;
    if (k < 0) k += pm;
    return {k, pm};
}

/// A point on the unit circle, used for character values.
struct UnitComplex {
    double re = 1.0;
    double im = 0.0;

    /// e^{2 pi i r} for a rational r, with exact values at multiples of 1/4.
    static UnitComplex from_turns(const Rational& r) {
        // Reduce mod 1 exactly before converting.
        BigInt q = r.num() / r.den();
        Rational frac = r - Rational(q);
        const double twice = (frac * Rational(2)).to_double();
        return {boost::math::cos_pi(twice), boost::math::sin_pi(twice)};
    }
    static UnitComplex from_turns(double r) {
        const double f = r - std::floor(r);
        return {boost::math::cos_pi(2.0 * f), boost::math::sin_pi(2.0 * f)};
    }

    [[nodiscard]] std::complex<double> complex() const { return {re, im}; }
    [[nodiscard]] double modulus() const { return std::hypot(re, im); }
    friend UnitComplex operator*(const UnitComplex& a, const UnitComplex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    [[nodiscard]] UnitComplex conj() const { return {re, -im}; }
};

/// chi_y(x) = e^{2 pi i [xy]_p}; exactly 1 when xy lies in Z_p.
inline UnitComplex char_qp(const Rational& y, const Rational& x, Prime p) {
    const Rational f = frac_part(x * y, p);
    if (f.is_zero()) return {};
    return UnitComplex::from_turns(f);
}

} // namespace trace_lab
