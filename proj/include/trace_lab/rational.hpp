#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace trace_lab {

using BigInt = boost::multiprecision::cpp_int;

/// Exact fraction num/den, always in lowest terms with den > 0.
/// Zero is stored as 0/1.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {} // NOLINT: implicit from integers
    Rational(BigInt n) : num_(std::move(n)), den_(1) {} // NOLINT
    Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
        if (den_ == 0) throw ParameterError("rational with zero denominator");
        normalize();
    }

    /// Exact conversion; every finite double is a dyadic rational.
    static Rational from_double(double x) {
        if (!std::isfinite(x)) throw ParameterError("cannot convert non-finite double to rational");
        if (x == 0.0) return {};
        int exp = 0;
        double mant = std::frexp(x, &exp);
        // 53 bits of mantissa become an integer.
        auto scaled = static_cast<long long>(std::ldexp(mant, 53));
        exp -= 53;
        BigInt n = scaled;
        BigInt d = 1;
        if (exp >= 0)
            n <<= exp;
        else
            d <<= -exp;
        return {n, d};
    }

    /// Parses "a/b", "a", or a plain decimal such as "-0.125" or "1e-3".
    static Rational parse(std::string_view text);

    [[nodiscard]] const BigInt& num() const { return num_; }
    [[nodiscard]] const BigInt& den() const { return den_; }
    [[nodiscard]] bool is_zero() const { return num_ == 0; }
    [[nodiscard]] bool is_integer() const { return den_ == 1; }
    [[nodiscard]] int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

    [[nodiscard]] double to_double() const {
        // Long-division through cpp_dec is overkill; scale both parts into
        // range so that huge numerators and denominators still convert.
        const auto nbits = num_ == 0 ? 0u : static_cast<unsigned>(boost::multiprecision::msb(BigInt(boost::multiprecision::abs(num_))));
        const auto dbits = static_cast<unsigned>(boost::multiprecision::msb(den_));
        if (nbits < 1000 && dbits < 1000)
            return num_.convert_to<double>() / den_.convert_to<double>();
        const int shift = static_cast<int>(nbits) - static_cast<int>(dbits) - 64;
        BigInt q = shift >= 0 ? BigInt(num_ / (BigInt(den_) << shift))
                              : BigInt((num_ << -shift) / den_);
        return std::ldexp(q.convert_to<double>(), shift);
    }

    [[nodiscard]] std::string str() const {
        if (den_ == 1) return num_.str();
        return num_.str() + "/" + den_.str();
    }

    [[nodiscard]] Rational abs() const { return {boost::multiprecision::abs(num_), den_}; }
    [[nodiscard]] Rational inverse() const {
        if (num_ == 0) throw ParameterError("inverse of zero rational");
        return {den_, num_};
    }

    Rational operator-() const {
        Rational r = *this;
        r.num_ = -r.num_;
        return r;
    }
    friend Rational operator+(const Rational& a, const Rational& b) {
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return {a.num_ * b.num_, a.den_ * b.den_};
    }
    friend Rational operator/(const Rational& a, const Rational& b) { return a * b.inverse(); }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const BigInt lhs = a.num_ * b.den_;
        const BigInt rhs = b.num_ * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

    /// Integer power, negative exponents allowed for nonzero bases.
    [[nodiscard]] Rational pow(long long e) const {
        if (e < 0) return inverse().pow(-e);
        Rational base = *this;
        Rational out(1);
        while (e > 0) {
            if (e & 1) out *= base;
            base *= base;
            e >>= 1;
        }
        return out;
    }

private:
    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        BigInt g = boost::multiprecision::gcd(num_, den_);
        if (g != 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    BigInt num_;
    BigInt den_;
};

inline Rational Rational::parse(std::string_view text) {
    auto fail = [&]() -> Rational {
        throw ParameterError("cannot parse rational from '" + std::string(text) + "'");
    };
    // cpp_int reads a leading 0 as an octal prefix.
    auto decimal = [](std::string_view s) {
        const auto nz = s.find_first_not_of('0');
        return nz == std::string_view::npos ? BigInt(0) : BigInt(std::string(s.substr(nz)));
    };
    auto parse_int = [&](std::string_view s) -> BigInt {
        if (s.empty()) fail();
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) fail();
        for (std::size_t j = i; j < s.size(); ++j)
            if (s[j] < '0' || s[j] > '9') fail();
        BigInt v = decimal(s.substr(i));
        return s[0] == '-' ? BigInt(-v) : v;
    };

    if (text.empty()) return fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos)
        return {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};

    // Decimal with optional fraction and exponent, parsed exactly.
    std::string_view mant = text;
    long long exp10 = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        mant = text.substr(0, e);
        const BigInt ev = parse_int(text.substr(e + 1));
        if (ev > 10000 || ev < -10000) fail();
        exp10 = ev.convert_to<long long>();
    }
    std::string digits;
    bool negative = false;
    std::size_t i = 0;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
        negative = mant[0] == '-';
        i = 1;
    }
    bool seen_point = false;
    bool seen_digit = false;
    for (; i < mant.size(); ++i) {
        const char c = mant[i];
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) --exp10;
        } else {
            return fail();
        }
    }
    if (!seen_digit) return fail();
    BigInt n = decimal(digits);
    if (negative) n = -n;
    BigInt ten = 10;
    if (exp10 >= 0) return Rational(n * boost::multiprecision::pow(ten, static_cast<unsigned>(exp10)));
    return {n, boost::multiprecision::pow(ten, static_cast<unsigned>(-exp10))};
}

} // namespace trace_lab
