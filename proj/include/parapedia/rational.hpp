#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace parapedia {

// Exact rational arithmetic for confidence scores and claim metrics.
// Confidence values are parsed from decimal text, never routed through
// binary floats, so comparisons at boundaries like 0.75 are unambiguous.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(int64_t num, int64_t den) : num_(num), den_(den) { normalize(); }
    static Rational integer(int64_t n) { return Rational(n, 1); }

    // Parses "0.97", "1", ".5", "12.", with optional sign. Returns nullopt
    // on anything else.
    static std::optional<Rational> parse_decimal(std::string_view text) {
        if (text.empty()) return std::nullopt;
        size_t i = 0;
        int64_t sign = 1;
        if (text[i] == '+' || text[i] == '-') {
            if (text[i] == '-') sign = -1;
            ++i;
        }
        int64_t num = 0;
        int64_t den = 1;
        bool any_digit = false;
        bool seen_dot = false;
        for (; i < text.size(); ++i) {
            char c = text[i];
            if (c == '.') {
                if (seen_dot) return std::nullopt;
                seen_dot = true;
                continue;
            }
            if (c < '0' || c > '9') return std::nullopt;
            any_digit = true;
            if (num > (INT64_MAX - 9) / 10) return std::nullopt;
            num = num * 10 + (c - '0');
            if (seen_dot) {
                if (den > INT64_MAX / 10) return std::nullopt;
                den *= 10;
            }
        }
        if (!any_digit) return std::nullopt;
        return Rational(sign * num, den);
    }

    int64_t numerator() const { return num_; }
    int64_t denominator() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Fixed-point decimal rendering, round half away from zero.
    std::string to_decimal_string(int fraction_digits) const {
        __int128 scale = 1;
        for (int i = 0; i < fraction_digits; ++i) scale *= 10;
        __int128 scaled = static_cast<__int128>(num_) * scale;
        __int128 d = den_;
        __int128 q = scaled / d;
        __int128 r = scaled % d;
        if (r < 0) r = -r;
        if (2 * r >= d) q += (num_ < 0 ? -1 : 1);
        bool neg = q < 0;
        if (neg) q = -q;
        std::string digits;
        if (q == 0) digits = "0";
        while (q > 0) {
            digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(q % 10)));
            q /= 10;
        }
        while (static_cast<int>(digits.size()) <= fraction_digits)
            digits.insert(digits.begin(), '0');
        std::string out = neg ? "-" : "";
        out += digits.substr(0, digits.size() - fraction_digits);
        if (fraction_digits > 0) {
            out += '.';
            out += digits.substr(digits.size() - fraction_digits);
        }
        return out;
    }

    // Exact decimal text when the denominator divides a power of ten
    // (always true for parsed confidences); falls back to "num/den".
    std::string to_exact_string() const {
        int64_t d = den_;
        int twos = 0, fives = 0;
        while (d % 2 == 0) { d /= 2; ++twos; }
        while (d % 5 == 0) { d /= 5; ++fives; }
        if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
        int digits = twos > fives ? twos : fives;
        return to_decimal_string(digits);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational::from128(
            static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
            static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational::from128(
            static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
            static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational::from128(static_cast<__int128>(a.num_) * b.num_,
                                 static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return Rational::from128(static_cast<__int128>(a.num_) * b.den_,
                                 static_cast<__int128>(a.den_) * b.num_);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

private:
    static Rational from128(__int128 num, __int128 den) {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        __int128 a = num < 0 ? -num : num;
        __int128 b = den;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { num /= a; den /= a; }
        if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
            throw std::overflow_error("rational overflow");
        Rational r;
        r.num_ = static_cast<int64_t>(num);
        r.den_ = static_cast<int64_t>(den);
        return r;
    }

    void normalize() {
        if (den_ == 0) throw std::domain_error("rational with zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    int64_t num_;
    int64_t den_;
};

}  // namespace parapedia
