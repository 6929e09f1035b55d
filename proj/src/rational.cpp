#include "rbmc/rational.h"

#include <charconv>
#include <cstdio>
#include <numeric>

#include "rbmc/errors.h"

namespace rbmc {

namespace {

std::int64_t checkedMul(std::int64_t a, std::int64_t b) {
    std::int64_t result = 0;
    if (__builtin_mul_overflow(a, b, &result)) {
        throw ResourceLimitError("rational arithmetic overflow");
    }
    return result;
}

std::int64_t checkedAdd(std::int64_t a, std::int64_t b) {
    std::int64_t result = 0;
    if (__builtin_add_overflow(a, b, &result)) {
        throw ResourceLimitError("rational arithmetic overflow");
    }
    return result;
}

std::int64_t parseInteger(std::string_view text, std::string_view whole) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ModelError("invalid number '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator) : num_(numerator), den_(denominator) {
    if (den_ == 0) {
        throw ModelError("rational with zero denominator");
    }
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::parse(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    std::string_view body = trim(text);
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        return Rational(parseInteger(trim(body.substr(0, slash)), text), parseInteger(trim(body.substr(slash + 1)), text));
    }
    auto exponentPos = body.find_first_of("eE");
    std::int64_t exponent = 0;
    if (exponentPos != std::string_view::npos) {
        std::string_view expText = body.substr(exponentPos + 1);
        if (!expText.empty() && expText.front() == '+') expText.remove_prefix(1);
        exponent = parseInteger(expText, text);
        body = body.substr(0, exponentPos);
    }
    bool negative = !body.empty() && body.front() == '-';
    if (negative || (!body.empty() && body.front() == '+')) body.remove_prefix(1);
    std::string digits;
    std::int64_t scale = 0;
    bool seenPoint = false;
    for (char c : body) {
        if (c == '.' && !seenPoint) {
            seenPoint = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seenPoint) ++scale;
        } else {
            throw ModelError("invalid number '" + std::string(text) + "'");
        }
    }
    if (digits.empty()) {
        throw ModelError("invalid number '" + std::string(text) + "'");
    }
    std::int64_t mantissa = parseInteger(digits, text);
    exponent -= scale;
    std::int64_t numerator = negative ? -mantissa : mantissa;
    std::int64_t denominator = 1;
    for (; exponent > 0; --exponent) numerator = checkedMul(numerator, 10);
    for (; exponent < 0; ++exponent) denominator = checkedMul(denominator, 10);
    return Rational(numerator, denominator);
}

Rational Rational::fromDouble(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.15g", value);
    return parse(buffer);
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

std::string Rational::toString() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(Rational const& a, Rational const& b) {
    std::int64_t g = std::gcd(a.den_, b.den_);
    std::int64_t den = checkedMul(a.den_ / g, b.den_);
    std::int64_t num = checkedAdd(checkedMul(a.num_, b.den_ / g), checkedMul(b.num_, a.den_ / g));
    return Rational(num, den);
}

Rational operator*(Rational const& a, Rational const& b) {
    std::int64_t g1 = std::gcd(a.num_, b.den_);
    std::int64_t g2 = std::gcd(b.num_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return Rational(checkedMul(a.num_ / g1, b.num_ / g2), checkedMul(a.den_ / g2, b.den_ / g1));
}

std::strong_ordering operator<=>(Rational const& a, Rational const& b) {
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::int64_t checkedLcm(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    return checkedMul(a / std::gcd(a, b), b);
}

}  // namespace rbmc
