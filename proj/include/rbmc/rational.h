#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace rbmc {

/// Exact nonnegative-or-signed rational with 64-bit numerator and positive denominator, always in lowest terms.
class Rational {
   public:
    constexpr Rational() = default;
    Rational(std::int64_t numerator, std::int64_t denominator = 1);

    /// Accepts "p/q", integers and plain decimals ("0.25", "3", "-1/2").
    static Rational parse(std::string_view text);

    /// Exact conversion of the shortest decimal rendering (%.15g) of a double.
    static Rational fromDouble(double value);

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }

    bool isInteger() const { return den_ == 1; }
    bool isZero() const { return num_ == 0; }
    bool isNegative() const { return num_ < 0; }

    /// Largest integer not greater than the value.
    std::int64_t floor() const;
    double toDouble() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string toString() const;

    friend Rational operator+(Rational const& a, Rational const& b);
    friend Rational operator*(Rational const& a, Rational const& b);
    friend bool operator==(Rational const& a, Rational const& b) = default;
    friend std::strong_ordering operator<=>(Rational const& a, Rational const& b);

   private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Least common multiple; throws ResourceLimitError if the result does not fit into 64 bits.
std::int64_t checkedLcm(std::int64_t a, std::int64_t b);

}  // namespace rbmc
