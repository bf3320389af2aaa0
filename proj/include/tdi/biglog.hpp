#pragma once

#include <optional>
#include <string>

#include "tdi/exact.hpp"

namespace tdi {

// Real number stored directly (level 0) or as sign * 2^m (level 1). Used as
// the exponent of BigLogNumber so that values such as 2^(-2^1027) stay finite.
class WideReal {
public:
    WideReal() = default;

    static WideReal from_double(double v);
    static WideReal from_log2(int sign, double log2_magnitude);

    int sign() const { return sign_; }
    int level() const { return level_; }
    double raw() const { return v_; }
    double log2_abs() const;
    std::optional<double> to_double() const;

    WideReal operator+(const WideReal& o) const;
    WideReal operator-(const WideReal& o) const { return *this + (-o); }
    WideReal operator-() const;
    WideReal scaled(double factor) const;
    // y * sign * 2^log2_factor
    WideReal scaled_pow2(int sign, double log2_factor) const;

    int compare(const WideReal& o) const;
    bool operator<(const WideReal& o) const { return compare(o) < 0; }
    bool operator==(const WideReal& o) const { return compare(o) == 0; }

private:
    static constexpr double kPromoteLog2 = 960.0;

    int sign_ = 0;
    int level_ = 0;
    double v_ = 0.0;  // level 0: the value; level 1: log2|value|
};

// sign * 2^L with L a WideReal. Doubly exponential constants (gamma(k),
// 2^(-2^(k+9)), (CS/4)^gamma(k)) are carried exactly on the log scale.
class BigLogNumber {
public:
    BigLogNumber() = default;  // zero

    static BigLogNumber from_double(double v);
    static BigLogNumber from_integer(const Integer& v);
    static BigLogNumber from_rational(const Rational& v);
    static BigLogNumber from_log2(double log2_magnitude, int sign = 1);
    static BigLogNumber from_log2(const WideReal& log2_magnitude, int sign = 1);

    int sign() const { return sign_; }
    bool is_zero() const { return sign_ == 0; }
    const WideReal& log2_abs() const { return log2_; }

    // nullopt when the value is outside the normal double range
    std::optional<double> to_double() const;

    BigLogNumber operator*(const BigLogNumber& o) const;
    BigLogNumber operator/(const BigLogNumber& o) const;
    BigLogNumber operator+(const BigLogNumber& o) const;
    BigLogNumber operator-(const BigLogNumber& o) const { return *this + (-o); }
    BigLogNumber operator-() const;
    BigLogNumber reciprocal() const;
    BigLogNumber pow(double e) const;
    BigLogNumber pow(const BigLogNumber& e) const;

    int compare(const BigLogNumber& o) const;
    bool operator<(const BigLogNumber& o) const { return compare(o) < 0; }
    bool operator>(const BigLogNumber& o) const { return compare(o) > 0; }
    bool operator<=(const BigLogNumber& o) const { return compare(o) <= 0; }
    bool operator>=(const BigLogNumber& o) const { return compare(o) >= 0; }
    bool operator==(const BigLogNumber& o) const { return compare(o) == 0; }

    std::string to_string() const;

private:
    int sign_ = 0;
    WideReal log2_;
};

}  // namespace tdi
