#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "tdi/error.hpp"

namespace tdi {

using Integer = mpz_class;
using Rational = mpq_class;
using i128 = __int128;
using u128 = unsigned __int128;

Integer to_integer(i128 v);
Integer to_integer(u128 v);

// Decimal string, "p/q" for rationals ("p" when the denominator is 1).
std::string to_string(const Integer& v);
std::string to_string(const Rational& v);

Rational parse_rational(const std::string& text);

double log2_abs(const Integer& v);   // -inf for zero
double log2_abs(const Rational& v);

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Error(Errc::overflow, "int64 addition overflow");
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error(Errc::overflow, "int64 multiplication overflow");
    return r;
}

inline std::int64_t checked_pow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

inline std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::int64_t gcd_i64(std::int64_t a, std::int64_t b);

}  // namespace tdi
