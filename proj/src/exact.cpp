#include "tdi/exact.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace tdi {

Integer to_integer(u128 v) {
    Integer hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
    Integer lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
    return (hi << 64) + lo;
}

Integer to_integer(i128 v) {
    if (v >= 0) return to_integer(static_cast<u128>(v));
    return -to_integer(static_cast<u128>(-(v + 1)) + 1);
}

std::string to_string(const Integer& v) { return v.get_str(10); }

std::string to_string(const Rational& v) {
    Rational c(v);
    c.canonicalize();
    return c.get_str(10);
}

Rational parse_rational(const std::string& text) {
    // accepts "p", "p/q" and decimal literals such as "0.25"
    auto dot = text.find('.');
    if (dot != std::string::npos && text.find('/') == std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        std::size_t frac = text.size() - dot - 1;
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
        Rational r;
        if (r.get_num().set_str(digits, 10) != 0) throw Error(Errc::parse_error, "bad number '" + text + "'");
        r.get_den() = den;
        r.canonicalize();
        return r;
    }
    Rational r;
    if (r.set_str(text, 10) != 0 || r.get_den() == 0) throw Error(Errc::parse_error, "bad rational '" + text + "'");
    r.canonicalize();
    return r;
}

double log2_abs(const Integer& v) {
    if (v == 0) return -std::numeric_limits<double>::infinity();
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return std::log2(std::fabs(mant)) + static_cast<double>(exp);
}

double log2_abs(const Rational& v) {
    if (v == 0) return -std::numeric_limits<double>::infinity();
    return log2_abs(v.get_num()) - log2_abs(v.get_den());
}

std::int64_t gcd_i64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

}  // namespace tdi
