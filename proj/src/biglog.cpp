#include "tdi/biglog.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tdi {

namespace {

int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

WideReal WideReal::from_double(double v) {
    if (!std::isfinite(v)) throw Error(Errc::numerical, "non-finite value in WideReal");
    WideReal r;
    r.sign_ = sgn(v);
    if (r.sign_ == 0) return r;
    double l2 = std::log2(std::fabs(v));
    if (l2 > kPromoteLog2) {
        r.level_ = 1;
        r.v_ = l2;
    } else {
        r.v_ = v;
    }
    return r;
}

WideReal WideReal::from_log2(int sign, double log2_magnitude) {
    if (sign == 0 || log2_magnitude == -std::numeric_limits<double>::infinity()) return {};
    if (!std::isfinite(log2_magnitude)) throw Error(Errc::overflow, "WideReal magnitude beyond representable range");
    WideReal r;
    r.sign_ = sign > 0 ? 1 : -1;
    if (log2_magnitude > kPromoteLog2) {
        r.level_ = 1;
        r.v_ = log2_magnitude;
    } else {
        r.v_ = r.sign_ * std::exp2(log2_magnitude);
        if (r.v_ == 0.0) r.sign_ = 0;
    }
    return r;
}

double WideReal::log2_abs() const {
    if (sign_ == 0) return -std::numeric_limits<double>::infinity();
    return level_ == 0 ? std::log2(std::fabs(v_)) : v_;
}

std::optional<double> WideReal::to_double() const {
    if (level_ == 0) return v_;
    return std::nullopt;
}

WideReal WideReal::operator-() const {
    WideReal r = *this;
    r.sign_ = -r.sign_;
    if (r.level_ == 0) r.v_ = -r.v_;
    return r;
}

WideReal WideReal::operator+(const WideReal& o) const {
    if (sign_ == 0) return o;
    if (o.sign_ == 0) return *this;
    if (level_ == 0 && o.level_ == 0) return from_double(v_ + o.v_);
    double la = log2_abs(), lb = o.log2_abs();
    const WideReal& big = la >= lb ? *this : o;
    const WideReal& small = la >= lb ? o : *this;
    double d = std::fabs(la - lb);
    if (d > 64.0) return big;
    double factor = 1.0 + big.sign_ * small.sign_ * std::exp2(-d);
    if (factor <= 0.0) return {};
    return from_log2(big.sign_, std::max(la, lb) + std::log2(factor));
}

WideReal WideReal::scaled(double factor) const {
    if (sign_ == 0 || factor == 0.0) return {};
    if (level_ == 0) {
        double p = v_ * factor;
        if (std::isfinite(p) && std::fabs(p) < std::exp2(kPromoteLog2)) return from_double(p);
    }
    return from_log2(sign_ * sgn(factor), log2_abs() + std::log2(std::fabs(factor)));
}

WideReal WideReal::scaled_pow2(int sign, double log2_factor) const {
    if (sign_ == 0 || sign == 0) return {};
    return from_log2(sign_ * sign, log2_abs() + log2_factor);
}

int WideReal::compare(const WideReal& o) const {
    if (sign_ != o.sign_) return sign_ < o.sign_ ? -1 : 1;
    if (sign_ == 0) return 0;
    double la = log2_abs(), lb = o.log2_abs();
    if (level_ == 0 && o.level_ == 0) return (v_ > o.v_) - (v_ < o.v_);
    int mag = (la > lb) - (la < lb);
    return sign_ > 0 ? mag : -mag;
}

BigLogNumber BigLogNumber::from_double(double v) {
    if (!std::isfinite(v)) throw Error(Errc::numerical, "non-finite value in BigLogNumber");
    BigLogNumber r;
    r.sign_ = sgn(v);
    if (r.sign_ != 0) r.log2_ = WideReal::from_double(std::log2(std::fabs(v)));
    return r;
}

BigLogNumber BigLogNumber::from_integer(const Integer& v) {
    BigLogNumber r;
    r.sign_ = sgn(v);
    if (r.sign_ != 0) r.log2_ = WideReal::from_double(tdi::log2_abs(v));
    return r;
}

BigLogNumber BigLogNumber::from_rational(const Rational& v) {
    BigLogNumber r;
    r.sign_ = sgn(v);
    if (r.sign_ != 0) r.log2_ = WideReal::from_double(tdi::log2_abs(v));
    return r;
}

BigLogNumber BigLogNumber::from_log2(double log2_magnitude, int sign) {
    return from_log2(WideReal::from_double(log2_magnitude), sign);
}

BigLogNumber BigLogNumber::from_log2(const WideReal& log2_magnitude, int sign) {
    BigLogNumber r;
    r.sign_ = sign > 0 ? 1 : (sign < 0 ? -1 : 0);
    if (r.sign_ != 0) r.log2_ = log2_magnitude;
    return r;
}

std::optional<double> BigLogNumber::to_double() const {
    if (sign_ == 0) return 0.0;
    auto l = log2_.to_double();
    if (!l || *l > 1023.0 || *l < -1022.0) return std::nullopt;
    return sign_ * std::exp2(*l);
}

BigLogNumber BigLogNumber::operator*(const BigLogNumber& o) const {
    if (sign_ == 0 || o.sign_ == 0) return {};
    return from_log2(log2_ + o.log2_, sign_ * o.sign_);
}

BigLogNumber BigLogNumber::operator/(const BigLogNumber& o) const {
    if (o.sign_ == 0) throw Error(Errc::numerical, "BigLogNumber division by zero");
    return *this * o.reciprocal();
}

BigLogNumber BigLogNumber::reciprocal() const {
    if (sign_ == 0) throw Error(Errc::numerical, "reciprocal of zero");
    return from_log2(-log2_, sign_);
}

BigLogNumber BigLogNumber::operator-() const {
    BigLogNumber r = *this;
    r.sign_ = -r.sign_;
    return r;
}

BigLogNumber BigLogNumber::operator+(const BigLogNumber& o) const {
    if (sign_ == 0) return o;
    if (o.sign_ == 0) return *this;
    WideReal diff = log2_ - o.log2_;
    const BigLogNumber& big = diff.sign() >= 0 ? *this : o;
    auto d = diff.to_double();
    if (!d || std::fabs(*d) > 64.0) return big;
    double factor = 1.0 + sign_ * o.sign_ * std::exp2(-std::fabs(*d));
    if (factor <= 0.0) return {};
    return from_log2(big.log2_ + WideReal::from_double(std::log2(factor)), big.sign_);
}

BigLogNumber BigLogNumber::pow(double e) const {
    if (sign_ < 0) throw Error(Errc::numerical, "real power of a negative BigLogNumber");
    if (e == 0.0) return from_double(1.0);
    if (sign_ == 0) {
        if (e < 0) throw Error(Errc::numerical, "negative power of zero");
        return {};
    }
    return from_log2(log2_.scaled(e), 1);
}

BigLogNumber BigLogNumber::pow(const BigLogNumber& e) const {
    if (sign_ < 0) throw Error(Errc::numerical, "real power of a negative BigLogNumber");
    if (e.sign_ == 0) return from_double(1.0);
    if (sign_ == 0) {
        if (e.sign_ < 0) throw Error(Errc::numerical, "negative power of zero");
        return {};
    }
    auto le = e.log2_.to_double();
    if (!le) throw Error(Errc::overflow, "exponent too large for BigLogNumber::pow");
    return from_log2(log2_.scaled_pow2(e.sign_, *le), 1);
}

int BigLogNumber::compare(const BigLogNumber& o) const {
    if (sign_ != o.sign_) return sign_ < o.sign_ ? -1 : 1;
    if (sign_ == 0) return 0;
    int mag = log2_.compare(o.log2_);
    return sign_ > 0 ? mag : -mag;
}

std::string BigLogNumber::to_string() const {
    std::ostringstream os;
    os.precision(17);
    if (sign_ == 0) return "0";
    if (sign_ < 0) os << '-';
    if (log2_.level() == 0) {
        os << "2^(" << log2_.raw() << ")";
    } else {
        os << "2^(" << (log2_.sign() < 0 ? "-" : "") << "2^(" << log2_.raw() << "))";
    }
    return os.str();
}

}  // namespace tdi
