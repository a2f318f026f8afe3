#ifndef PGEOM_RATIONAL_HPP
#define PGEOM_RATIONAL_HPP

#include "pgeom/bigint.hpp"
#include "pgeom/error.hpp"

#include <cmath>
#include <string>

namespace pgeom {

/// Exact rational number, reduced with positive denominator. Backed by
/// arbitrary-precision integers so intermediate polynomial arithmetic never
/// overflows.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { reduce(); }
    Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { reduce(); }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_integer() const { return den_.is_one(); }
    bool negative() const { return num_.sign() < 0; }

    double to_double() const {
        double n = num_.to_double();
        double d = den_.to_double();
        if (std::isfinite(n) && std::isfinite(d)) return n / d;
        // scale both sides down when either magnitude exceeds double range
        int shift = std::max(num_.bit_length(), den_.bit_length()) - 512;
        BigInt scale = BigInt(1);
        BigInt two = BigInt(2);
        for (int i = 0; i < shift; ++i) scale = scale * two;
        return (num_ / scale).to_double() / (den_ / scale).to_double();
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_.is_zero()) fail(ErrorKind::Domain, "rational division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }

    Rational abs() const { return negative() ? -*this : *this; }

    /// gcd of numerators over lcm of denominators, for content extraction.
    static Rational content_gcd(const Rational& a, const Rational& b) {
        BigInt n = BigInt::gcd(a.num_, b.num_);
        BigInt g = BigInt::gcd(a.den_, b.den_);
        return Rational(n, a.den_ / g * b.den_);
    }

    std::string str() const {
        if (den_.is_one()) return num_.str();
        return num_.str() + "/" + den_.str();
    }

private:
    void reduce() {
        if (den_.is_zero()) fail(ErrorKind::Domain, "rational with zero denominator");
        if (den_.sign() < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_.is_zero()) {
            den_ = BigInt(1);
            return;
        }
        BigInt g = BigInt::gcd(num_, den_);
        if (!g.is_one()) {
            num_ = num_ / g;
            den_ = den_ / g;
        }
    }

    BigInt num_;
    BigInt den_;
};

} // namespace pgeom

#endif
