// Exact rational and Gaussian-rational arithmetic on 64-bit storage.
// Intermediates run through __int128; anything that would not reduce back
// into 64 bits throws std::overflow_error instead of wrapping.
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cvqc {

using i64 = std::int64_t;
using i128 = __int128;

namespace detail {

inline i64 narrow(i128 v) {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
        throw std::overflow_error("rational overflow");
    return static_cast<i64>(v);
}

inline i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace detail

class Rational {
  public:
    Rational() = default;
    Rational(i64 n) : num_(n), den_(1) {}
    Rational(i64 n, i64 d) { assign(n, d); }

    static Rational from_parts128(i128 n, i128 d) {
        if (d == 0) throw std::domain_error("rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        i128 g = detail::gcd128(n, d);
        if (g > 1) { n /= g; d /= g; }
        Rational r;
        r.num_ = detail::narrow(n);
        r.den_ = detail::narrow(d);
        return r;
    }

    i64 num() const { return num_; }
    i64 den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_parts128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                             i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_parts128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                             i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_parts128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational: division by zero");
        return from_parts128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = detail::narrow(-i128(num_));
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational pow(long e) const {
        if (e < 0) {
            if (num_ == 0) throw std::domain_error("rational: 0^negative");
            Rational inv(den_, num_);
            return inv.pow(-e);
        }
        Rational acc(1);
        Rational base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            base = (e > 1) ? base * base : base;
            e >>= 1;
        }
        return acc;
    }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    double to_double() const { return double(num_) / double(den_); }
    long double to_long_double() const {
        return static_cast<long double>(num_) / static_cast<long double>(den_);
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

  private:
    void assign(i64 n, i64 d) {
        if (d == 0) throw std::domain_error("rational: zero denominator");
        if (d < 0) { n = detail::narrow(-i128(n)); d = detail::narrow(-i128(d)); }
        i64 g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        num_ = n;
        den_ = d;
    }

    i64 num_ = 0;
    i64 den_ = 1;
};

// Gaussian rational a + b*i, used by the operator algebra.
class CRat {
  public:
    CRat() = default;
    CRat(Rational re) : re_(re) {}
    CRat(i64 re) : re_(re) {}
    CRat(Rational re, Rational im) : re_(re), im_(im) {}

    static CRat i() { return CRat(Rational(0), Rational(1)); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }

    CRat conj() const { return CRat(re_, -im_); }

    friend CRat operator+(const CRat& a, const CRat& b) {
        return CRat(a.re_ + b.re_, a.im_ + b.im_);
    }
    friend CRat operator-(const CRat& a, const CRat& b) {
        return CRat(a.re_ - b.re_, a.im_ - b.im_);
    }
    friend CRat operator*(const CRat& a, const CRat& b) {
        return CRat(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
    }
    CRat operator-() const { return CRat(-re_, -im_); }
    CRat& operator+=(const CRat& o) { return *this = *this + o; }
    CRat& operator-=(const CRat& o) { return *this = *this - o; }
    CRat& operator*=(const CRat& o) { return *this = *this * o; }

    friend bool operator==(const CRat& a, const CRat& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const CRat& a, const CRat& b) { return !(a == b); }

    std::string str() const {
        if (im_.is_zero()) return re_.str();
        if (re_.is_zero()) return im_.is_one() ? "i" : (im_ == Rational(-1) ? "-i" : im_.str() + "i");
        std::string s = re_.str();
        if (im_.sign() >= 0) s += "+";
        s += (im_.is_one() ? "" : (im_ == Rational(-1) ? "-" : im_.str())) + std::string("i");
        return s;
    }

  private:
    Rational re_;
    Rational im_;
};

// Element of Q(sqrt(2)): a + b*sqrt(2).  Only the circuit wrapper check needs
// this ring; half-beamsplitter push-throughs stay exact in it.
class Q2 {
  public:
    Q2() = default;
    Q2(Rational a) : a_(a) {}
    Q2(i64 a) : a_(a) {}
    Q2(Rational a, Rational b) : a_(a), b_(b) {}

    static Q2 sqrt2() { return Q2(Rational(0), Rational(1)); }
    static Q2 inv_sqrt2() { return Q2(Rational(0), Rational(1, 2)); }

    const Rational& rat_part() const { return a_; }
    const Rational& sqrt2_part() const { return b_; }
    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }

    friend Q2 operator+(const Q2& x, const Q2& y) { return Q2(x.a_ + y.a_, x.b_ + y.b_); }
    friend Q2 operator-(const Q2& x, const Q2& y) { return Q2(x.a_ - y.a_, x.b_ - y.b_); }
    friend Q2 operator*(const Q2& x, const Q2& y) {
        return Q2(x.a_ * y.a_ + Rational(2) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_);
    }
    Q2 operator-() const { return Q2(-a_, -b_); }
    Q2& operator+=(const Q2& o) { return *this = *this + o; }
    Q2& operator*=(const Q2& o) { return *this = *this * o; }
    friend bool operator==(const Q2& x, const Q2& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
    friend bool operator!=(const Q2& x, const Q2& y) { return !(x == y); }

    std::string str() const {
        if (b_.is_zero()) return a_.str();
        std::string s;
        if (!a_.is_zero()) s = a_.str() + (b_.sign() >= 0 ? "+" : "");
        return s + b_.str() + "*sqrt2";
    }

  private:
    Rational a_;
    Rational b_;
};

inline i64 binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    i128 r = 1;
    for (int j = 1; j <= k; ++j) {
        r = r * (n - k + j) / j;
    }
    return detail::narrow(r);
}

inline i64 factorial(int n) {
    i128 r = 1;
    for (int j = 2; j <= n; ++j) r *= j;
    return detail::narrow(r);
}

// Multinomial coefficient k! / (e_1! e_2! ... ), with k = sum of exponents.
template <typename Vec>
inline i64 multinomial(const Vec& exps) {
    int total = 0;
    i128 denom = 1;
    for (auto e : exps) {
        total += int(e);
        denom *= factorial(int(e));
    }
    return detail::narrow(i128(factorial(total)) / denom);
}

} // namespace cvqc
