#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace partdist {

using int128 = __int128;
using uint128 = unsigned __int128;

inline uint128 gcd128(uint128 a, uint128 b) {
    while (b != 0) {
        uint128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// C(x, 2) without intermediate overflow for any nonnegative 64-bit x.
inline long long choose2(long long x) {
    if (x < 2) return 0;
    return (x % 2 == 0) ? (x / 2) * (x - 1) : x * ((x - 1) / 2);
}

inline long double to_long_double(int128 v) {
    return static_cast<long double>(v);
}

// Exact reduced fraction. Stored on 64 bits after reduction; all intermediate
// products run on 128 bits and a post-reduction range check throws instead of
// wrapping silently.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long value) : num_(value), den_(1) {}
    Rational(long long num, long long den) { assign(num, den); }

    static Rational from_int128(int128 num, int128 den) {
        Rational r;
        r.assign128(num, den);
        return r;
    }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_int128(int128(a.num_) * b.den_ + int128(b.num_) * a.den_,
                           int128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_int128(int128(a.num_) * b.den_ - int128(b.num_) * a.den_,
                           int128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_int128(int128(a.num_) * b.num_, int128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return from_int128(int128(a.num_) * b.den_, int128(a.den_) * b.num_);
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
        return int128(a.num_) * b.den_ < int128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    double to_double() const {
        return static_cast<double>(static_cast<long double>(num_) /
                                   static_cast<long double>(den_));
    }

    // Nearest integer of value * 10^places, halves rounded away from zero.
    long long round_scaled(int places) const {
        int128 scale = 1;
        for (int i = 0; i < places; ++i) scale *= 10;
        int128 n = int128(num_) * scale;
        int128 q;
        if (n >= 0)
            q = (2 * n + den_) / (2 * int128(den_));
        else
            q = -((-2 * n + den_) / (2 * int128(den_)));
        return static_cast<long long>(q);
    }

    std::string to_string() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) {
            s += '/';
            s += std::to_string(den_);
        }
        return s;
    }

    // Exact fixed-point rendering with the stated number of decimals.
    std::string to_decimal_string(int places) const {
        long long scaled = round_scaled(places);
        bool neg = scaled < 0;
        unsigned long long mag = neg ? 0ULL - static_cast<unsigned long long>(scaled)
                                     : static_cast<unsigned long long>(scaled);
        std::string digits = std::to_string(mag);
        if (static_cast<int>(digits.size()) <= places)
            digits.insert(0, places + 1 - digits.size(), '0');
        std::string out = neg ? "-" : "";
        out += digits.substr(0, digits.size() - places);
        if (places > 0) {
            out += '.';
            out += digits.substr(digits.size() - places);
        }
        return out;
    }

private:
    void assign(long long num, long long den) { assign128(int128(num), int128(den)); }

    void assign128(int128 num, int128 den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        if (num == 0) {
            num_ = 0;
            den_ = 1;
            return;
        }
        uint128 un = num < 0 ? uint128(-num) : uint128(num);
        uint128 g = gcd128(un, uint128(den));
        num /= int128(g);
        den /= int128(g);
        constexpr int128 lo = std::numeric_limits<long long>::min();
        constexpr int128 hi = std::numeric_limits<long long>::max();
        if (num < lo || num > hi || den > hi)
            throw std::overflow_error("Rational: value exceeds 64-bit storage after reduction");
        num_ = static_cast<long long>(num);
        den_ = static_cast<long long>(den);
    }

    long long num_;
    long long den_;
};

}  // namespace partdist
