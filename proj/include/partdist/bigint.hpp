#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "partdist/rational.hpp"

namespace partdist {

// Unsigned arbitrary-precision integer, little-endian 64-bit limbs.
// Covers the handful of quantities that overflow 128 bits: composition
// counts J(n, k), binomial tails of the folded distribution, and
// inclusion-exclusion totals.
class BigUint {
public:
    BigUint() = default;
    BigUint(unsigned long long v) {
        if (v != 0) limbs_.push_back(v);
    }

    bool is_zero() const { return limbs_.empty(); }

    static int compare(const BigUint& a, const BigUint& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
        for (std::size_t i = a.limbs_.size(); i-- > 0;) {
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
        }
        return 0;
    }

    friend bool operator==(const BigUint& a, const BigUint& b) { return compare(a, b) == 0; }
    friend bool operator!=(const BigUint& a, const BigUint& b) { return compare(a, b) != 0; }
    friend bool operator<(const BigUint& a, const BigUint& b) { return compare(a, b) < 0; }
    friend bool operator<=(const BigUint& a, const BigUint& b) { return compare(a, b) <= 0; }
    friend bool operator>(const BigUint& a, const BigUint& b) { return compare(a, b) > 0; }
    friend bool operator>=(const BigUint& a, const BigUint& b) { return compare(a, b) >= 0; }

    BigUint& operator+=(const BigUint& o) {
        limbs_.resize(std::max(limbs_.size(), o.limbs_.size()), 0);
        unsigned long long carry = 0;
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            uint128 t = uint128(limbs_[i]) + carry;
            if (i < o.limbs_.size()) t += o.limbs_[i];
            limbs_[i] = static_cast<unsigned long long>(t);
            carry = static_cast<unsigned long long>(t >> 64);
        }
        if (carry) limbs_.push_back(carry);
        return *this;
    }

    // Requires *this >= o.
    BigUint& operator-=(const BigUint& o) {
        if (*this < o) throw std::underflow_error("BigUint: negative subtraction result");
        unsigned long long borrow = 0;
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            uint128 sub = borrow;
            if (i < o.limbs_.size()) sub += o.limbs_[i];
            uint128 cur = uint128(limbs_[i]);
            if (cur >= sub) {
                limbs_[i] = static_cast<unsigned long long>(cur - sub);
                borrow = 0;
            } else {
                limbs_[i] = static_cast<unsigned long long>((uint128(1) << 64) + cur - sub);
                borrow = 1;
            }
        }
        trim();
        return *this;
    }

    friend BigUint operator+(BigUint a, const BigUint& b) { return a += b; }
    friend BigUint operator-(BigUint a, const BigUint& b) { return a -= b; }

    BigUint& mul_u64(unsigned long long m) {
        if (m == 0 || is_zero()) {
            limbs_.clear();
            return *this;
        }
        unsigned long long carry = 0;
        for (auto& limb : limbs_) {
            uint128 t = uint128(limb) * m + carry;
            limb = static_cast<unsigned long long>(t);
            carry = static_cast<unsigned long long>(t >> 64);
        }
        if (carry) limbs_.push_back(carry);
        return *this;
    }

    // Exact division helper; returns remainder.
    unsigned long long divmod_u64(unsigned long long d) {
        if (d == 0) throw std::domain_error("BigUint: division by zero");
        uint128 rem = 0;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            uint128 cur = (rem << 64) | limbs_[i];
            limbs_[i] = static_cast<unsigned long long>(cur / d);
            rem = cur % d;
        }
        trim();
        return static_cast<unsigned long long>(rem);
    }

    BigUint& shift_left_bits(unsigned bits) {
        if (is_zero() || bits == 0) return *this;
        unsigned whole = bits / 64, part = bits % 64;
        limbs_.insert(limbs_.begin(), whole, 0);
        if (part) {
            unsigned long long carry = 0;
            for (auto& limb : limbs_) {
                unsigned long long next = limb >> (64 - part);
                limb = (limb << part) | carry;
                carry = next;
            }
            if (carry) limbs_.push_back(carry);
        }
        return *this;
    }

    BigUint& shift_right_bits(unsigned bits) {
        unsigned whole = bits / 64, part = bits % 64;
        if (whole >= limbs_.size()) {
            limbs_.clear();
            return *this;
        }
        limbs_.erase(limbs_.begin(), limbs_.begin() + whole);
        if (part) {
            for (std::size_t i = 0; i < limbs_.size(); ++i) {
                limbs_[i] >>= part;
                if (i + 1 < limbs_.size()) limbs_[i] |= limbs_[i + 1] << (64 - part);
            }
        }
        trim();
        return *this;
    }

    unsigned trailing_zero_bits() const {
        if (is_zero()) return 0;
        unsigned bits = 0;
        for (auto limb : limbs_) {
            if (limb == 0) {
                bits += 64;
            } else {
                bits += static_cast<unsigned>(__builtin_ctzll(limb));
                break;
            }
        }
        return bits;
    }

    long double to_long_double() const {
        long double v = 0.0L;
        for (std::size_t i = limbs_.size(); i-- > 0;)
            v = v * 18446744073709551616.0L + static_cast<long double>(limbs_[i]);
        return v;
    }

    bool fits_u64() const { return limbs_.size() <= 1; }
    unsigned long long to_u64() const {
        if (!fits_u64()) throw std::overflow_error("BigUint: does not fit in 64 bits");
        return limbs_.empty() ? 0 : limbs_[0];
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        BigUint tmp = *this;
        std::string out;
        while (!tmp.is_zero()) {
            unsigned long long chunk = tmp.divmod_u64(1000000000000000000ULL);
            std::string part = std::to_string(chunk);
            if (tmp.is_zero()) {
                out.insert(0, part);
            } else {
                out.insert(0, std::string(18 - part.size(), '0') + part);
            }
        }
        return out;
    }

    // C(n, k) computed exactly (every intermediate division is exact).
    static BigUint binomial(unsigned long long n, unsigned long long k) {
        if (k > n) return BigUint(0);
        if (k > n - k) k = n - k;
        BigUint result(1);
        for (unsigned long long i = 1; i <= k; ++i) {
            result.mul_u64(n - k + i);
            result.divmod_u64(i);
        }
        return result;
    }

    static BigUint pow2(unsigned bits) {
        BigUint one(1);
        one.shift_left_bits(bits);
        return one;
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }

    std::vector<unsigned long long> limbs_;
};

// Exact fraction with a power-of-two denominator: num / 2^exp2.  The folded
// binomial distribution lives entirely on this form.
struct DyadicRational {
    BigUint num;
    unsigned exp2 = 0;

    void reduce() {
        if (num.is_zero()) {
            exp2 = 0;
            return;
        }
        unsigned k = std::min(num.trailing_zero_bits(), exp2);
        num.shift_right_bits(k);
        exp2 -= k;
    }

    double to_double() const {
        return static_cast<double>(std::ldexp(static_cast<double>(num.to_long_double()),
                                              -static_cast<int>(exp2)));
    }

    std::string to_string() const {
        return num.to_string() + "/" + BigUint::pow2(exp2).to_string();
    }

    friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
        BigUint an = a.num, bn = b.num;
        if (a.exp2 < b.exp2)
            an.shift_left_bits(b.exp2 - a.exp2);
        else
            bn.shift_left_bits(a.exp2 - b.exp2);
        return an == bn;
    }
};

}  // namespace partdist
