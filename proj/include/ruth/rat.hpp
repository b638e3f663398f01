#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>

#include "ruth/error.hpp"

namespace ruth {

/*
** Exact rational scalar. Canonical form throughout: gcd(|num|, den) = 1 and
** den >= 1 (maintained by GMP's mpq canonicalization).
*/
class Rat {
public:
    Rat() : q_(0) {}
    Rat(long n) : q_(n) {}  // NOLINT: implicit on purpose, scalars appear everywhere
    Rat(long n, long d) : q_(n, d) {
        if (d == 0) throw Error("rational with zero denominator");
        q_.canonicalize();
    }
    explicit Rat(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    static Rat from_decimal_strings(const std::string& num, const std::string& den) {
        if (den == "0") throw Error("rational with zero denominator");
        Rat r;
        r.q_ = mpq_class(mpz_class(num), mpz_class(den));
        r.q_.canonicalize();
        return r;
    }

    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_one() const { return q_ == 1; }
    int sign() const { return sgn(q_); }

    Rat operator-() const { return Rat(mpq_class(-q_)); }
    Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
    Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
    Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw Error("division by zero rational");
        q_ /= o.q_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rat& a, const Rat& b) { return a.q_ < b.q_; }

    // "3", "-3", "3/2"
    std::string str() const {
        std::string s = q_.get_num().get_str();
        if (q_.get_den() != 1) s += "/" + q_.get_den().get_str();
        return s;
    }

private:
    mpq_class q_;
};

inline std::ostream& operator<<(std::ostream& os, const Rat& r);

}  // namespace ruth

#include <ostream>

namespace ruth {
inline std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }
}  // namespace ruth
