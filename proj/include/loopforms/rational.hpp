#ifndef LOOPFORMS_RATIONAL_HPP
#define LOOPFORMS_RATIONAL_HPP

#include <gmpxx.h>

#include <iosfwd>
#include <string>

namespace loopforms {

/* Exact rational scalar over Q. Invariants (maintained by mpq canonicalization):
 * gcd(|num|, den) = 1 and den > 0. Serialized as "p" or "p/q", never a float. */
class Rational {
  public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long n, long d);
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    /* accepts "p", "-p", "p/q" */
    static Rational parse(const std::string& s);

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }

    bool is_zero() const { return v_ == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }

    Rational inverse() const;
    Rational abs() const { return Rational(mpq_class(::abs(v_))); }

    /* canonical form: "2", "-5", "7/3" */
    std::string str() const;

  private:
    mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace loopforms

#endif
