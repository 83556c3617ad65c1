#include "loopforms/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace loopforms {

Rational::Rational(long n, long d)
{
    if (d == 0)
        throw std::domain_error("rational with zero denominator");
    v_ = mpq_class(n, d);
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o)
{
    if (o.is_zero())
        throw std::domain_error("rational division by zero");
    v_ /= o.v_;
    return *this;
}

Rational Rational::inverse() const
{
    if (is_zero())
        throw std::domain_error("inverse of zero");
    return Rational(mpq_class(1) / v_);
}

Rational Rational::parse(const std::string& s)
{
    if (s.empty())
        throw std::invalid_argument("empty rational literal");
    mpq_class q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
    if (q.get_den() == 0)
        throw std::domain_error("rational with zero denominator: " + s);
    q.canonicalize();
    return Rational(q);
}

std::string Rational::str() const
{
    if (v_.get_den() == 1)
        return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rational& r)
{
    return os << r.str();
}

}  // namespace loopforms
