#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "numtheory.hpp"

namespace hypmodp {

// Exact rational, always stored in lowest form with positive denominator.
// GMP carries the integer arithmetic; this type owns the number-theoretic
// operations built on top (valuations, Dwork map, Pochhammer valuations).
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long n) : num_(n), den_(1) {}
    Rational(const mpz_class& n) : num_(n), den_(1) {}
    Rational(mpz_class n, mpz_class d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
    Rational(long n, long d) : num_(n), den_(d) { normalize(); }

    const mpz_class& num() const { return num_; }
    const mpz_class& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return sgn(num_); }

    friend Rational operator+(const Rational& a, const Rational& b)
    {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b)
    {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b)
    {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b)
    {
        if (b.num_ == 0)
            throw std::domain_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational operator-() const
    {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b)
    {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b)
    {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    mpz_class floor() const
    {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
        return q;
    }

    // Parses "a/b" or "a" with an optional leading '-'.
    static Rational parse(std::string_view text)
    {
        auto bad = [&] {
            throw std::invalid_argument("cannot parse rational: '" + std::string(text) + "'");
        };
        size_t first = text.find_first_not_of(" \t");
        size_t last = text.find_last_not_of(" \t");
        if (first == std::string_view::npos)
            bad();
        std::string s(text.substr(first, last - first + 1));
        size_t slash = s.find('/');
        try {
            if (slash == std::string::npos)
                return Rational(mpz_class(s), mpz_class(1));
            std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
            if (ns.empty() || ds.empty())
                bad();
            return Rational(mpz_class(ns), mpz_class(ds));
        } catch (const std::invalid_argument&) {
            bad();
        } catch (const std::domain_error&) {
            bad(); // zero denominator in the input text
        }
        return Rational(); // unreachable
    }

    std::string str() const
    {
        if (den_ == 1)
            return num_.get_str();
        return num_.get_str() + "/" + den_.get_str();
    }

private:
    void normalize()
    {
        if (den_ == 0)
            throw std::domain_error("Rational: zero denominator");
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
        if (g != 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    mpz_class num_;
    mpz_class den_;
};

inline std::int64_t vp_mpz(const mpz_class& x, std::uint64_t p)
{
    if (x == 0)
        throw std::domain_error("valuation of zero undefined");
    mpz_class n = x < 0 ? mpz_class(-x) : x;
    mpz_class prime(static_cast<unsigned long>(p));
    std::int64_t v = 0;
    mpz_class q, r;
    for (;;) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), prime.get_mpz_t());
        if (r != 0)
            break;
        n = q;
        ++v;
    }
    return v;
}

// p-adic valuation v_p(num) - v_p(den).
inline std::int64_t vp(const Rational& x, std::uint64_t p)
{
    if (x.is_zero())
        throw std::domain_error("valuation of zero undefined");
    std::int64_t v = vp_mpz(x.num(), p);
    if (v == 0 && x.den() != 1)
        v -= vp_mpz(x.den(), p);
    return v;
}

// Residue of a p-integral rational modulo p.
inline std::uint64_t residue_mod_p(const Rational& x, std::uint64_t p)
{
    mpz_class prime(static_cast<unsigned long>(p));
    mpz_class nr = x.num() % prime;
    if (nr < 0)
        nr += prime;
    mpz_class dr = x.den() % prime;
    std::uint64_t n = nr.get_ui();
    std::uint64_t d = dr.get_ui();
    if (d == 0)
        throw std::domain_error("residue_mod_p: denominator divisible by p");
    return mod_mul(n, mod_inverse(d, p), p);
}

// Valuation together with the unit part modulo p: x = unit * p^val up to
// a factor congruent to 1 mod p. The series layer works entirely in these.
struct ValUnit {
    std::int64_t val = 0;
    std::uint64_t unit = 1; // in {1, ..., p-1}
    std::uint64_t prime = 0;
};

inline ValUnit valunit_of_rational(const Rational& x, std::uint64_t p)
{
    if (x.is_zero())
        throw std::domain_error("valunit of zero undefined");
    std::int64_t vn = vp_mpz(x.num(), p);
    std::int64_t vd = vp_mpz(x.den(), p);
    mpz_class prime(static_cast<unsigned long>(p));
    mpz_class pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), prime.get_mpz_t(), static_cast<unsigned long>(vn));
    mpz_pow_ui(pd.get_mpz_t(), prime.get_mpz_t(), static_cast<unsigned long>(vd));
    Rational u(x.num() / pn, x.den() / pd);
    return ValUnit{vn - vd, residue_mod_p(u, p), p};
}

// Dwork map: the unique y in Z_(p) with p*y - x in {0, ..., p-1}.
// For x = a/b in lowest form the result is y/b with p*y == a (mod b).
inline Rational dwork(const Rational& x, std::uint64_t p)
{
    if (x.is_zero())
        return Rational(0);
    if (vp(x, p) < 0)
        throw std::domain_error("dwork: parameter not p-integral");
    mpz_class prime(static_cast<unsigned long>(p));
    // s is the unique residue of -x mod p among {0..p-1}: x + s in pZ_(p).
    // With x = a/b, s == -a*b^{-1} mod p.
    std::uint64_t a_mod = 0;
    {
        mpz_class nr = x.num() % prime;
        if (nr < 0)
            nr += prime;
        mpz_class dr = x.den() % prime;
        a_mod = mod_mul(nr.get_ui(), mod_inverse(dr.get_ui(), p), p);
    }
    std::uint64_t s = mod_neg(a_mod, p);
    Rational y = (x + Rational(static_cast<long>(s))) / Rational(static_cast<long>(p));
    return y;
}

struct DworkOrbit {
    std::vector<Rational> orbit; // D(x), D^2(x), ..., D^period(x)
    std::size_t period = 0;
};

// Iterates the Dwork map until the starting point recurs. For x in (0,1]
// with v_p(x) = 0 the period divides the order of p modulo den(x).
inline DworkOrbit dwork_orbit(const Rational& x, std::uint64_t p, std::size_t max_steps = 4096)
{
    if (!(x > Rational(0) && x <= Rational(1)))
        throw std::invalid_argument("dwork_orbit: x must lie in (0, 1]");
    if (vp(x, p) != 0)
        throw std::invalid_argument("dwork_orbit: v_p(x) must be 0");
    DworkOrbit out;
    Rational cur = x;
    for (std::size_t i = 0; i < max_steps; ++i) {
        cur = dwork(cur, p);
        out.orbit.push_back(cur);
        if (cur == x) {
            out.period = i + 1;
            return out;
        }
    }
    throw std::runtime_error("dwork_orbit: no repetition within max_steps");
}

inline Rational dwork_iter(Rational x, std::uint64_t p, std::uint64_t times)
{
    for (std::uint64_t i = 0; i < times; ++i)
        x = dwork(x, p);
    return x;
}

// v_p((gamma)_r) computed factor by factor: each gamma + t contributes
// v_p of its numerator (p never divides the denominator of a p-integral
// gamma).
inline std::int64_t pochhammer_vp(const Rational& gamma, std::uint64_t r, std::uint64_t p)
{
    if (vp(gamma, p) < 0)
        throw std::domain_error("pochhammer_vp: gamma not p-integral");
    std::int64_t total = 0;
    mpz_class a = gamma.num();
    const mpz_class& b = gamma.den();
    for (std::uint64_t t = 0; t < r; ++t) {
        if (a == 0)
            throw std::domain_error("pochhammer_vp: Pochhammer hits zero");
        total += vp_mpz(a, p);
        a += b;
    }
    return total;
}

} // namespace hypmodp
