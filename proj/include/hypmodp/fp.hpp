#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "numtheory.hpp"

namespace hypmodp {

// Sparse polynomial over F_p. Zero coefficients are never stored; the
// relation polynomials this library produces have few terms spread over
// Frobenius-sized degrees, so a map keyed by exponent is the right shape.
class FpPoly {
public:
    using Terms = std::map<std::uint64_t, std::uint64_t>;

    FpPoly() = default;
    explicit FpPoly(std::uint64_t p) : p_(p) { require_modulus(p); }
    FpPoly(std::uint64_t p, std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> ts)
        : FpPoly(p)
    {
        for (auto& [e, c] : ts)
            set(e, c);
    }

    static FpPoly zero(std::uint64_t p) { return FpPoly(p); }
    static FpPoly constant(std::uint64_t p, std::uint64_t c)
    {
        FpPoly f(p);
        f.set(0, c);
        return f;
    }
    static FpPoly monomial(std::uint64_t p, std::uint64_t exp, std::uint64_t c)
    {
        FpPoly f(p);
        f.set(exp, c);
        return f;
    }

    std::uint64_t prime() const { return p_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Degree of the zero polynomial is represented as -1.
    std::int64_t degree() const
    {
        return terms_.empty() ? -1 : static_cast<std::int64_t>(terms_.rbegin()->first);
    }

    std::uint64_t coeff(std::uint64_t exp) const
    {
        auto it = terms_.find(exp);
        return it == terms_.end() ? 0 : it->second;
    }

    std::uint64_t leading_coeff() const
    {
        return terms_.empty() ? 0 : terms_.rbegin()->second;
    }

    std::uint64_t trailing_exp() const
    {
        if (terms_.empty())
            throw std::domain_error("trailing_exp of zero polynomial");
        return terms_.begin()->first;
    }

    void set(std::uint64_t exp, std::uint64_t c)
    {
        c %= p_;
        if (c == 0)
            terms_.erase(exp);
        else
            terms_[exp] = c;
    }

    void add_to(std::uint64_t exp, std::uint64_t c)
    {
        c %= p_;
        if (c == 0)
            return;
        auto [it, fresh] = terms_.try_emplace(exp, c);
        if (!fresh) {
            it->second = mod_add(it->second, c, p_);
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    friend bool operator==(const FpPoly& a, const FpPoly& b)
    {
        return a.p_ == b.p_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const FpPoly& a, const FpPoly& b) { return !(a == b); }

    friend FpPoly operator+(const FpPoly& a, const FpPoly& b)
    {
        check_same_prime(a, b);
        FpPoly r = a;
        for (auto& [e, c] : b.terms_)
            r.add_to(e, c);
        return r;
    }

    friend FpPoly operator-(const FpPoly& a, const FpPoly& b)
    {
        check_same_prime(a, b);
        FpPoly r = a;
        for (auto& [e, c] : b.terms_)
            r.add_to(e, mod_neg(c, b.p_));
        return r;
    }

    FpPoly operator-() const
    {
        FpPoly r(p_);
        for (auto& [e, c] : terms_)
            r.terms_[e] = mod_neg(c, p_);
        return r;
    }

    friend FpPoly operator*(const FpPoly& a, const FpPoly& b)
    {
        check_same_prime(a, b);
        FpPoly r(a.p_);
        if (a.is_zero() || b.is_zero())
            return r;
        std::uint64_t dr = static_cast<std::uint64_t>(a.degree() + b.degree());
        // Dense accumulator when the result fits comfortably; the term
        // loops still only touch stored coefficients.
        if (dr < (1u << 23)) {
            std::vector<std::uint64_t> acc(dr + 1, 0);
            for (auto& [ea, ca] : a.terms_)
                for (auto& [eb, cb] : b.terms_) {
                    std::uint64_t& slot = acc[ea + eb];
                    slot = (slot + ca * cb) % a.p_;
                }
            for (std::uint64_t e = 0; e <= dr; ++e)
                if (acc[e] != 0)
                    r.terms_.emplace_hint(r.terms_.end(), e, acc[e]);
            return r;
        }
        for (auto& [ea, ca] : a.terms_)
            for (auto& [eb, cb] : b.terms_)
                r.add_to(ea + eb, mod_mul(ca, cb, a.p_));
        return r;
    }

    FpPoly scaled(std::uint64_t c) const
    {
        c %= p_;
        FpPoly r(p_);
        if (c == 0)
            return r;
        for (auto& [e, k] : terms_)
            r.terms_[e] = mod_mul(k, c, p_);
        return r;
    }

    FpPoly shifted(std::uint64_t zpow) const
    {
        FpPoly r(p_);
        for (auto& [e, c] : terms_)
            r.terms_[e + zpow] = c;
        return r;
    }

    FpPoly monic() const
    {
        if (is_zero())
            throw std::domain_error("monic of zero polynomial");
        return scaled(mod_inverse(leading_coeff(), p_));
    }

    // Substitutes z -> z^(p^e); over F_p this equals raising to the p^e-th
    // power, coefficients unchanged.
    FpPoly frobenius(std::uint64_t e) const
    {
        if (e == 0)
            return *this;
        std::uint64_t q = 1;
        for (std::uint64_t i = 0; i < e; ++i) {
            if (q > (std::uint64_t{1} << 62) / p_)
                throw std::overflow_error("frobenius: exponent overflow");
            q *= p_;
        }
        FpPoly r(p_);
        for (auto& [exp, c] : terms_) {
            if (exp > 0 && q > (~std::uint64_t{0}) / exp)
                throw std::overflow_error("frobenius: exponent overflow");
            r.terms_[exp * q] = c;
        }
        return r;
    }

    FpPoly pow(std::uint64_t k) const
    {
        FpPoly acc = FpPoly::constant(p_, 1);
        FpPoly base = *this;
        while (k > 0) {
            if (k & 1)
                acc = acc * base;
            k >>= 1;
            if (k > 0)
                base = base * base;
        }
        return acc;
    }

    std::uint64_t eval(std::uint64_t x) const
    {
        // Horner over stored terms, highest first.
        std::uint64_t acc = 0;
        std::uint64_t prev_exp = 0;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (first) {
                acc = it->second;
                prev_exp = it->first;
                first = false;
                continue;
            }
            acc = mod_mul(acc, mod_pow(x, prev_exp - it->first, p_), p_);
            acc = mod_add(acc, it->second, p_);
            prev_exp = it->first;
        }
        if (first)
            return 0;
        return mod_mul(acc, mod_pow(x, prev_exp, p_), p_);
    }

    std::string str(std::size_t max_terms = 12) const
    {
        if (is_zero())
            return "0";
        std::string out;
        std::size_t shown = 0;
        for (auto& [e, c] : terms_) {
            if (shown == max_terms) {
                out += " ... (+" + std::to_string(terms_.size() - shown) + " more)";
                break;
            }
            if (shown > 0)
                out += " + ";
            if (e == 0)
                out += std::to_string(c);
            else {
                if (c != 1)
                    out += std::to_string(c) + "*";
                out += e == 1 ? "z" : "z^" + std::to_string(e);
            }
            ++shown;
        }
        return out;
    }

private:
    static void check_same_prime(const FpPoly& a, const FpPoly& b)
    {
        if (a.p_ != b.p_)
            throw std::invalid_argument("FpPoly: mismatched primes");
    }

    std::uint64_t p_ = 2;
    Terms terms_;
};

struct FpPolyDivRem {
    FpPoly quot;
    FpPoly rem;
};

inline FpPolyDivRem poly_divrem(const FpPoly& a, const FpPoly& b)
{
    if (a.prime() != b.prime())
        throw std::invalid_argument("poly_divrem: mismatched primes");
    if (b.is_zero())
        throw std::domain_error("poly_divrem: division by zero polynomial");
    std::uint64_t p = a.prime();
    std::uint64_t inv_lead = mod_inverse(b.leading_coeff(), p);
    std::uint64_t db = static_cast<std::uint64_t>(b.degree());

    // Dense long division once the dividend fits; long remainder chains
    // densify anyway, and flat arrays beat node churn there.
    if (!a.is_zero() && static_cast<std::uint64_t>(a.degree()) < (1u << 23)) {
        std::vector<std::uint64_t> rem(static_cast<std::size_t>(a.degree()) + 1, 0);
        for (auto& [e, c] : a.terms())
            rem[e] = c;
        FpPoly quot(p);
        for (std::size_t i = rem.size(); i-- > 0;) {
            if (i < db)
                break;
            if (rem[i] == 0)
                continue;
            std::uint64_t shift = i - db;
            std::uint64_t c = mod_mul(rem[i], inv_lead, p);
            quot.set(shift, c);
            for (auto& [e, k] : b.terms())
                rem[e + shift] = mod_sub(rem[e + shift], mod_mul(k, c, p), p);
        }
        FpPoly rpoly(p);
        for (std::size_t i = 0; i < std::min<std::size_t>(rem.size(), db); ++i)
            if (rem[i] != 0)
                rpoly.set(i, rem[i]);
        return {std::move(quot), std::move(rpoly)};
    }

    FpPoly quot(p);
    FpPoly rem = a;
    while (!rem.is_zero() && rem.degree() >= b.degree()) {
        std::uint64_t shift = static_cast<std::uint64_t>(rem.degree()) - db;
        std::uint64_t c = mod_mul(rem.leading_coeff(), inv_lead, p);
        quot.add_to(shift, c);
        for (auto& [e, k] : b.terms())
            rem.add_to(e + shift, mod_neg(mod_mul(k, c, p), p));
    }
    return {std::move(quot), std::move(rem)};
}

inline FpPoly poly_exact_div(const FpPoly& a, const FpPoly& b)
{
    auto [q, r] = poly_divrem(a, b);
    if (!r.is_zero())
        throw std::domain_error("poly_exact_div: division not exact");
    return q;
}

// Monic gcd via the Euclidean algorithm in F_p[z].
inline FpPoly poly_gcd(FpPoly a, FpPoly b)
{
    if (a.is_zero() && b.is_zero())
        throw std::domain_error("poly_gcd: both arguments zero");
    while (!b.is_zero()) {
        FpPoly r = poly_divrem(a, b).rem;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

inline FpPoly poly_lcm(const FpPoly& a, const FpPoly& b)
{
    if (a.is_zero() || b.is_zero())
        throw std::domain_error("poly_lcm: zero argument");
    return poly_exact_div(a * b, poly_gcd(a, b)).monic();
}

// Truncated power series over F_p: dense coefficients for indices
// 0 .. truncation_order-1.
class FpSeries {
public:
    FpSeries() = default;
    FpSeries(std::uint64_t p, std::size_t order) : p_(p), coeffs_(order, 0)
    {
        require_modulus(p);
    }
    FpSeries(std::uint64_t p, std::vector<std::uint64_t> coeffs) : p_(p), coeffs_(std::move(coeffs))
    {
        require_modulus(p);
        for (auto& c : coeffs_)
            c %= p_;
    }

    std::uint64_t prime() const { return p_; }
    std::size_t order() const { return coeffs_.size(); }
    const std::vector<std::uint64_t>& coeffs() const { return coeffs_; }

    std::uint64_t operator[](std::size_t i) const { return coeffs_.at(i); }
    void set(std::size_t i, std::uint64_t c) { coeffs_.at(i) = c % p_; }

    FpSeries truncated(std::size_t order) const
    {
        FpSeries r(p_, std::min(order, coeffs_.size()));
        std::copy_n(coeffs_.begin(), r.order(), r.coeffs_.begin());
        return r;
    }

    bool is_zero() const
    {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](std::uint64_t c) { return c == 0; });
    }

    // Index of the first nonzero coefficient, or -1.
    std::int64_t first_nonzero() const
    {
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            if (coeffs_[i] != 0)
                return static_cast<std::int64_t>(i);
        return -1;
    }

    friend FpSeries operator+(const FpSeries& a, const FpSeries& b)
    {
        check_compat(a, b);
        FpSeries r(a.p_, std::min(a.order(), b.order()));
        for (std::size_t i = 0; i < r.order(); ++i)
            r.coeffs_[i] = mod_add(a.coeffs_[i], b.coeffs_[i], a.p_);
        return r;
    }

    friend FpSeries operator-(const FpSeries& a, const FpSeries& b)
    {
        check_compat(a, b);
        FpSeries r(a.p_, std::min(a.order(), b.order()));
        for (std::size_t i = 0; i < r.order(); ++i)
            r.coeffs_[i] = mod_sub(a.coeffs_[i], b.coeffs_[i], a.p_);
        return r;
    }

    friend FpSeries operator*(const FpSeries& a, const FpSeries& b)
    {
        check_compat(a, b);
        FpSeries r(a.p_, std::min(a.order(), b.order()));
        for (std::size_t i = 0; i < r.order(); ++i) {
            if (a.coeffs_[i] == 0)
                continue;
            for (std::size_t j = 0; i + j < r.order(); ++j) {
                std::uint64_t& slot = r.coeffs_[i + j];
                slot = (slot + a.coeffs_[i] * b.coeffs_[j]) % a.p_;
            }
        }
        return r;
    }

    friend bool operator==(const FpSeries& a, const FpSeries& b)
    {
        return a.p_ == b.p_ && a.coeffs_ == b.coeffs_;
    }

private:
    static void check_compat(const FpSeries& a, const FpSeries& b)
    {
        if (a.p_ != b.p_)
            throw std::invalid_argument("FpSeries: mismatched primes");
    }

    std::uint64_t p_ = 2;
    std::vector<std::uint64_t> coeffs_;
};

inline FpSeries poly_to_series(const FpPoly& f, std::size_t order)
{
    FpSeries s(f.prime(), order);
    for (auto& [e, c] : f.terms())
        if (e < order)
            s.set(e, c);
    return s;
}

// Frobenius power of a series: coefficient at m moves to m * p^e,
// truncated at the input's order.
inline FpSeries series_frobenius(const FpSeries& f, std::uint64_t e)
{
    if (e == 0)
        return f;
    std::uint64_t q = 1;
    for (std::uint64_t i = 0; i < e; ++i)
        q *= f.prime();
    FpSeries r(f.prime(), f.order());
    for (std::size_t m = 0; m * q < f.order(); ++m)
        r.set(m * q, f[m]);
    return r;
}

// Cartier operator: output coefficient j is the input coefficient jp + r.
inline FpSeries cartier(const FpSeries& f, std::uint64_t r)
{
    std::uint64_t p = f.prime();
    if (r >= p)
        throw std::invalid_argument("cartier: residue index out of range");
    std::size_t n = f.order();
    std::size_t out_order = n >= r ? (n - r) / p : 0;
    FpSeries out(p, out_order);
    for (std::size_t j = 0; j < out_order; ++j)
        out.set(j, f[j * p + r]);
    return out;
}

// Evaluates sum_k poly_k * f^(p^(e_k)) truncated at f's order. The
// Frobenius powers of f are never materialized: f^(p^e) has support only
// on multiples of p^e, so each term costs O(terms * order / p^e).
inline FpSeries series_eval_relation(const FpSeries& f,
                                     const std::vector<std::pair<FpPoly, std::uint64_t>>& terms)
{
    std::uint64_t p = f.prime();
    std::size_t n = f.order();
    FpSeries out(p, n);
    std::vector<std::uint64_t> acc(n, 0);
    for (auto& [poly, e] : terms) {
        if (poly.prime() != p)
            throw std::invalid_argument("series_eval_relation: mismatched primes");
        std::uint64_t q = 1;
        bool over = false;
        for (std::uint64_t i = 0; i < e; ++i) {
            if (q > n / p + 1) {
                over = true;
                break;
            }
            q *= p;
        }
        for (auto& [d, c] : poly.terms()) {
            if (d >= n)
                continue;
            if (over) {
                // p^e beyond the truncation: only f[0] contributes.
                acc[d] = (acc[d] + c * f[0]) % p;
                continue;
            }
            for (std::size_t j = 0; d + j * q < n; ++j)
                acc[d + j * q] = (acc[d + j * q] + c * f[j]) % p;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        out.set(i, acc[i]);
    return out;
}

// Rational function over F_p in lowest form. Powers of z are factored out
// into z_shift (possibly negative), so num and den both have nonzero
// constant term and den is monic with gcd(num, den) = 1.
class FpRatFn {
public:
    FpRatFn() = default;
    explicit FpRatFn(std::uint64_t p)
        : num_(FpPoly::zero(p)), den_(FpPoly::constant(p, 1)), shift_(0)
    {
    }
    FpRatFn(FpPoly num, FpPoly den, std::int64_t z_shift = 0)
        : num_(std::move(num)), den_(std::move(den)), shift_(z_shift)
    {
        reduce();
    }

    static FpRatFn zero(std::uint64_t p) { return FpRatFn(p); }
    static FpRatFn from_poly(FpPoly f)
    {
        std::uint64_t p = f.prime();
        return FpRatFn(std::move(f), FpPoly::constant(p, 1));
    }

    std::uint64_t prime() const { return num_.prime(); }
    const FpPoly& num() const { return num_; }
    const FpPoly& den() const { return den_; }
    std::int64_t z_shift() const { return shift_; }
    bool is_zero() const { return num_.is_zero(); }

    bool is_polynomial() const { return den_ == FpPoly::constant(prime(), 1) && shift_ >= 0; }

    FpPoly as_polynomial() const
    {
        if (!is_polynomial())
            throw std::domain_error("FpRatFn: not a polynomial");
        return num_.shifted(static_cast<std::uint64_t>(shift_));
    }

    // Height of the lowest-form fraction, z powers included.
    std::uint64_t height() const
    {
        if (is_zero())
            return 0;
        std::uint64_t dn = static_cast<std::uint64_t>(num_.degree());
        std::uint64_t dd = static_cast<std::uint64_t>(den_.degree());
        std::uint64_t hn = dn + static_cast<std::uint64_t>(std::max<std::int64_t>(shift_, 0));
        std::uint64_t hd = dd + static_cast<std::uint64_t>(std::max<std::int64_t>(-shift_, 0));
        return std::max(hn, hd);
    }

    friend bool operator==(const FpRatFn& a, const FpRatFn& b)
    {
        if (a.is_zero() && b.is_zero())
            return a.prime() == b.prime();
        return a.num_ == b.num_ && a.den_ == b.den_ && a.shift_ == b.shift_;
    }
    friend bool operator!=(const FpRatFn& a, const FpRatFn& b) { return !(a == b); }

    friend FpRatFn operator+(const FpRatFn& a, const FpRatFn& b)
    {
        if (a.is_zero())
            return b;
        if (b.is_zero())
            return a;
        std::int64_t s = std::min(a.shift_, b.shift_);
        FpPoly na = a.num_.shifted(static_cast<std::uint64_t>(a.shift_ - s));
        FpPoly nb = b.num_.shifted(static_cast<std::uint64_t>(b.shift_ - s));
        return FpRatFn(na * b.den_ + nb * a.den_, a.den_ * b.den_, s);
    }

    friend FpRatFn operator-(const FpRatFn& a, const FpRatFn& b) { return a + (-b); }

    FpRatFn operator-() const
    {
        FpRatFn r = *this;
        r.num_ = -r.num_;
        return r;
    }

    friend FpRatFn operator*(const FpRatFn& a, const FpRatFn& b)
    {
        return FpRatFn(a.num_ * b.num_, a.den_ * b.den_, a.shift_ + b.shift_);
    }

    friend FpRatFn operator/(const FpRatFn& a, const FpRatFn& b)
    {
        if (b.is_zero())
            throw std::domain_error("FpRatFn: division by zero");
        return FpRatFn(a.num_ * b.den_, a.den_ * b.num_, a.shift_ - b.shift_);
    }

    // Raises to the p^e-th power; every part is Frobenius-twisted.
    FpRatFn frobenius(std::uint64_t e) const
    {
        if (is_zero() || e == 0)
            return *this;
        std::int64_t q = 1;
        for (std::uint64_t i = 0; i < e; ++i) {
            if (q > static_cast<std::int64_t>((std::uint64_t{1} << 62) / prime()))
                throw std::overflow_error("FpRatFn::frobenius: exponent overflow");
            q *= static_cast<std::int64_t>(prime());
        }
        FpRatFn r = *this;
        r.num_ = num_.frobenius(e);
        r.den_ = den_.frobenius(e);
        r.shift_ = shift_ * q;
        return r;
    }

    std::string str() const
    {
        std::string out = num_.str();
        if (den_.degree() > 0 || den_.coeff(0) != 1)
            out = "(" + out + ") / (" + den_.str() + ")";
        if (shift_ != 0)
            out = "z^" + std::to_string(shift_) + " * (" + out + ")";
        return out;
    }

private:
    void reduce()
    {
        if (num_.prime() != den_.prime())
            throw std::invalid_argument("FpRatFn: mismatched primes");
        if (den_.is_zero())
            throw std::domain_error("FpRatFn: zero denominator");
        if (num_.is_zero()) {
            den_ = FpPoly::constant(prime(), 1);
            shift_ = 0;
            return;
        }
        std::uint64_t tn = num_.trailing_exp();
        std::uint64_t td = den_.trailing_exp();
        if (tn > 0) {
            FpPoly shifted(prime());
            for (auto& [e, c] : num_.terms())
                shifted.set(e - tn, c);
            num_ = shifted;
            shift_ += static_cast<std::int64_t>(tn);
        }
        if (td > 0) {
            FpPoly shifted(prime());
            for (auto& [e, c] : den_.terms())
                shifted.set(e - td, c);
            den_ = shifted;
            shift_ -= static_cast<std::int64_t>(td);
        }
        FpPoly g = poly_gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = poly_exact_div(num_, g);
            den_ = poly_exact_div(den_, g);
        }
        std::uint64_t lead = den_.leading_coeff();
        if (lead != 1) {
            std::uint64_t inv = mod_inverse(lead, prime());
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }

    FpPoly num_{FpPoly::zero(2)};
    FpPoly den_{FpPoly::constant(2, 1)};
    std::int64_t shift_ = 0;
};

inline FpRatFn ratfn_reduce(FpPoly num, FpPoly den)
{
    return FpRatFn(std::move(num), std::move(den));
}

} // namespace hypmodp
