#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fp.hpp"
#include "numtheory.hpp"
#include "rational.hpp"

namespace hypmodp {

// The pair (alpha, beta) with beta_n = 1, together with the lcm of the
// parameter denominators and its totient.
struct ParamSystem {
    std::vector<Rational> alpha;
    std::vector<Rational> beta; // beta.back() == 1
    std::uint64_t d = 1;        // lcm of parameter denominators
    std::uint64_t phi_d = 1;

    std::size_t n() const { return alpha.size(); }

    // Accepts n beta entries with last equal to 1, or n-1 entries with the
    // trailing 1 appended automatically.
    static ParamSystem create(std::vector<Rational> alpha, std::vector<Rational> beta)
    {
        if (alpha.empty())
            throw std::invalid_argument("ParamSystem: empty alpha");
        if (beta.size() + 1 == alpha.size())
            beta.push_back(Rational(1));
        if (beta.size() != alpha.size())
            throw std::invalid_argument("ParamSystem: beta must have n or n-1 entries");
        if (beta.back() != Rational(1))
            throw std::invalid_argument("ParamSystem: last beta entry must be 1");
        ParamSystem sys;
        sys.alpha = std::move(alpha);
        sys.beta = std::move(beta);
        mpz_class lcm(1);
        auto absorb = [&](const Rational& g) {
            if (g.is_integer() && g.sign() <= 0)
                throw std::invalid_argument("ParamSystem: parameter in Z_{<=0}: " + g.str());
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), g.den().get_mpz_t());
        };
        for (auto& g : sys.alpha)
            absorb(g);
        for (auto& g : sys.beta)
            absorb(g);
        if (!lcm.fits_ulong_p() || lcm.get_ui() >= max_modulus)
            throw std::invalid_argument("ParamSystem: parameter denominators too large");
        sys.d = lcm.get_ui();
        sys.phi_d = euler_totient(sys.d);
        return sys;
    }

    bool all_in_unit_interval() const
    {
        auto ok = [](const Rational& g) { return g > Rational(0) && g <= Rational(1); };
        for (auto& g : alpha)
            if (!ok(g))
                return false;
        for (auto& g : beta)
            if (!ok(g))
                return false;
        return true;
    }

    // Canonical textual key; used to identify equal systems.
    std::string key() const
    {
        std::string s;
        for (auto& g : alpha)
            s += g.str() + ",";
        s += ";";
        for (auto& g : beta)
            s += g.str() + ",";
        return s;
    }

    friend bool operator==(const ParamSystem& a, const ParamSystem& b)
    {
        return a.alpha == b.alpha && a.beta == b.beta;
    }
};

inline ParamSystem dwork_system(const ParamSystem& sys, std::uint64_t p)
{
    std::vector<Rational> a, b;
    for (auto& g : sys.alpha)
        a.push_back(dwork(g, p));
    for (auto& g : sys.beta)
        b.push_back(dwork(g, p));
    return ParamSystem::create(std::move(a), std::move(b));
}

inline ParamSystem dwork_system_iter(ParamSystem sys, std::uint64_t p, std::uint64_t times)
{
    for (std::uint64_t i = 0; i < times; ++i)
        sys = dwork_system(sys, p);
    return sys;
}

// Per-prime context: p must not divide d; l is the order of p in (Z/dZ)*.
struct PrimeContext {
    ParamSystem sys;
    std::uint64_t p = 0;
    std::uint64_t l = 1;

    PrimeContext(ParamSystem s, std::uint64_t prime) : sys(std::move(s)), p(prime)
    {
        require_modulus(p);
        if (!is_prime(p))
            throw std::invalid_argument("PrimeContext: p is not prime");
        if (sys.d % p == 0)
            throw std::invalid_argument("PrimeContext: p divides d");
        l = sys.d == 1 ? 1 : multiplicative_order(p % sys.d, sys.d);
    }
};

// Exact coefficient Q(i) = prod (alpha_s)_i / prod (beta_s)_i, with
// (beta_n)_i = (1)_i supplying the factorial. Direct Pochhammer products,
// no recurrence, so this stays independent of the incremental engines.
inline Rational coeff_exact(const ParamSystem& sys, std::uint64_t i)
{
    auto pochhammer = [&](const Rational& g) {
        mpz_class prod(1), a = g.num();
        for (std::uint64_t t = 0; t < i; ++t) {
            prod *= a;
            a += g.den();
        }
        mpz_class dp;
        mpz_pow_ui(dp.get_mpz_t(), g.den().get_mpz_t(), static_cast<unsigned long>(i));
        return Rational(prod, dp);
    };
    Rational q(1);
    for (auto& g : sys.alpha)
        q *= pochhammer(g);
    for (auto& g : sys.beta)
        q /= pochhammer(g);
    return q;
}

// First `count` exact coefficients via the contiguity recurrence
// I(j) Q(j) = Q(j-1) T(j-1). recurrence_check validates this recurrence
// against direct products.
inline std::vector<Rational> coeff_exact_prefix(const ParamSystem& sys, std::size_t count)
{
    std::vector<Rational> out;
    out.reserve(count);
    if (count == 0)
        return out;
    out.push_back(Rational(1));
    for (std::size_t j = 1; j < count; ++j) {
        Rational t(1), iv(1);
        for (auto& g : sys.alpha)
            t *= (Rational(static_cast<long>(j - 1)) + g);
        for (auto& g : sys.beta)
            iv *= (Rational(static_cast<long>(j)) + g - Rational(1));
        out.push_back(out.back() * t / iv);
    }
    return out;
}

// Incremental unit-tracking generator for v_p(Q(i)) and Q(i) mod p.
// Each factor gamma + i = (a + i b)/b contributes v_p(a + i b) and the
// unit part of (a + i b) / b; everything stays in 64-bit words.
class CoeffGen {
public:
    CoeffGen(const ParamSystem& sys, std::uint64_t p) : p_(p)
    {
        require_modulus(p);
        if (sys.d % p == 0)
            throw std::invalid_argument("CoeffGen: p divides d");
        for (auto& g : sys.alpha)
            num_.push_back(make_factor(g));
        for (auto& g : sys.beta)
            den_.push_back(make_factor(g));
    }

    std::uint64_t prime() const { return p_; }
    std::uint64_t index() const { return i_; }

    std::int64_t valuation() const { return val_num_ - val_den_; }

    // Q(i) mod p when the valuation is 0; 0 when it is positive.
    std::uint64_t residue_or_zero() const
    {
        std::int64_t v = valuation();
        if (v < 0)
            throw std::domain_error("series not p-integral at index " + std::to_string(i_));
        if (v > 0)
            return 0;
        return mod_mul(unit_num_, mod_inverse(unit_den_, p_), p_);
    }

    void advance()
    {
        for (auto& f : num_)
            step(f, val_num_, unit_num_);
        for (auto& f : den_)
            step(f, val_den_, unit_den_);
        ++i_;
    }

    void advance_to(std::uint64_t target)
    {
        while (i_ < target)
            advance();
    }

private:
    struct Factor {
        std::int64_t a = 0;
        std::int64_t b = 1;
        std::uint64_t inv_b = 1;
    };

    Factor make_factor(const Rational& g) const
    {
        // a + i b must stay well inside 64 bits for every index reached.
        constexpr std::int64_t limit = std::int64_t{1} << 40;
        if (!g.num().fits_slong_p() || !g.den().fits_slong_p() ||
            std::abs(g.num().get_si()) >= limit || g.den().get_si() >= limit)
            throw std::invalid_argument("CoeffGen: parameter too large");
        Factor f;
        f.a = g.num().get_si();
        f.b = g.den().get_si();
        f.inv_b = mod_inverse(mod_of(f.b, p_), p_);
        return f;
    }

    void step(const Factor& f, std::int64_t& val, std::uint64_t& unit)
    {
        std::int64_t t = f.a + static_cast<std::int64_t>(i_) * f.b;
        if (t == 0)
            throw std::domain_error("CoeffGen: Pochhammer hits zero");
        std::int64_t sp = static_cast<std::int64_t>(p_);
        while (t % sp == 0) {
            t /= sp;
            ++val;
        }
        unit = mod_mul(unit, mod_mul(mod_of(t, p_), f.inv_b, p_), p_);
    }

    std::uint64_t p_;
    std::uint64_t i_ = 0;
    std::vector<Factor> num_, den_;
    std::int64_t val_num_ = 0, val_den_ = 0;
    std::uint64_t unit_num_ = 1, unit_den_ = 1;
};

inline std::int64_t coeff_valuation(const ParamSystem& sys, std::uint64_t p, std::uint64_t i)
{
    CoeffGen gen(sys, p);
    gen.advance_to(i);
    return gen.valuation();
}

inline std::int64_t coeff_valuation(const PrimeContext& ctx, std::uint64_t i)
{
    return coeff_valuation(ctx.sys, ctx.p, i);
}

inline std::uint64_t coeff_modp(const ParamSystem& sys, std::uint64_t p, std::uint64_t i)
{
    CoeffGen gen(sys, p);
    gen.advance_to(i);
    return gen.residue_or_zero();
}

inline std::uint64_t coeff_modp(const PrimeContext& ctx, std::uint64_t i)
{
    return coeff_modp(ctx.sys, ctx.p, i);
}

// Reduction of the hypergeometric series modulo p, truncated at order N.
inline FpSeries series_modp(const ParamSystem& sys, std::uint64_t p, std::size_t N)
{
    if (N < 1)
        throw std::invalid_argument("series_modp: N must be >= 1");
    FpSeries out(p, N);
    CoeffGen gen(sys, p);
    for (std::size_t i = 0; i < N; ++i) {
        out.set(i, gen.residue_or_zero());
        gen.advance();
    }
    return out;
}

inline FpSeries series_modp(const PrimeContext& ctx, std::size_t N)
{
    return series_modp(ctx.sys, ctx.p, N);
}

// Independent valuation oracle: evaluates the Delta-sum formula for
// v_p(Q(i)) built from floor/fractional parts and Dwork iterates. The sum
// is truncated once the terms provably vanish; a full extra orbit period
// of zero terms is required before the truncation is accepted.
inline std::int64_t vp_drr(const ParamSystem& sys, std::uint64_t p, std::uint64_t i)
{
    std::uint64_t l_ord = sys.d == 1 ? 1 : multiplicative_order(p % sys.d, sys.d);

    // Dwork iterates per parameter, extended lazily.
    std::vector<std::vector<Rational>> iter_a(sys.n()), iter_b(sys.n());
    for (std::size_t s = 0; s < sys.n(); ++s) {
        iter_a[s].push_back(sys.alpha[s]);
        iter_b[s].push_back(sys.beta[s]);
    }
    auto iterate = [&](std::vector<Rational>& chain, std::size_t level) -> const Rational& {
        while (chain.size() <= level)
            chain.push_back(dwork(chain.back(), p));
        return chain[level];
    };

    mpz_class pl(1);
    mpz_class prime(static_cast<unsigned long>(p));
    auto delta = [&](std::uint64_t level) -> std::int64_t {
        // pl currently holds p^level.
        mpz_class im(static_cast<unsigned long>(0));
        mpz_class iv(static_cast<unsigned long>(i));
        mpz_mod(im.get_mpz_t(), iv.get_mpz_t(), pl.get_mpz_t());
        Rational x(im, pl);
        std::int64_t total = 0;
        auto term = [&](const Rational& gamma, const Rational& gl) {
            Rational w = x - gl - Rational((Rational(1) - gamma).floor(), pl);
            mpz_class fl = w.floor();
            if (!fl.fits_slong_p())
                throw std::overflow_error("vp_drr: term overflow");
            return fl.get_si() + 1;
        };
        for (std::size_t s = 0; s < sys.n(); ++s)
            total += term(sys.alpha[s], iterate(iter_a[s], level));
        for (std::size_t s = 0; s < sys.n(); ++s)
            total -= term(sys.beta[s], iterate(iter_b[s], level));
        return total;
    };

    std::uint64_t lead = 0;
    {
        mpz_class bound(static_cast<unsigned long>(i + 1));
        mpz_class q(1);
        while (q < bound) {
            q *= prime;
            ++lead;
        }
    }
    std::uint64_t l_max = lead + l_ord + 2;
    std::int64_t total = 0;
    for (std::uint64_t lv = 1; lv <= l_max; ++lv) {
        pl *= prime;
        total += delta(lv);
    }
    for (std::uint64_t lv = l_max + 1; lv <= l_max + l_ord; ++lv) {
        pl *= prime;
        if (delta(lv) != 0)
            throw std::runtime_error("vp_drr: oracle truncation failure");
    }
    return total;
}

inline std::int64_t vp_drr(const PrimeContext& ctx, std::uint64_t i)
{
    return vp_drr(ctx.sys, ctx.p, i);
}

// Coefficientwise action of the reduced hypergeometric operator:
// out[k] = I(k) g[k] - T(k-1) g[k-1] mod p, with I(x) = prod (x+beta_s-1)
// and T(x) = prod (x+alpha_s).
inline FpSeries apply_hyp_operator(const ParamSystem& sys, std::uint64_t p, const FpSeries& g)
{
    if (g.prime() != p)
        throw std::invalid_argument("apply_hyp_operator: mismatched primes");
    std::vector<std::uint64_t> ares, bres;
    for (auto& a : sys.alpha)
        ares.push_back(residue_mod_p(a, p));
    for (auto& b : sys.beta)
        bres.push_back(residue_mod_p(b, p));
    auto indicial = [&](std::uint64_t k) {
        std::uint64_t acc = 1;
        for (auto b : bres)
            acc = mod_mul(acc, mod_add(k % p, mod_sub(b, 1, p), p), p);
        return acc;
    };
    auto shifted = [&](std::uint64_t k) {
        std::uint64_t acc = 1;
        for (auto a : ares)
            acc = mod_mul(acc, mod_add(k % p, a, p), p);
        return acc;
    };
    FpSeries out(p, g.order());
    for (std::size_t k = 0; k < g.order(); ++k) {
        std::uint64_t v = mod_mul(indicial(k), g[k], p);
        if (k > 0)
            v = mod_sub(v, mod_mul(shifted(k - 1), g[k - 1], p), p);
        out.set(k, v);
    }
    return out;
}

inline FpSeries apply_hyp_operator(const PrimeContext& ctx, const FpSeries& g)
{
    return apply_hyp_operator(ctx.sys, ctx.p, g);
}

struct CheckReport {
    bool pass = true;
    std::optional<std::uint64_t> first_failure;
    std::string detail;
};

// Exact rational identity I(j) Q(j) = Q(j-1) T(j-1), j = 1..j_max, with
// both sides built from direct Pochhammer products.
inline CheckReport recurrence_check(const ParamSystem& sys, std::uint64_t j_max)
{
    CheckReport rep;
    Rational prev = coeff_exact(sys, 0);
    for (std::uint64_t j = 1; j <= j_max; ++j) {
        Rational cur = coeff_exact(sys, j);
        Rational t(1), iv(1);
        for (auto& g : sys.alpha)
            t *= (Rational(static_cast<long>(j - 1)) + g);
        for (auto& g : sys.beta)
            iv *= (Rational(static_cast<long>(j)) + g - Rational(1));
        if (iv * cur != prev * t) {
            rep.pass = false;
            rep.first_failure = j;
            rep.detail = "recurrence fails at j = " + std::to_string(j);
            return rep;
        }
        prev = cur;
    }
    return rep;
}

// Bounded membership scan for f in Z_(p)[[z]]: verifies v_p(Q(i)) >= 0 for
// all i < N. A scan, not a proof.
inline CheckReport integrality_scan(const PrimeContext& ctx, std::size_t N)
{
    CheckReport rep;
    CoeffGen gen(ctx.sys, ctx.p);
    for (std::size_t i = 0; i < N; ++i) {
        if (gen.valuation() < 0) {
            rep.pass = false;
            rep.first_failure = i;
            rep.detail = "negative valuation at index " + std::to_string(i);
            return rep;
        }
        gen.advance();
    }
    rep.detail = "verified up to " + std::to_string(N);
    return rep;
}

} // namespace hypmodp
