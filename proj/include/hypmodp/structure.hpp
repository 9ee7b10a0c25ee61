#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hypergeometric.hpp"

namespace hypmodp {

// Exponents at zero of the reduced hypergeometric operator, as residue
// representatives in {0..p-1}. Computed two ways: scanning the indicial
// product I(x) = prod (x + beta_s - 1) over all residues, and symbolically
// as {0} united with {(1 - beta_j) mod p}; the two must agree.
inline std::vector<std::uint64_t> exponent_set(const ParamSystem& sys, std::uint64_t p)
{
    if (sys.d % p == 0)
        throw std::invalid_argument("exponent_set: p divides d");
    std::vector<std::uint64_t> bres;
    for (auto& b : sys.beta)
        bres.push_back(residue_mod_p(b, p));

    std::vector<std::uint64_t> scanned;
    for (std::uint64_t x = 0; x < p; ++x) {
        std::uint64_t acc = 1;
        for (auto b : bres)
            acc = mod_mul(acc, mod_add(x, mod_sub(b, 1, p), p), p);
        if (acc == 0)
            scanned.push_back(x);
    }

    std::set<std::uint64_t> symbolic;
    for (auto b : bres)
        symbolic.insert(mod_sub(1, b, p));
    std::vector<std::uint64_t> sym(symbolic.begin(), symbolic.end());
    if (scanned != sym)
        throw std::logic_error("exponent_set: scan and symbolic roots disagree");
    return scanned;
}

// E set, admissible subset S (members of E where Q(r) is a p-adic unit),
// and t = #S - 1.
struct StructureSets {
    std::vector<std::uint64_t> E;
    std::vector<std::uint64_t> S;
    std::size_t t = 0;
};

inline StructureSets admissible_set(const ParamSystem& sys, std::uint64_t p)
{
    StructureSets out;
    out.E = exponent_set(sys, p);
    CoeffGen gen(sys, p);
    for (auto r : out.E) {
        gen.advance_to(r);
        std::int64_t v = gen.valuation();
        if (v < 0)
            throw std::domain_error("admissible_set: not p-integral at exponent " +
                                    std::to_string(r));
        if (v == 0)
            out.S.push_back(r);
    }
    out.t = out.S.size() - 1;
    return out;
}

inline StructureSets admissible_set(const PrimeContext& ctx)
{
    return admissible_set(ctx.sys, ctx.p);
}

// Indices s (0-based) with (gamma_s)_r in pZ_(p), and the complement.
struct Partition {
    std::vector<std::size_t> P;
    std::vector<std::size_t> C;

    bool in_P(std::size_t s) const { return std::binary_search(P.begin(), P.end(), s); }
};

inline Partition partition(const std::vector<Rational>& gamma, std::uint64_t r, std::uint64_t p)
{
    Partition out;
    for (std::size_t s = 0; s < gamma.size(); ++s) {
        if (pochhammer_vp(gamma[s], r, p) >= 1)
            out.P.push_back(s);
        else
            out.C.push_back(s);
    }
    return out;
}

// One descent step applied to a system: entries become D_p(gamma) or
// D_p(gamma) + 1 according to the partition at r. The last beta entry
// stays 1.
inline ParamSystem shift_once(const ParamSystem& sys, std::uint64_t p, std::uint64_t r)
{
    Partition pa = partition(sys.alpha, r, p);
    Partition pb = partition(sys.beta, r, p);
    std::vector<Rational> a, b;
    for (std::size_t s = 0; s < sys.n(); ++s) {
        Rational da = dwork(sys.alpha[s], p);
        a.push_back(pa.in_P(s) ? da + Rational(1) : da);
    }
    for (std::size_t s = 0; s < sys.n(); ++s) {
        Rational db = dwork(sys.beta[s], p);
        b.push_back(pb.in_P(s) ? db + Rational(1) : db);
    }
    return ParamSystem::create(std::move(a), std::move(b));
}

// The level-a shifted system attached to the i-th element of the S set of
// the level-(a-1) Dwork system.
inline ParamSystem shifted_params(const PrimeContext& ctx, std::uint64_t a, std::size_t i)
{
    if (a < 1)
        throw std::invalid_argument("shifted_params: level must be >= 1");
    ParamSystem base = dwork_system_iter(ctx.sys, ctx.p, a - 1);
    StructureSets sets = admissible_set(base, ctx.p);
    if (i >= sets.S.size())
        throw std::invalid_argument("shifted_params: S index out of range");
    return shift_once(base, ctx.p, sets.S[i]);
}

// sigma maps the S set of the shifted system to the S set of the Dwork
// image (r stays or moves to r+1); tau is its inverse.
struct SigmaTau {
    std::map<std::uint64_t, std::uint64_t> sigma;
    std::map<std::uint64_t, std::uint64_t> tau;
};

// base is the level-(a-1) system, r_pivot one of its S elements. The
// classification of an S element r follows the beta entry it matches:
// target residues 1 - beta_j (mod p) with j read against the partition of
// base's beta at r_pivot.
inline SigmaTau sigma_tau_maps(const ParamSystem& base, std::uint64_t p, std::uint64_t r_pivot)
{
    ParamSystem child = shift_once(base, p, r_pivot);
    ParamSystem target = dwork_system(base, p);
    Partition pb = partition(base.beta, r_pivot, p);
    StructureSets s_child = admissible_set(child, p);
    StructureSets s_target = admissible_set(target, p);

    auto classify = [&](const std::vector<Rational>& betas, std::uint64_t r) {
        // Returns true when r matches a P-entry, false for a C-entry.
        bool any_p = false, any_c = false;
        for (std::size_t j = 0; j < betas.size(); ++j) {
            std::uint64_t want = mod_sub(1, residue_mod_p(betas[j], p), p);
            if (want != r % p)
                continue;
            (pb.in_P(j) ? any_p : any_c) = true;
        }
        if (any_p == any_c)
            throw std::domain_error("sigma_tau: hypothesis violation (ambiguous exponent class)");
        return any_p;
    };

    SigmaTau maps;
    for (auto r : s_child.S) {
        bool p_case = classify(child.beta, r);
        std::uint64_t image = p_case ? r + 1 : r;
        if (!std::binary_search(s_target.S.begin(), s_target.S.end(), image))
            throw std::domain_error("sigma_tau: hypothesis violation (sigma image not in S)");
        maps.sigma[r] = image;
    }
    for (auto r : s_target.S) {
        bool p_case = classify(target.beta, r);
        std::uint64_t pre = p_case ? r - 1 : r;
        if (p_case && r == 0)
            throw std::domain_error("sigma_tau: hypothesis violation (tau underflow at 0)");
        if (!std::binary_search(s_child.S.begin(), s_child.S.end(), pre))
            throw std::domain_error("sigma_tau: hypothesis violation (tau image not in S)");
        maps.tau[r] = pre;
    }
    for (auto& [r, img] : maps.sigma)
        if (maps.tau.at(img) != r)
            throw std::domain_error("sigma_tau: hypothesis violation (maps not inverse)");
    return maps;
}

inline SigmaTau sigma_tau_maps(const PrimeContext& ctx, std::uint64_t a, std::size_t i)
{
    if (a < 1)
        throw std::invalid_argument("sigma_tau_maps: level must be >= 1");
    ParamSystem base = dwork_system_iter(ctx.sys, ctx.p, a - 1);
    StructureSets sets = admissible_set(base, ctx.p);
    if (i >= sets.S.size())
        throw std::invalid_argument("sigma_tau_maps: S index out of range");
    return sigma_tau_maps(base, ctx.p, sets.S[i]);
}

// Verdicts for the unit/non-resonance hypotheses (P1)-(P5) evaluated over
// the Dwork orbit, plus the unit-parameter hypothesis. Every violated
// sub-condition is reported, not just the first.
struct PPropertyReport {
    bool p1 = true, p2 = true, p3 = true, p4 = true, p5 = true;
    bool unit_params = true;
    std::vector<std::string> violations;

    bool all() const { return p1 && p2 && p3 && p4 && p5 && unit_params; }
};

inline PPropertyReport check_p_property(const PrimeContext& ctx, bool extend_p4 = false)
{
    PPropertyReport rep;
    std::uint64_t p = ctx.p;
    const ParamSystem& sys = ctx.sys;
    std::size_t n = sys.n();

    auto is_unit = [&](const Rational& x) { return !x.is_zero() && vp(x, p) == 0; };

    for (std::size_t i = 0; i < n; ++i) {
        if (!is_unit(sys.alpha[i])) {
            rep.unit_params = false;
            rep.violations.push_back("alpha_" + std::to_string(i + 1) + " is not a p-adic unit");
        }
        if (!is_unit(sys.beta[i])) {
            rep.unit_params = false;
            rep.violations.push_back("beta_" + std::to_string(i + 1) + " is not a p-adic unit");
        }
    }

    std::vector<std::vector<Rational>> da(ctx.l + 2), db(ctx.l + 2);
    da[0] = sys.alpha;
    db[0] = sys.beta;
    std::uint64_t k_top = extend_p4 ? ctx.l + 1 : ctx.l;
    for (std::uint64_t k = 1; k <= k_top; ++k) {
        da[k].clear();
        db[k].clear();
        for (auto& g : da[k - 1])
            da[k].push_back(dwork(g, p));
        for (auto& g : db[k - 1])
            db[k].push_back(dwork(g, p));
    }

    for (std::uint64_t k = 1; k <= ctx.l; ++k) {
        std::string at = " (k = " + std::to_string(k) + ")";
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_unit(da[k][i])) {
                rep.p1 = false;
                rep.violations.push_back("P1: D^k(alpha_" + std::to_string(i + 1) +
                                         ") not a unit" + at);
            }
            if (!is_unit(db[k][i])) {
                rep.p1 = false;
                rep.violations.push_back("P1: D^k(beta_" + std::to_string(i + 1) +
                                         ") not a unit" + at);
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (!is_unit(da[k][i] - db[k][j])) {
                    rep.p2 = false;
                    rep.violations.push_back("P2: D^k(alpha_" + std::to_string(i + 1) +
                                             ") - D^k(beta_" + std::to_string(j + 1) +
                                             ") not a unit" + at);
                }
            }
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t s = j + 1; s < n; ++s) {
                if (sys.beta[j] == sys.beta[s])
                    continue;
                if (!is_unit(db[k][j] - db[k][s])) {
                    rep.p3 = false;
                    rep.violations.push_back("P3: D^k(beta_" + std::to_string(j + 1) +
                                             ") - D^k(beta_" + std::to_string(s + 1) +
                                             ") not a unit" + at);
                }
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (!is_unit(Rational(1) - db[k][j] + da[k][i])) {
                    rep.p5 = false;
                    rep.violations.push_back("P5: 1 - D^k(beta_" + std::to_string(j + 1) +
                                             ") + D^k(alpha_" + std::to_string(i + 1) +
                                             ") not a unit" + at);
                }
                if (!is_unit(Rational(1) - db[k][j] + db[k][i])) {
                    rep.p5 = false;
                    rep.violations.push_back("P5: 1 - D^k(beta_" + std::to_string(j + 1) +
                                             ") + D^k(beta_" + std::to_string(i + 1) +
                                             ") not a unit" + at);
                }
            }
    }
    for (std::uint64_t k = 1; k <= k_top; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            if (sys.beta[j] == Rational(1))
                continue;
            Rational v = Rational(static_cast<long>(p)) * db[k][j] - db[k - 1][j];
            if (v == Rational(static_cast<long>(p - 1))) {
                rep.p4 = false;
                rep.violations.push_back("P4: p - 1 in I_beta^(" + std::to_string(k) + ")");
            }
        }
    }
    return rep;
}

// Checks the two coefficient congruences that drive the descent:
// Q(jp) = Q_{D(alpha),D(beta)}(j) mod p for j < j_max, and for r in S the
// factorization Q(jp + r) = Q_shifted(j) Q(r) mod p, where Q_shifted is
// the coefficient of the shift at r. The internal quantities lambda_j,
// theta, tau are computed exactly: theta, tau and lambda_0 are unit-checked,
// and lambda_j is pinned by its exact transport identity
// lambda_0 Q_shifted(j) = Q_{D(alpha),D(beta)}(j) lambda_j. (lambda_j itself
// is not a unit at every j: its valuation cancels against the Dwork-level
// coefficient whenever a Pochhammer factor meets p^2.)
inline CheckReport congruence_check(const PrimeContext& ctx, std::uint64_t j_max, std::uint64_t r)
{
    CheckReport rep;
    std::uint64_t p = ctx.p;
    const ParamSystem& sys = ctx.sys;
    if (r >= p) {
        rep.pass = false;
        rep.detail = "r out of range";
        return rep;
    }
    {
        CoeffGen probe(sys, p);
        probe.advance_to(r);
        if (probe.valuation() != 0) {
            rep.pass = false;
            rep.detail = "precondition v_p(Q(r)) = 0 fails";
            return rep;
        }
    }

    Partition pa = partition(sys.alpha, r, p);
    Partition pb = partition(sys.beta, r, p);

    // theta and tau are plain unit products; lambda_j is checked per j.
    auto poch_skip = [&](const Rational& g) {
        // prod_{t=0}^{r-1} (g + t) with the factor at t = p*D(g) - g removed.
        Rational skip_at = Rational(static_cast<long>(p)) * dwork(g, p) - g;
        Rational prod(1);
        for (std::uint64_t t = 0; t < r; ++t) {
            Rational tv(static_cast<long>(t));
            if (tv == skip_at)
                continue;
            prod *= (g + tv);
        }
        return prod;
    };
    auto poch_plain = [&](const Rational& g) {
        Rational prod(1);
        for (std::uint64_t t = 0; t < r; ++t)
            prod *= (g + Rational(static_cast<long>(t)));
        return prod;
    };
    Rational theta(1), tau_q(1);
    for (auto s : pa.C)
        theta *= poch_plain(sys.alpha[s]);
    for (auto s : pb.C)
        theta /= poch_plain(sys.beta[s]);
    for (auto s : pa.P)
        tau_q *= poch_skip(sys.alpha[s]);
    for (auto s : pb.P)
        tau_q /= poch_skip(sys.beta[s]);
    if (vp(theta, p) != 0) {
        rep.pass = false;
        rep.detail = "theta is not a p-adic unit";
        return rep;
    }
    if (vp(tau_q, p) != 0) {
        rep.pass = false;
        rep.detail = "tau is not a p-adic unit";
        return rep;
    }

    ParamSystem dsys = dwork_system(sys, p);
    ParamSystem shifted = shift_once(sys, p, r);

    Rational lam0(1);
    for (auto s : pa.P)
        lam0 *= dwork(sys.alpha[s], p);
    for (auto s : pb.P)
        lam0 /= dwork(sys.beta[s], p);
    if (vp(lam0, p) != 0) {
        rep.pass = false;
        rep.detail = "lambda_0 is not a p-adic unit";
        return rep;
    }

    // exact transport of lambda_j through the shifted coefficients
    std::uint64_t exact_span = std::min<std::uint64_t>(j_max, 120);
    std::vector<Rational> q_dwork = coeff_exact_prefix(dsys, exact_span);
    std::vector<Rational> q_shift = coeff_exact_prefix(shifted, exact_span);
    for (std::uint64_t j = 0; j < exact_span; ++j) {
        Rational lam(1);
        for (auto s : pa.P)
            lam *= (dwork(sys.alpha[s], p) + Rational(static_cast<long>(j)));
        for (auto s : pb.P)
            lam /= (dwork(sys.beta[s], p) + Rational(static_cast<long>(j)));
        if (lam0 * q_shift[j] != q_dwork[j] * lam) {
            rep.pass = false;
            rep.first_failure = j;
            rep.detail = "lambda_j transport identity fails at j = " + std::to_string(j);
            return rep;
        }
    }

    CoeffGen gen_base(sys, p);
    CoeffGen gen_mixed(sys, p);
    CoeffGen gen_dwork(dsys, p);
    CoeffGen gen_shift(shifted, p);
    std::uint64_t q_r = coeff_modp(sys, p, r);

    for (std::uint64_t j = 0; j < j_max; ++j) {
        gen_base.advance_to(j * p);
        if (gen_base.residue_or_zero() != gen_dwork.residue_or_zero()) {
            rep.pass = false;
            rep.first_failure = j;
            rep.detail = "Q(jp) congruence fails at j = " + std::to_string(j);
            return rep;
        }

        gen_mixed.advance_to(j * p + r);
        std::uint64_t lhs = gen_mixed.residue_or_zero();
        std::uint64_t rhs = mod_mul(gen_shift.residue_or_zero(), q_r, p);
        if (lhs != rhs) {
            rep.pass = false;
            rep.first_failure = j;
            rep.detail = "Q(jp+r) factorization fails at j = " + std::to_string(j);
            return rep;
        }

        gen_dwork.advance();
        gen_shift.advance();
    }
    rep.detail = "checked j < " + std::to_string(j_max);
    return rep;
}

} // namespace hypmodp
