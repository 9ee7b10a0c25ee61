#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "fp.hpp"
#include "structure.hpp"

namespace hypmodp {

struct BuildOptions {
    // Truncation order used to verify every intermediate decomposition
    // identity at build time. 0 selects the default 4*p^l, clamped to
    // [64, 200000].
    std::size_t check_order = 0;
    // Enforce the height/degree bounds during elimination. Disabled by
    // forced constructions whose hypotheses are known to fail.
    bool strict_bounds = true;
};

inline std::size_t default_check_order(std::uint64_t p, std::uint64_t l)
{
    std::uint64_t q = 1;
    for (std::uint64_t i = 0; i < l; ++i) {
        if (q > 200000 / p)
            return 200000;
        q *= p;
    }
    std::uint64_t co = 4 * q;
    return static_cast<std::size_t>(std::min<std::uint64_t>(std::max<std::uint64_t>(co, 64), 200000));
}

// One Cartier splitting step: f = sum_i Q_i(z) * (child_i series)^p mod p,
// with Q_i supported on the E-gap starting at r_i and the children the
// shifted systems at each admissible exponent.
struct CartierDecomposition {
    std::vector<std::uint64_t> s_set;
    std::vector<FpPoly> polys;
    std::vector<ParamSystem> children;
};

inline CartierDecomposition cartier_decompose(const ParamSystem& sys, std::uint64_t p,
                                              std::size_t check_order)
{
    ParamSystem dsys = dwork_system(sys, p);
    for (std::size_t s = 0; s < sys.n(); ++s) {
        if (vp(dsys.alpha[s], p) != 0 || vp(dsys.beta[s], p) != 0)
            throw std::domain_error(
                "cartier_decompose: Dwork image of a parameter is not a p-adic unit");
    }

    CartierDecomposition out;
    StructureSets sets = admissible_set(sys, p);
    out.s_set = sets.S;

    CoeffGen gen(sys, p);
    for (std::size_t i = 0; i < sets.S.size(); ++i) {
        std::uint64_t r = sets.S[i];
        auto next_e = std::upper_bound(sets.E.begin(), sets.E.end(), r);
        std::uint64_t stop = next_e == sets.E.end() ? p : *next_e;
        FpPoly q(p);
        gen.advance_to(r);
        for (std::uint64_t s = r; s < stop; ++s) {
            q.set(s, gen.residue_or_zero());
            gen.advance();
        }
        out.polys.push_back(std::move(q));
        out.children.push_back(shift_once(sys, p, r));
    }

    if (check_order > 0) {
        FpSeries lhs = series_modp(sys, p, check_order);
        FpSeries rhs(p, check_order);
        for (std::size_t i = 0; i < out.children.size(); ++i) {
            std::size_t child_order = check_order / p + 2;
            FpSeries child = series_modp(out.children[i], p, child_order);
            FpSeries pad(p, check_order);
            for (std::size_t j = 0; j < child.order(); ++j)
                pad.set(j, child[j]);
            rhs = rhs + series_eval_relation(pad, {{out.polys[i], 1}});
        }
        if (!(lhs - rhs).is_zero())
            throw std::logic_error("cartier_decompose: splitting identity fails truncation check");
    }
    return out;
}

inline CartierDecomposition cartier_decompose(const PrimeContext& ctx, const BuildOptions& opt = {})
{
    std::size_t co = opt.check_order ? opt.check_order : default_check_order(ctx.p, ctx.l);
    return cartier_decompose(ctx.sys, ctx.p, co);
}

// Level-l splitting of a start system: f = sum_j polys[j] * members[j]^(p^l).
struct LevelDecomposition {
    std::uint64_t level = 1;
    std::vector<FpPoly> polys;
    std::vector<ParamSystem> members;
};

// Iterates the Cartier splitting l times, composing the polynomial
// coefficients through Frobenius twists and coalescing members that carry
// identical parameter tuples. After level a every degree is below p^a.
inline LevelDecomposition descend(const ParamSystem& start, std::uint64_t p, std::uint64_t l,
                                  std::size_t check_order)
{
    LevelDecomposition cur;
    cur.level = 0;
    cur.polys.push_back(FpPoly::constant(p, 1));
    cur.members.push_back(start);

    mpz_class pa(1); // p^a, for the degree ledger
    for (std::uint64_t a = 1; a <= l; ++a) {
        pa *= static_cast<unsigned long>(p);
        LevelDecomposition next;
        next.level = a;
        std::map<std::string, std::size_t> slot;
        std::size_t expected_children = 0;
        for (std::size_t j = 0; j < cur.members.size(); ++j) {
            CartierDecomposition dec = cartier_decompose(cur.members[j], p, check_order);
            if (j == 0)
                expected_children = dec.children.size();
            else if (dec.children.size() != expected_children)
                throw std::domain_error("descend: member family not closed (size mismatch)");
            for (std::size_t m = 0; m < dec.children.size(); ++m) {
                FpPoly contrib = cur.polys[j] * dec.polys[m].frobenius(a - 1);
                std::string key = dec.children[m].key();
                auto it = slot.find(key);
                if (it == slot.end()) {
                    slot.emplace(key, next.polys.size());
                    next.polys.push_back(std::move(contrib));
                    next.members.push_back(dec.children[m]);
                } else {
                    next.polys[it->second] = next.polys[it->second] + contrib;
                }
            }
        }
        if (next.members.size() != expected_children)
            throw std::domain_error("descend: member family not closed (transport mismatch)");
        for (auto& q : next.polys)
            if (!q.is_zero() && mpz_class(static_cast<long>(q.degree())) >= pa)
                throw std::logic_error("descend: degree ledger violated");
        cur = std::move(next);
    }

    if (check_order > 0 && l > 0) {
        FpSeries lhs = series_modp(start, p, check_order);
        FpSeries rhs(p, check_order);
        std::uint64_t q = 1;
        bool over = false;
        for (std::uint64_t i = 0; i < l; ++i) {
            if (q > check_order / p + 1) {
                over = true;
                break;
            }
            q *= p;
        }
        std::size_t member_order = over ? 1 : check_order / q + 2;
        for (std::size_t j = 0; j < cur.members.size(); ++j) {
            FpSeries mem = series_modp(cur.members[j], p, member_order);
            FpSeries pad(p, check_order);
            for (std::size_t i = 0; i < mem.order(); ++i)
                if (i < check_order)
                    pad.set(i, mem[i]);
            rhs = rhs + series_eval_relation(pad, {{cur.polys[j], l}});
        }
        if (!(lhs - rhs).is_zero())
            throw std::logic_error("descend: level identity fails truncation check");
    }
    return cur;
}

// The linear system over the S-indexed family: f_i = sum_j Q_{i,j} f_j^(p^l).
struct RelationSystem {
    std::uint64_t p = 0;
    std::uint64_t level = 1;
    std::vector<ParamSystem> members;
    std::vector<std::vector<FpPoly>> matrix;
};

inline RelationSystem build_system(const PrimeContext& ctx, const BuildOptions& opt = {})
{
    std::size_t co = opt.check_order ? opt.check_order : default_check_order(ctx.p, ctx.l);
    LevelDecomposition base = descend(ctx.sys, ctx.p, ctx.l, co);

    RelationSystem out;
    out.p = ctx.p;
    out.level = ctx.l;
    out.members = base.members;
    if (!(base.members[0] == ctx.sys))
        throw std::domain_error("build_system: member family not closed (base system moved)");

    std::map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < out.members.size(); ++j)
        index.emplace(out.members[j].key(), j);

    out.matrix.push_back(base.polys);
    for (std::size_t i = 1; i < out.members.size(); ++i) {
        LevelDecomposition row = descend(out.members[i], ctx.p, ctx.l, co);
        std::vector<FpPoly> cols(out.members.size(), FpPoly::zero(ctx.p));
        for (std::size_t m = 0; m < row.members.size(); ++m) {
            auto it = index.find(row.members[m].key());
            if (it == index.end())
                throw std::domain_error("build_system: member family not closed");
            cols[it->second] = row.polys[m];
        }
        out.matrix.push_back(std::move(cols));
    }
    return out;
}

struct AnnihilatorTerm {
    std::uint64_t frob_exp; // literal exponent of p
    FpRatFn ratfn;
};

struct Provenance {
    std::vector<std::string> events;
    std::vector<std::uint64_t> stage_heights;
    bool bounds_ok = true;
};

// The relation f = sum_k R_k(z) f^(p^(e_k)) mod p, i.e. the annihilating
// polynomial Y - sum_k R_k Y^(p^(e_k)).
struct Annihilator {
    std::uint64_t p = 0;
    std::uint64_t l = 1;
    std::vector<AnnihilatorTerm> terms;
    Provenance provenance;

    std::uint64_t max_frob_exp() const
    {
        std::uint64_t m = 0;
        for (auto& t : terms)
            m = std::max(m, t.frob_exp);
        return m;
    }

    std::uint64_t max_height() const
    {
        std::uint64_t h = 0;
        for (auto& t : terms)
            h = std::max(h, t.ratfn.height());
        return h;
    }
};

namespace detail {

inline mpz_class mpz_pow(std::uint64_t base, std::uint64_t exp)
{
    mpz_class b(static_cast<unsigned long>(base)), r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(exp));
    return r;
}

inline mpz_class factorial(std::uint64_t n)
{
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

// Height bound for the matching member-family size: #S = 1 gives
// p^l, #S = 2 gives 2 p^(2l), #S = t+1 > 2 gives 5^t (t+1)! p^(2(t+1)l).
inline mpz_class case_height_bound(std::size_t s_size, std::uint64_t p, std::uint64_t l)
{
    if (s_size <= 1)
        return mpz_pow(p, l);
    if (s_size == 2)
        return 2 * mpz_pow(p, 2 * l);
    std::uint64_t t = s_size - 1;
    return mpz_pow(5, t) * factorial(t + 1) * mpz_pow(p, 2 * (t + 1) * l);
}

} // namespace detail

// Frobenius-twisted elimination of the member family. Rows keep the shape
// f_i = sum_{k=1}^{s} P_{i,k} f_0^(p^(kl)) + sum_{k=1}^{m} A_{i,k} f_k^(p^(sl));
// each stage removes the highest member whose row-0 coefficient is nonzero
// and doubles s. Zero branches close the relation immediately.
inline Annihilator eliminate(const RelationSystem& system, const BuildOptions& opt = {})
{
    std::uint64_t p = system.p;
    std::uint64_t l = system.level;
    std::size_t t1 = system.members.size();

    struct Row {
        std::vector<FpRatFn> head; // coefficients of f_0^(p^(kl)), k = 1..s
        std::vector<FpRatFn> tail; // coefficients of f_k^(p^(sl)), k = 1..m
    };
    std::vector<Row> rows(t1);
    for (std::size_t i = 0; i < t1; ++i) {
        rows[i].head.push_back(FpRatFn::from_poly(system.matrix[i][0]));
        for (std::size_t k = 1; k < t1; ++k)
            rows[i].tail.push_back(FpRatFn::from_poly(system.matrix[i][k]));
    }

    Annihilator ann;
    ann.p = p;
    ann.l = l;
    std::uint64_t s = 1;

    auto record_heights = [&]() {
        std::uint64_t h = 0;
        for (auto& row : rows) {
            for (auto& r : row.head)
                h = std::max(h, r.height());
            for (auto& r : row.tail)
                h = std::max(h, r.height());
        }
        ann.provenance.stage_heights.push_back(h);
    };
    record_heights();

    while (true) {
        std::size_t m = rows[0].tail.size();
        std::size_t pivot = m; // m means: no nonzero row-0 tail coefficient
        for (std::size_t k = m; k-- > 0;) {
            if (!rows[0].tail[k].is_zero()) {
                pivot = k;
                break;
            }
        }
        if (pivot == m) {
            if (m > 0)
                ann.provenance.events.push_back("zero branch: closing with " + std::to_string(m) +
                                                " member(s) left at stage s = " +
                                                std::to_string(s));
            for (std::size_t k = 0; k < rows[0].head.size(); ++k)
                if (!rows[0].head[k].is_zero())
                    ann.terms.push_back({(k + 1) * l, rows[0].head[k]});
            if (ann.terms.empty())
                throw std::logic_error("eliminate: relation degenerated to 0 = 0");
            break;
        }

        if (pivot != m - 1) {
            for (auto& row : rows)
                std::swap(row.tail[pivot], row.tail[m - 1]);
            ann.provenance.events.push_back("pivot: swapped member column " +
                                            std::to_string(pivot + 1) + " to position " +
                                            std::to_string(m) + " at stage s = " +
                                            std::to_string(s));
        } else {
            ann.provenance.events.push_back("pivot: member column " + std::to_string(m) +
                                            " at stage s = " + std::to_string(s));
        }

        const FpRatFn a0 = rows[0].tail[m - 1];
        std::vector<FpRatFn> C;       // C_i = A_{i,m} / A_{0,m}, i = 1..m
        std::vector<std::vector<FpRatFn>> Q; // Q_{i,k} = P_{i,k} - C_i P_{0,k}
        std::vector<std::vector<FpRatFn>> B; // B_{i,k} = A_{i,k} - C_i A_{0,k}
        for (std::size_t i = 1; i <= m; ++i) {
            FpRatFn ci = rows[i].tail[m - 1] / a0;
            std::vector<FpRatFn> qi, bi;
            for (std::size_t k = 0; k < s; ++k)
                qi.push_back(rows[i].head[k] - ci * rows[0].head[k]);
            for (std::size_t k = 0; k + 1 < m; ++k)
                bi.push_back(rows[i].tail[k] - ci * rows[0].tail[k]);
            C.push_back(std::move(ci));
            Q.push_back(std::move(qi));
            B.push_back(std::move(bi));
        }

        std::vector<Row> next(m);
        for (std::size_t i = 0; i < m; ++i) {
            Row nr;
            for (std::size_t k = 0; k + 1 < s; ++k)
                nr.head.push_back(rows[i].head[k]);
            FpRatFn ts = rows[i].head[s - 1];
            for (std::size_t k = 1; k <= m; ++k)
                ts = ts + rows[i].tail[k - 1] * C[k - 1].frobenius(s * l);
            nr.head.push_back(std::move(ts));
            for (std::size_t k = 0; k < s; ++k) {
                FpRatFn acc = FpRatFn::zero(p);
                for (std::size_t j = 1; j <= m; ++j)
                    acc = acc + rows[i].tail[j - 1] * Q[j - 1][k].frobenius(s * l);
                nr.head.push_back(std::move(acc));
            }
            for (std::size_t k = 0; k + 1 < m; ++k) {
                FpRatFn acc = FpRatFn::zero(p);
                for (std::size_t j = 1; j <= m; ++j)
                    acc = acc + rows[i].tail[j - 1] * B[j - 1][k].frobenius(s * l);
                nr.tail.push_back(std::move(acc));
            }
            next[i] = std::move(nr);
        }
        rows = std::move(next);
        s *= 2;
        record_heights();
    }

    // Case height bound for the family size, compared as big integers.
    mpz_class bound = detail::case_height_bound(t1, p, l);
    for (auto& term : ann.terms) {
        mpz_class h(static_cast<unsigned long>(term.ratfn.height()));
        if (h >= bound) {
            ann.provenance.bounds_ok = false;
            ann.provenance.events.push_back("height bound violated: term p^" +
                                            std::to_string(term.frob_exp));
        }
    }
    if (t1 == 1) {
        if (ann.terms.size() != 1 || !ann.terms[0].ratfn.is_polynomial())
            ann.provenance.bounds_ok = false;
    }
    if (opt.strict_bounds && !ann.provenance.bounds_ok)
        throw std::logic_error("eliminate: height bounds violated");
    return ann;
}

// Closed-form two-term construction for p = 1 mod d, #S = 2: builds the
// four window polynomials from the base and shifted coefficient sums and
// assembles Q_1 = P_0 + T_1^p / P_1^(p-1),
//           Q_2 = P_1 T_0^p - T_1^p P_0^p / P_1^(p-1).
inline Annihilator construct_two_term(const PrimeContext& ctx)
{
    std::uint64_t p = ctx.p;
    if (ctx.sys.d > 1 && p % ctx.sys.d != 1)
        throw std::domain_error("construct_two_term: requires p = 1 mod d");
    if (!ctx.sys.all_in_unit_interval())
        throw std::domain_error("construct_two_term: parameters must lie in (0, 1]");
    for (std::size_t s = 0; s < ctx.sys.n(); ++s)
        if (vp(ctx.sys.alpha[s], p) != 0 || vp(ctx.sys.beta[s], p) != 0)
            throw std::domain_error("construct_two_term: parameters must be p-adic units");
    PPropertyReport prop = check_p_property(ctx);
    if (!prop.all()) {
        std::string what = "construct_two_term: P property fails";
        if (!prop.violations.empty())
            what += " (" + prop.violations.front() + ")";
        throw std::domain_error(what);
    }
    StructureSets sets = admissible_set(ctx.sys, p);
    if (sets.S.size() != 2)
        throw std::domain_error("construct_two_term: requires #S = 2");

    std::uint64_t r1 = sets.S[1];
    auto window = [&](const ParamSystem& sys, const std::vector<std::uint64_t>& E,
                      std::uint64_t from) {
        auto next_e = std::upper_bound(E.begin(), E.end(), from);
        std::uint64_t stop = next_e == E.end() ? p : *next_e;
        FpPoly out(p);
        CoeffGen gen(sys, p);
        gen.advance_to(from);
        for (std::uint64_t s = from; s < stop; ++s) {
            out.set(s, gen.residue_or_zero());
            gen.advance();
        }
        return out;
    };

    FpPoly p0 = window(ctx.sys, sets.E, 0);
    FpPoly p1 = window(ctx.sys, sets.E, r1);

    SigmaTau maps = sigma_tau_maps(ctx.sys, p, r1);
    std::uint64_t tau_r1 = maps.tau.at(r1);
    ParamSystem child = shift_once(ctx.sys, p, r1);
    StructureSets child_sets = admissible_set(child, p);
    FpPoly t0 = window(child, child_sets.E, 0);
    FpPoly t1 = window(child, child_sets.E, tau_r1);

    // P_1^(p-1) = P_1^p / P_1 with P_1^p a plain Frobenius twist.
    FpPoly p1_pm1 = poly_exact_div(p1.frobenius(1), p1);
    FpRatFn q1 = FpRatFn::from_poly(p0) + FpRatFn(t1.frobenius(1), p1_pm1);
    FpRatFn q2 = FpRatFn::from_poly(p1 * t0.frobenius(1)) -
                 FpRatFn(t1.frobenius(1) * p0.frobenius(1), p1_pm1);

    Annihilator ann;
    ann.p = p;
    ann.l = ctx.l;
    ann.terms.push_back({1, std::move(q1)});
    ann.terms.push_back({2, std::move(q2)});
    ann.provenance.events.push_back("closed-form two-term construction");
    return ann;
}

} // namespace hypmodp
