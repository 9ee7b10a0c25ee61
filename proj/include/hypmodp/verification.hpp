#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "relation.hpp"

namespace hypmodp {

struct VerificationReport {
    bool pass = false;
    std::size_t checked_order = 0;
    std::uint64_t cleared_denominator_degree = 0;
    std::optional<std::uint64_t> first_failure_index;
    std::vector<std::uint64_t> measured_heights;
    std::string detail;
};

// Verification order policy: must exceed the cleared denominator degree
// plus the largest Frobenius stride with margin, while staying desk-scale.
inline std::size_t default_verify_order(const Annihilator& ann, std::size_t cap = 200000)
{
    std::uint64_t p = ann.p;
    std::uint64_t stride = 1;
    for (std::uint64_t i = 0; i < ann.max_frob_exp(); ++i) {
        if (stride > cap / p) {
            stride = cap;
            break;
        }
        stride *= p;
    }
    std::uint64_t degd = 0;
    for (auto& t : ann.terms)
        degd += t.ratfn.den().degree() > 0 ? static_cast<std::uint64_t>(t.ratfn.den().degree()) : 0;
    std::uint64_t want = 2 * (degd + stride);
    return static_cast<std::size_t>(std::min<std::uint64_t>(std::max<std::uint64_t>(20000, want), cap));
}

// Clears denominators and checks D f - sum_k (D/den_k) num_k f^(p^(e_k)) = 0
// mod p through order N.
inline VerificationReport verify_relation(const PrimeContext& ctx, const Annihilator& ann,
                                          std::size_t N)
{
    if (ann.p != ctx.p)
        throw std::invalid_argument("verify_relation: annihilator prime mismatch");
    std::uint64_t p = ctx.p;

    VerificationReport rep;
    for (auto& t : ann.terms)
        rep.measured_heights.push_back(t.ratfn.height());

    FpPoly den_lcm = FpPoly::constant(p, 1);
    std::int64_t min_shift = 0;
    for (auto& t : ann.terms) {
        den_lcm = poly_lcm(den_lcm, t.ratfn.den());
        min_shift = std::min(min_shift, t.ratfn.z_shift());
    }
    std::uint64_t lift = static_cast<std::uint64_t>(-min_shift);
    FpPoly lhs = den_lcm.shifted(lift);
    rep.cleared_denominator_degree = static_cast<std::uint64_t>(lhs.degree());
    if (N <= rep.cleared_denominator_degree)
        throw std::invalid_argument("verify_relation: truncation below denominator degree");

    std::vector<std::pair<FpPoly, std::uint64_t>> terms;
    terms.emplace_back(lhs, 0);
    for (auto& t : ann.terms) {
        FpPoly cof = poly_exact_div(den_lcm, t.ratfn.den());
        FpPoly num = (cof * t.ratfn.num())
                         .shifted(static_cast<std::uint64_t>(t.ratfn.z_shift() - min_shift));
        terms.emplace_back(-num, t.frob_exp);
    }

    FpSeries f = series_modp(ctx, N);
    FpSeries combo = series_eval_relation(f, terms);
    std::int64_t bad = combo.first_nonzero();
    rep.checked_order = N;
    if (bad < 0) {
        rep.pass = true;
        rep.detail = "relation holds through order " + std::to_string(N);
    } else {
        rep.pass = false;
        rep.first_failure_index = static_cast<std::uint64_t>(bad);
        rep.detail = "first nonzero coefficient at index " + std::to_string(bad);
    }
    return rep;
}

// Checks a(m p^l + r) = a(m) a(r) mod p for all indices below N, then the
// constructive equivalence: when the property holds, f = A f^(p^l) with A
// the degree-(p^l - 1) truncation of f. A supplied single-term relation
// must match that truncation.
inline VerificationReport lucas_check(const PrimeContext& ctx, std::size_t N,
                                      const Annihilator* single_term = nullptr)
{
    VerificationReport rep;
    rep.checked_order = N;
    std::uint64_t p = ctx.p;
    // q = p^l, saturating once it clears the truncation (every checked
    // index is then a pure remainder and the congruence is vacuous there).
    std::uint64_t q = 1;
    for (std::uint64_t i = 0; i < ctx.l && q < N; ++i)
        q *= p;

    FpSeries f = series_modp(ctx, N);
    if (f[0] != 1) {
        rep.detail = "a(0) != 1";
        return rep;
    }
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t m = i / q, r = i % q;
        if (f[i] != mod_mul(f[m], f[r], p)) {
            rep.first_failure_index = i;
            rep.detail = "Lucas congruence fails at index " + std::to_string(i) + " = " +
                         std::to_string(m) + "*p^l + " + std::to_string(r);
            return rep;
        }
    }

    FpPoly trunc(p);
    for (std::size_t r = 0; r < std::min<std::size_t>(q, N); ++r)
        trunc.set(r, f[r]);
    FpSeries combo = series_eval_relation(f, {{FpPoly::constant(p, 1), 0}, {-trunc, ctx.l}});
    std::int64_t bad = combo.first_nonzero();
    if (bad >= 0) {
        rep.first_failure_index = static_cast<std::uint64_t>(bad);
        rep.detail = "reconstructed one-term relation fails at index " + std::to_string(bad);
        return rep;
    }

    if (single_term != nullptr) {
        if (single_term->terms.size() != 1 || single_term->terms[0].frob_exp != ctx.l ||
            !single_term->terms[0].ratfn.is_polynomial() ||
            single_term->terms[0].ratfn.as_polynomial() != trunc) {
            rep.detail = "supplied relation does not match the Lucas truncation";
            return rep;
        }
    }
    rep.pass = true;
    rep.detail = "p^l-Lucas property holds through order " + std::to_string(N);
    return rep;
}

struct BoundAudit {
    bool degree_ok = false;
    bool height_ok = false;
    std::string measured_degree;
    std::string degree_bound; // p^(2 n phi(d))
    std::string measured_height;
    std::string case_height_bound;   // by #S of the level-(l-1) system
    std::string global_height_bound; // 5^n (n+1)! p^(2(n+1) phi(d))
};

// Compares the measured degree/heights of a constructed relation against
// the headline bounds; everything is compared as big integers since the
// bounds overflow machine words.
inline BoundAudit bound_audit(const Annihilator& ann, const PrimeContext& ctx)
{
    BoundAudit audit;
    std::size_t n = ctx.sys.n();

    mpz_class degree_bound = detail::mpz_pow(ctx.p, 2 * n * ctx.sys.phi_d);
    mpz_class measured_degree = detail::mpz_pow(ctx.p, ann.max_frob_exp());
    audit.degree_ok = measured_degree <= degree_bound;
    audit.measured_degree = measured_degree.get_str();
    audit.degree_bound = degree_bound.get_str();

    ParamSystem tail = dwork_system_iter(ctx.sys, ctx.p, ctx.l - 1);
    StructureSets sets = admissible_set(tail, ctx.p);
    mpz_class case_bound = detail::case_height_bound(sets.S.size(), ctx.p, ctx.l);
    mpz_class global_bound =
        detail::mpz_pow(5, n) * detail::factorial(n + 1) * detail::mpz_pow(ctx.p, 2 * (n + 1) * ctx.sys.phi_d);
    mpz_class measured_height(static_cast<unsigned long>(ann.max_height()));
    audit.height_ok = measured_height < case_bound && measured_height <= global_bound;
    audit.measured_height = measured_height.get_str();
    audit.case_height_bound = case_bound.get_str();
    audit.global_height_bound = global_bound.get_str();
    return audit;
}

} // namespace hypmodp
