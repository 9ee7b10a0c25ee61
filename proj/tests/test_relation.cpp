#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <hypmodp/relation.hpp>
#include <hypmodp/verification.hpp>

#include "fixtures.hpp"

using namespace hypmodp;

namespace {

// Window sum of series coefficients: sum_{s=from}^{to-1} Q(s) z^s mod p.
FpPoly coeff_window(const ParamSystem& sys, std::uint64_t p, std::uint64_t from, std::uint64_t to)
{
    FpPoly out(p);
    CoeffGen gen(sys, p);
    gen.advance_to(from);
    for (std::uint64_t s = from; s < to; ++s) {
        out.set(s, gen.residue_or_zero());
        gen.advance();
    }
    return out;
}

} // namespace

TEST_CASE("cartier splitting of the Lucas fixture")
{
    CartierDecomposition dec = cartier_decompose(fixtures::lucas_2f1(), 3, 60);
    REQUIRE(dec.polys.size() == 1);
    CHECK(dec.polys[0] == FpPoly(3, {{0, 1}, {1, 1}}));
    CHECK(dec.children[0].key() == fixtures::lucas_2f1().key());

    dec = cartier_decompose(fixtures::lucas_2f1(), 5, 60);
    REQUIRE(dec.polys.size() == 1);
    CHECK(dec.polys[0] == FpPoly(5, {{0, 1}, {1, 4}, {2, 1}}));
    CHECK(dec.children[0].key() == fixtures::lucas_2f1().key());
}

TEST_CASE("cartier splitting with two admissible exponents")
{
    CartierDecomposition dec = cartier_decompose(fixtures::twoterm_2f1(), 13, 120);
    REQUIRE(dec.polys.size() == 2);
    CHECK(dec.s_set == std::vector<std::uint64_t>{0, 6});
    CHECK(dec.polys[0].degree() <= 5);
    CHECK(dec.polys[0].coeff(0) == 1);
    CHECK(dec.polys[1].trailing_exp() == 6);
    CHECK(dec.polys[1].degree() <= 12);
    // children: plain Dwork image (fixed here) and the +1-shifted system
    CHECK(dec.children[0].key() == fixtures::twoterm_2f1().key());
    CHECK(dec.children[1].alpha == std::vector<Rational>{Rational(4, 3), Rational(1, 2)});
}

TEST_CASE("descent composes through the levels")
{
    // l = 1 equals a single splitting step
    LevelDecomposition d1 = descend(fixtures::lucas_2f1(), 7, 1, 120);
    REQUIRE(d1.polys.size() == 1);
    CHECK(d1.polys[0].degree() < 7);
    CHECK(d1.members[0].key() == fixtures::lucas_2f1().key());
    CartierDecomposition c1 = cartier_decompose(fixtures::lucas_2f1(), 7, 120);
    CHECK(d1.polys[0] == c1.polys[0]);

    // l = 2 for the 3F2 at p = 17: two members, degrees below 17^2
    LevelDecomposition d2 = descend(fixtures::ninth_3f2(), 17, 2, 600);
    REQUIRE(d2.members.size() == 2);
    CHECK(d2.members[0].key() == fixtures::ninth_3f2().key());
    CHECK(d2.members[1].alpha ==
          std::vector<Rational>{Rational(10, 9), Rational(4, 9), Rational(5, 9)});
    CHECK(d2.members[1].beta ==
          std::vector<Rational>{Rational(4, 3), Rational(1), Rational(1)});
    for (auto& q : d2.polys)
        CHECK(q.degree() < 289);
}

TEST_CASE("relation systems over the member family")
{
    // #S = 1: single member, single window polynomial
    PrimeContext t5(fixtures::lucas_2f1(), 5);
    RelationSystem sys5 = build_system(t5);
    REQUIRE(sys5.members.size() == 1);
    CHECK(sys5.matrix[0][0] == FpPoly(5, {{0, 1}, {1, 4}, {2, 1}}));

    // #S = 2 at p = 19 (l = 1)
    PrimeContext g19(fixtures::ninth_3f2(), 19);
    RelationSystem sys19 = build_system(g19);
    REQUIRE(sys19.members.size() == 2);
    for (auto& row : sys19.matrix)
        for (auto& q : row)
            CHECK(q.degree() < 19);

    // the four truncated congruences f_i = sum_j Q_{i,j} f_j^(p^l)
    std::size_t order = 700;
    std::vector<FpSeries> fs;
    for (auto& m : sys19.members)
        fs.push_back(series_modp(m, 19, order));
    for (std::size_t i = 0; i < 2; ++i) {
        FpSeries rhs(19, order);
        for (std::size_t j = 0; j < 2; ++j)
            rhs = rhs + series_eval_relation(fs[j], {{sys19.matrix[i][j], 1}});
        CHECK((fs[i] - rhs).is_zero());
    }
}

TEST_CASE("elimination closes the one-member system")
{
    PrimeContext t5(fixtures::lucas_2f1(), 5);
    Annihilator ann = eliminate(build_system(t5));
    REQUIRE(ann.terms.size() == 1);
    CHECK(ann.terms[0].frob_exp == 1);
    CHECK(ann.terms[0].ratfn.is_polynomial());
    CHECK(ann.terms[0].ratfn.as_polynomial() == FpPoly(5, {{0, 1}, {1, 4}, {2, 1}}));
    CHECK(ann.provenance.bounds_ok);
}

TEST_CASE("elimination matches the closed two-term form")
{
    PrimeContext g19(fixtures::ninth_3f2(), 19);
    Annihilator generic = eliminate(build_system(g19));
    Annihilator closed = construct_two_term(g19);
    REQUIRE(generic.terms.size() == 2);
    REQUIRE(closed.terms.size() == 2);
    CHECK(generic.terms[0].frob_exp == 1);
    CHECK(generic.terms[1].frob_exp == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(generic.terms[k].frob_exp == closed.terms[k].frob_exp);
        CHECK(generic.terms[k].ratfn == closed.terms[k].ratfn);
    }
    CHECK(generic.max_height() < 2 * 19 * 19);

    VerificationReport rep = verify_relation(g19, generic, 6000);
    CHECK(rep.pass);
}

TEST_CASE("closed two-term window polynomials")
{
    // p = 19, k_p = 2: P_0 over 0..3k_p, P_1 over 1+3k_p..p-1,
    // T_0 over 0..3k_p-1, T_1 over 3k_p..p-1.
    PrimeContext g19(fixtures::ninth_3f2(), 19);
    Annihilator ann = construct_two_term(g19);

    ParamSystem child = shift_once(g19.sys, 19, 7);
    FpPoly p0 = coeff_window(g19.sys, 19, 0, 7);
    FpPoly p1 = coeff_window(g19.sys, 19, 7, 19);
    FpPoly t0 = coeff_window(child, 19, 0, 6);
    FpPoly t1 = coeff_window(child, 19, 6, 19);
    FpPoly p1_pm1 = poly_exact_div(p1.frobenius(1), p1);

    FpRatFn q1 = FpRatFn::from_poly(p0) + FpRatFn(t1.frobenius(1), p1_pm1);
    FpRatFn q2 = FpRatFn::from_poly(p1 * t0.frobenius(1)) -
                 FpRatFn(t1.frobenius(1) * p0.frobenius(1), p1_pm1);
    CHECK(ann.terms[0].ratfn == q1);
    CHECK(ann.terms[1].ratfn == q2);
}

TEST_CASE("two-term preconditions are enforced")
{
    // p = 13 fails (P5)
    PrimeContext f13(fixtures::twoterm_2f1(), 13);
    CHECK_THROWS_AS(construct_two_term(f13), std::domain_error);

    // #S = 1 at p = 5 for the Lucas fixture
    PrimeContext t5(fixtures::lucas_2f1(), 5);
    CHECK_THROWS_AS(construct_two_term(t5), std::domain_error);

    // p = 17 has l = 2, not 1 mod 9
    PrimeContext g17(fixtures::ninth_3f2(), 17);
    CHECK_THROWS_AS(construct_two_term(g17), std::domain_error);
}

TEST_CASE("level-2 elimination collapses to a single Frobenius-square term")
{
    PrimeContext g17(fixtures::ninth_3f2(), 17);
    RelationSystem sys = build_system(g17);
    REQUIRE(sys.members.size() == 2);
    for (auto& row : sys.matrix)
        for (auto& q : row)
            CHECK(q.degree() < 289);

    Annihilator ann = eliminate(sys);
    REQUIRE(ann.terms.size() == 1);
    CHECK(ann.terms[0].frob_exp == 2);

    // the closed form assembled from the four window polynomials
    ParamSystem gp = fixtures::ninth_3f2();
    ParamSystem g1 = shift_once(gp, 17, 0); // Dwork image (8/9,5/9,4/9;2/3,1,1)
    CHECK(g1.alpha == std::vector<Rational>{Rational(8, 9), Rational(5, 9), Rational(4, 9)});
    ParamSystem g11 = shift_once(g1, 17, 6);

    FpPoly p00 = coeff_window(gp, 17, 0, 12);
    FpPoly p10 = coeff_window(g1, 17, 0, 6);
    FpPoly p11 = coeff_window(g1, 17, 6, 17);
    FpPoly r10 = coeff_window(g11, 17, 0, 11);
    FpRatFn a1 = FpRatFn::from_poly(p00 * p10.frobenius(1)) +
                 FpRatFn(p00 * p11.frobenius(1) * r10.frobenius(2), p00.frobenius(2));
    CHECK(ann.terms[0].ratfn == a1);
}

TEST_CASE("forced elimination with relaxed bounds still reports heights")
{
    PrimeContext g19(fixtures::ninth_3f2(), 19);
    BuildOptions opt;
    opt.strict_bounds = false;
    Annihilator ann = eliminate(build_system(g19), opt);
    CHECK(ann.provenance.bounds_ok);
    CHECK_FALSE(ann.provenance.stage_heights.empty());
}

TEST_CASE("three-member elimination runs two stages")
{
    PrimeContext ctx(fixtures::threeterm_3f2(), 13);
    REQUIRE(ctx.l == 1);
    StructureSets sets = admissible_set(ctx);
    REQUIRE(sets.S == std::vector<std::uint64_t>{0, 5, 9});
    REQUIRE(check_p_property(ctx).all());

    RelationSystem sys = build_system(ctx);
    REQUIRE(sys.members.size() == 3);
    for (auto& row : sys.matrix)
        for (auto& q : row)
            CHECK(q.degree() < 13);

    Annihilator ann = eliminate(sys);
    REQUIRE_FALSE(ann.terms.empty());
    CHECK(ann.terms.size() <= 4);
    for (auto& t : ann.terms)
        CHECK(t.frob_exp <= 4); // exponents stay within 2(t+1)l with t+1 = 3
    CHECK(ann.provenance.bounds_ok);

    VerificationReport rep = verify_relation(ctx, ann, 40000);
    CHECK(rep.pass);
}

TEST_CASE("random small systems survive the full pipeline")
{
    // Random parameter tuples in (0,1]; whenever the hypotheses hold at a
    // small prime, the constructed relation must verify.
    std::mt19937 rng(20240613);
    std::uniform_int_distribution<long> den_dist(2, 6);
    std::vector<std::uint64_t> primes = {5, 7, 11, 13};
    std::size_t constructed = 0;
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
        std::vector<Rational> alpha, beta;
        for (std::size_t i = 0; i < n; ++i) {
            long d = den_dist(rng);
            std::uniform_int_distribution<long> num_dist(1, d);
            alpha.emplace_back(num_dist(rng), d);
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            long d = den_dist(rng);
            std::uniform_int_distribution<long> num_dist(1, d);
            beta.emplace_back(num_dist(rng), d);
        }
        beta.emplace_back(1);
        bool separated = true;
        for (auto& a : alpha)
            for (auto& b : beta)
                if ((a - b).is_integer())
                    separated = false;
        if (!separated)
            continue;
        ParamSystem sys = ParamSystem::create(alpha, beta);
        for (auto p : primes) {
            if (sys.d % p == 0)
                continue;
            PrimeContext ctx(sys, p);
            if (ctx.l > 2)
                continue;
            if (!integrality_scan(ctx, 2000).pass)
                continue;
            if (!check_p_property(ctx).all())
                continue;
            Annihilator ann = eliminate(build_system(ctx));
            CHECK(verify_relation(ctx, ann, 4000).pass);
            CHECK(bound_audit(ann, ctx).height_ok);
            ++constructed;
        }
    }
    // the generator must actually exercise the pipeline
    CHECK(constructed >= 10);
}
