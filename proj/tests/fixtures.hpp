#pragma once

#include <hypmodp/hypergeometric.hpp>

// The three recurring parameter systems: a 2F1 with the p-Lucas property
// for all odd primes, a 2F1 with a two-element admissible set for
// p = 1 mod 12, and a 3F2 whose behaviour splits by p mod 9.
namespace fixtures {

inline hypmodp::ParamSystem lucas_2f1()
{
    using hypmodp::Rational;
    return hypmodp::ParamSystem::create({Rational(1, 2), Rational(1, 2)},
                                        {Rational(1), Rational(1)});
}

inline hypmodp::ParamSystem twoterm_2f1()
{
    using hypmodp::Rational;
    return hypmodp::ParamSystem::create({Rational(1, 3), Rational(1, 2)},
                                        {Rational(5, 12), Rational(1)});
}

inline hypmodp::ParamSystem ninth_3f2()
{
    using hypmodp::Rational;
    return hypmodp::ParamSystem::create({Rational(1, 9), Rational(4, 9), Rational(5, 9)},
                                        {Rational(1, 3), Rational(1), Rational(1)});
}

// Three admissible exponents at p = 13 (S = {0, 5, 9}), exercising the
// multi-stage elimination.
inline hypmodp::ParamSystem threeterm_3f2()
{
    using hypmodp::Rational;
    return hypmodp::ParamSystem::create({Rational(1, 4), Rational(1, 2), Rational(5, 6)},
                                        {Rational(1, 3), Rational(2, 3), Rational(1)});
}

} // namespace fixtures
