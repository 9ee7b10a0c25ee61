#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hypmodp {

// Residue arithmetic for moduli below 2^31, so that products of two
// residues always fit in an unsigned 64-bit word.
inline constexpr std::uint64_t max_modulus = (std::uint64_t{1} << 31);

inline void require_modulus(std::uint64_t m)
{
    if (m < 2 || m >= max_modulus)
        throw std::invalid_argument("modulus out of supported range [2, 2^31)");
}

inline std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return (a * b) % m;
}

inline std::uint64_t mod_add(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    std::uint64_t s = a + b;
    return s >= m ? s - m : s;
}

inline std::uint64_t mod_sub(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return a >= b ? a - b : a + m - b;
}

inline std::uint64_t mod_neg(std::uint64_t a, std::uint64_t m)
{
    return a == 0 ? 0 : m - a;
}

// Residue of a signed integer, in {0, ..., m-1}.
inline std::uint64_t mod_of(std::int64_t x, std::uint64_t m)
{
    std::int64_t r = x % static_cast<std::int64_t>(m);
    if (r < 0)
        r += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(r);
}

// Extended Euclid. Works for any modulus, no primality assumed.
inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m)
{
    std::int64_t r0 = static_cast<std::int64_t>(m), r1 = static_cast<std::int64_t>(a % m);
    std::int64_t s0 = 0, s1 = 1;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        std::int64_t s2 = s0 - q * s1;
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    if (r0 != 1)
        throw std::domain_error("mod_inverse: argument not invertible");
    if (s0 < 0)
        s0 += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(s0);
}

inline std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t m)
{
    std::uint64_t acc = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1)
            acc = mod_mul(acc, base, m);
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    return acc;
}

inline std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b)
{
    while (b != 0) {
        std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Trial division; fine for the prime sizes this library works at.
inline bool is_prime(std::uint64_t n)
{
    if (n < 2)
        return false;
    if (n % 2 == 0)
        return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0)
            return false;
    return true;
}

inline std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = lo; n <= hi; ++n)
        if (is_prime(n))
            out.push_back(n);
    return out;
}

inline std::uint64_t euler_totient(std::uint64_t n)
{
    std::uint64_t result = n;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            while (n % d == 0)
                n /= d;
            result -= result / d;
        }
    }
    if (n > 1)
        result -= result / n;
    return result;
}

// Order of a in (Z/mZ)*; requires gcd(a, m) = 1. The order divides phi(m),
// so scanning divisors of phi(m) suffices.
inline std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t m)
{
    if (m == 1)
        return 1;
    a %= m;
    if (gcd_u64(a, m) != 1)
        throw std::domain_error("multiplicative_order: gcd(a, m) != 1");
    std::uint64_t phi = euler_totient(m);
    std::uint64_t best = phi;
    for (std::uint64_t d = 1; d * d <= phi; ++d) {
        if (phi % d != 0)
            continue;
        if (mod_pow(a, d, m) == 1) {
            best = d < best ? d : best;
            break; // smallest divisor found in ascending scan
        }
        std::uint64_t e = phi / d;
        if (mod_pow(a, e, m) == 1 && e < best)
            best = e;
    }
    return best;
}

} // namespace hypmodp
