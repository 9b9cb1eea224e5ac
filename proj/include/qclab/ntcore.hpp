#pragma once

#include <utility>

#include <gmpxx.h>

#include "qclab/errors.hpp"
#include "qclab/rng.hpp"

namespace qclab {

/// Number of bits in |n|; bitlen(0) == 1 by GMP convention.
unsigned bitlen(const mpz_class& n);

/// Bit length of a prime factor of a balanced two-factor modulus:
/// ceil(bitlen(n)/2). A product of two B-bit primes has 2B or 2B-1 bits,
/// and this returns B for both.
unsigned half_bitlen(const mpz_class& n);

/// a mod m with a result in [0, m); m >= 1. Works for negative a.
mpz_class floor_mod(const mpz_class& a, const mpz_class& m);

/// base^exp mod m by square-and-multiply; exp >= 0, m >= 1.
/// Negative bases are reduced into [0, m) first.
mpz_class mod_pow(const mpz_class& base, const mpz_class& exp, const mpz_class& m);

struct ExtGcdResult {
    mpz_class g; // gcd(a, b) >= 0
    mpz_class x; // a*x + b*y == g
    mpz_class y;
};

ExtGcdResult ext_gcd(const mpz_class& a, const mpz_class& b);

/// Miller-Rabin. Deterministic witness set below 2^64; `rounds` bases derived
/// deterministically from n above that, so verdicts are reproducible.
bool is_prime(const mpz_class& n, unsigned rounds = 16);

/// Probable prime with exactly `bits` bits (top bit set); bits >= 8.
mpz_class random_prime(unsigned bits, Rng& rng);

/// Euler's criterion a^((p-1)/2) mod p for odd prime p: 1 for a nonzero
/// quadratic residue, p-1 for a nonresidue, 0 when p | a.
mpz_class euler_symbol(const mpz_class& a, const mpz_class& p);

/// Element u + v*sqrt(w) of Z_m[sqrt(w)]. Coefficients and the radicand are
/// kept reduced into [0, m).
struct QuadExtElem {
    mpz_class u, v, w, m;

    QuadExtElem(mpz_class u_, mpz_class v_, mpz_class w_, mpz_class m_);

    static QuadExtElem one(const mpz_class& w, const mpz_class& m);

    bool operator==(const QuadExtElem&) const = default;
};

/// Product in Z_m[sqrt(w)]; both operands must share (w, m) exactly.
QuadExtElem quad_mul(const QuadExtElem& x, const QuadExtElem& y);

/// x^e by square-and-multiply over quad_mul; e >= 0.
QuadExtElem quad_pow(const QuadExtElem& x, const mpz_class& e);

/// Square root of a residue n modulo an odd prime p: samples a until a^2 - n
/// is a nonresidue, then takes the constant part of (a + sqrt(a^2-n))^((p+1)/2).
/// Returns the smaller root of the pair {x, p-x}. Throws not_a_residue_error
/// when n is a nonresidue; a sampling cap of 10*bitlen(p) guards against
/// composite p.
mpz_class cipolla_sqrt(const mpz_class& n, const mpz_class& p, Rng& rng);

/// (n, x) with x uniform in [1, p-1] and n = x^2 mod p.
std::pair<mpz_class, mpz_class> plant_qr(const mpz_class& p, Rng& rng);

} // namespace qclab
