#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <gmpxx.h>

#include "qclab/diophantine.hpp"
#include "qclab/protocol.hpp"
#include "qclab/rng.hpp"

namespace qclab {

enum class AttackKind { GcdSingle, GcdPair, Cf, Coppersmith };

const char* attack_name(AttackKind k);
std::optional<AttackKind> attack_from_name(const std::string& name);

/// Structured outcome of one attack run. A success always carries a prime
/// recovered_p that divides the query's p' and has half its bit length.
struct AttackReport {
    AttackKind kind = AttackKind::GcdSingle;
    bool success = false;
    std::optional<mpz_class> recovered_p;
    std::optional<mpz_class> recovered_k;  // Coppersmith: the small offset in d'
    std::optional<mpz_class> recovered_r2; // CF: first query's r2
    std::optional<mpz_class> recovered_k1; // CF: first query's k1
    std::optional<mpz_class> recovered_r2_bar; // CF: second query's r2
    std::optional<mpz_class> recovered_k1_bar; // CF: second query's k1
    std::optional<mpz_class> recovered_n;
    std::optional<mpz_class> recovered_x;
    std::uint64_t tries = 0;
    std::int64_t micros = 0;
};

std::string attack_report_json(const AttackReport& r);

/// One b-candidate of the single-query gcd attack: returns p when
/// gcd(b^{2 d2' - 2} - 1 mod p', p') is a proper prime factor of half bit
/// length, nothing otherwise.
std::optional<mpz_class> gcd_single_try(const BlindedQuery& query, const mpz_class& b);

/// Single-query key recovery: 2 d2' - 2 is a multiple of p - 1 for the
/// Original and Corrected variants, so b^{2 d2' - 2} - 1 shares the factor p
/// with p' for any b coprime to p.
AttackReport gcd_single(const BlindedQuery& query, Rng& rng, unsigned max_tries = 64);

/// Two-execution variant: gcd(2 d2' - 2, 2 d2bar' - 2) = (p-1) * g0 with g0
/// usually 1. With `sweep` set, divisors e <= sweep_bound of the gcd are also
/// tried as p = g/e + 1 (extension beyond the plain method; off by default).
AttackReport gcd_pair(const mpz_class& d2_a, const mpz_class& d2_b, const mpz_class& p_b,
                      bool sweep = false, std::uint32_t sweep_bound = 1u << 16);

/// Solve d2' = (p+1)/2 + r2*(p^2-1) - k1 for p, sweeping k1 = 0..k1_max:
/// p is the positive integer root of 2*r2*p^2 + p + (1 - 2*r2 - 2*k1 - 2*d2')
/// when the discriminant is a perfect square and the root is an odd prime.
std::optional<std::pair<mpz_class, mpz_class>>
recover_p_given_r2(const mpz_class& d2, const mpz_class& r2, unsigned k1_max);

/// Two-execution attack on the k1-offset variant: r2/r2bar is a best rational
/// approximation of d2'/d2bar', so it appears among the convergents; each
/// convergent is fed to recover_p_given_r2 for both queries. Pass p_b = 0
/// when the composite modulus is unknown (skips the divisibility check).
AttackReport cf_attack(const mpz_class& d2_a, const mpz_class& d2_b, const mpz_class& p_b,
                       unsigned k1_max = 100);

/// Parameters of the small-root lattice attack on d' = (p-1)/2 - k.
struct CoppersmithParams {
    mpq_class beta;         // divisor bound exponent: p >= p'^beta
    unsigned m = 3;         // shift depth
    unsigned t = 1;         // extra x-shifts
    mpz_class c = 1;        // multiplier on the root bound
    mpq_class delta{3, 4};  // LLL parameter

    /// beta = (half_bitlen(p') - 1) / bitlen(p'), just under 1/2.
    static CoppersmithParams defaults_for(const mpz_class& p_b);
};

struct CoppersmithLattice {
    LatticeBasis basis;       // rows scaled by powers of x_bound
    mpz_class x_bound;        // root search bound X
    mpz_class f_const;        // f(x) = x + f_const, f(k) = 0 mod p
    unsigned m = 0, t = 0;
};

/// Shift-polynomial lattice {p'^{m-i} f^i : 0<=i<=m} u {x^j f^m : 1<=j<=t}
/// with the coefficient of x^i scaled by X^i. X is the spec bound
/// floor(c * p'^{beta^2}) capped at the Howgrave-Graham-provable capacity of
/// this lattice size (the asymptotic bound is unreachable at small m).
CoppersmithLattice build_coppersmith_lattice(const BlindedQuery& query,
                                             const CoppersmithParams& params);

/// Lattice attack recovering k from d' alone, then p = 2(d' + k) + 1.
AttackReport coppersmith_attack(const BlindedQuery& query, const CoppersmithParams& params);

/// With p in hand, the instance opens up: n = n' mod p, x = cipolla_sqrt(n, p).
/// Propagates not_a_residue_error when n is a nonresidue (wrong p candidate).
std::pair<mpz_class, mpz_class> recover_n_and_root(const mpz_class& p,
                                                   const BlindedQuery& query, Rng& rng);

} // namespace qclab
