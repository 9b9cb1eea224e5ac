#include "qclab/ntcore.hpp"

#include <cassert>

namespace qclab {

unsigned bitlen(const mpz_class& n) {
    return static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

unsigned half_bitlen(const mpz_class& n) {
    return (bitlen(n) + 1) / 2;
}

mpz_class floor_mod(const mpz_class& a, const mpz_class& m) {
    if (m < 1)
        throw invalid_modulus_error("floor_mod: modulus must be >= 1");
    mpz_class r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

mpz_class mod_pow(const mpz_class& base, const mpz_class& exp, const mpz_class& m) {
    if (m == 0)
        throw invalid_modulus_error("mod_pow: modulus is zero");
    if (m < 0)
        throw invalid_modulus_error("mod_pow: modulus must be >= 1");
    if (exp < 0)
        throw parameter_error("mod_pow: exponent must be >= 0");
    mpz_class b = floor_mod(base, m);
    mpz_class r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

ExtGcdResult ext_gcd(const mpz_class& a, const mpz_class& b) {
    ExtGcdResult out;
    mpz_gcdext(out.g.get_mpz_t(), out.x.get_mpz_t(), out.y.get_mpz_t(), a.get_mpz_t(),
               b.get_mpz_t());
    return out;
}

namespace {

// Witnesses proving primality for all n < 3.3 * 10^24 > 2^64.
constexpr unsigned kSmallWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

constexpr unsigned kTrialPrimes[] = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311,
    313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409,
    419, 421, 431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503};

// One Miller-Rabin round; n odd >= 3, base reduced into [2, n-2].
bool mr_round(const mpz_class& n, const mpz_class& base, const mpz_class& d, unsigned long s) {
    mpz_class x = mod_pow(base, d, n);
    mpz_class n1 = n - 1;
    if (x == 1 || x == n1)
        return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == n1)
            return true;
        if (x == 1)
            return false;
    }
    return false;
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

bool is_prime(const mpz_class& n, unsigned rounds) {
    if (n < 2)
        return false;
    for (unsigned p : kTrialPrimes) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p))
            return n == p;
    }
    if (n < mpz_class(kTrialPrimes[std::size(kTrialPrimes) - 1]) *
                kTrialPrimes[std::size(kTrialPrimes) - 1])
        return true;

    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;

    if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
        for (unsigned w : kSmallWitnesses) {
            if (n == w)
                return true;
            if (!mr_round(n, w, d, s))
                return false;
        }
        return true;
    }

    // Bases derived deterministically from n so verdicts are reproducible.
    std::uint64_t h = mpz_fdiv_ui(n.get_mpz_t(), 0xffffffffffc5ULL) ^
                      (static_cast<std::uint64_t>(bitlen(n)) << 48);
    mpz_class span = n - 3; // bases in [2, n-2]
    for (unsigned i = 0; i < rounds; ++i) {
        mpz_class raw;
        std::uint64_t w0 = mix64(h + 2 * i + 1), w1 = mix64(h ^ (0x5851f42d4c957f2dULL * (i + 1)));
        raw = w0;
        raw <<= 64;
        mpz_class lo;
        mpz_import(lo.get_mpz_t(), 1, 1, sizeof(w1), 0, 0, &w1);
        raw |= lo;
        mpz_class base = 2 + floor_mod(raw, span);
        if (!mr_round(n, base, d, s))
            return false;
    }
    return true;
}

mpz_class random_prime(unsigned bits, Rng& rng) {
    if (bits < 8)
        throw parameter_error("random_prime: need at least 8 bits");
    for (;;) {
        mpz_class c = rng.exact_bits(bits);
        mpz_setbit(c.get_mpz_t(), 0);
        if (is_prime(c, 32))
            return c;
    }
}

mpz_class euler_symbol(const mpz_class& a, const mpz_class& p) {
    assert(p >= 3 && mpz_odd_p(p.get_mpz_t()));
    return mod_pow(a, (p - 1) / 2, p);
}

QuadExtElem::QuadExtElem(mpz_class u_, mpz_class v_, mpz_class w_, mpz_class m_)
    : u(std::move(u_)), v(std::move(v_)), w(std::move(w_)), m(std::move(m_)) {
    if (m < 2)
        throw invalid_modulus_error("QuadExtElem: modulus must be >= 2");
    u = floor_mod(u, m);
    v = floor_mod(v, m);
    w = floor_mod(w, m);
}

QuadExtElem QuadExtElem::one(const mpz_class& w, const mpz_class& m) {
    return QuadExtElem(1, 0, w, m);
}

QuadExtElem quad_mul(const QuadExtElem& x, const QuadExtElem& y) {
    if (x.w != y.w || x.m != y.m)
        throw domain_mismatch_error("quad_mul: operands live in different rings");
    mpz_class u = (x.u * y.u + x.v * y.v * x.w) % x.m;
    mpz_class v = (x.u * y.v + x.v * y.u) % x.m;
    return QuadExtElem(std::move(u), std::move(v), x.w, x.m);
}

QuadExtElem quad_pow(const QuadExtElem& x, const mpz_class& e) {
    if (e < 0)
        throw parameter_error("quad_pow: exponent must be >= 0");
    QuadExtElem acc = QuadExtElem::one(x.w, x.m);
    if (e == 0)
        return acc;
    QuadExtElem sq = x;
    std::size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (std::size_t i = 0; i < nbits; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i))
            acc = quad_mul(acc, sq);
        if (i + 1 < nbits)
            sq = quad_mul(sq, sq);
    }
    return acc;
}

mpz_class cipolla_sqrt(const mpz_class& n, const mpz_class& p, Rng& rng) {
    if (p < 3 || mpz_even_p(p.get_mpz_t()))
        throw parameter_error("cipolla_sqrt: modulus must be an odd prime");
    mpz_class n0 = floor_mod(n, p);
    if (n0 == 0)
        return 0;
    mpz_class es = euler_symbol(n0, p);
    if (es == p - 1)
        throw not_a_residue_error("cipolla_sqrt: n is a quadratic nonresidue");

    unsigned cap = 10 * bitlen(p);
    for (unsigned tries = 0; tries < cap; ++tries) {
        mpz_class a = rng.below(p);
        mpz_class w = floor_mod(a * a - n0, p);
        if (w == 0)
            continue; // resample rather than shortcut through a^2 == n
        if (euler_symbol(w, p) != p - 1)
            continue;
        QuadExtElem x = quad_pow(QuadExtElem(a, 1, w, p), (p + 1) / 2);
        if (x.v != 0)
            throw error("cipolla_sqrt: radical coefficient did not vanish (composite modulus?)");
        mpz_class r = x.u;
        mpz_class other = p - r;
        return r < other ? r : other;
    }
    throw error("cipolla_sqrt: no nonresidue a^2 - n found (composite modulus?)");
}

std::pair<mpz_class, mpz_class> plant_qr(const mpz_class& p, Rng& rng) {
    mpz_class x = 1 + rng.below(p - 1);
    mpz_class n = x * x % p;
    return {std::move(n), std::move(x)};
}

} // namespace qclab
