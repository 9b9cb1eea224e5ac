#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "qclab/ntcore.hpp"
#include "qclab/rng.hpp"

namespace qclab {

/// Blinding-exponent variant.
///   Original:  d2' = (p+1)/2 + r2*(p-1)     (the published scheme; incorrect)
///   Corrected: d2' = (p+1)/2 + r2*(p^2-1)   (order of Z_p[sqrt(w)]* divides p^2-1)
///   KOffset:   d2' = (p+1)/2 + r2*(p^2-1) - k1 for a small k1
enum class Variant { Original, Corrected, KOffset };

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);

/// The client's secret task: find x with x^2 = n (mod p).
struct ProblemInstance {
    mpz_class p; // odd prime, secret
    mpz_class n; // quadratic residue mod p, secret
    std::optional<mpz_class> known_root; // ground truth when planted
};

/// Client-side randomness for one session.
struct BlindingSecrets {
    mpz_class q;  // prime, same bit length as p
    mpz_class r1; // in [0, p)
    mpz_class r2; // in [0, p)
    mpz_class k;  // in [0, (p-1)/2), small
    std::optional<mpz_class> k1; // present iff variant == KOffset
    Variant variant = Variant::Original;
};

/// The public tuple (n', d', d2', p') the client sends to the server.
struct BlindedQuery {
    mpz_class n_b;  // n - r1*p, may be negative
    mpz_class d_b;  // (p-1)/2 - k
    mpz_class d2_b; // variant-dependent
    mpz_class p_b;  // p*q

    bool operator==(const BlindedQuery&) const = default;
};

struct Round {
    mpz_class a;
    mpz_class r1_b;
    bool accepted = false; // the client's Y/N verdict
};

enum class OutcomeKind { Root, NonInteger, CheckFailed };

struct Outcome {
    OutcomeKind kind = OutcomeKind::CheckFailed;
    mpz_class x;       // Root: recovered root
    mpz_class u, v, w; // NonInteger: R2' reduced coefficient-wise mod p
};

struct Transcript {
    BlindedQuery query;
    std::vector<Round> rounds;
    std::optional<QuadExtElem> r2_b;
    Outcome outcome;
};

/// Optional fixed values replacing the sampled blinding randomness; used to
/// replay sessions exactly.
struct BlindOverrides {
    std::optional<mpz_class> q, r1, r2, k, k1;
};

struct RunOverrides {
    BlindOverrides blind;
    std::vector<mpz_class> forced_a; // server's a choices, in order
};

std::pair<BlindingSecrets, BlindedQuery> blind(const ProblemInstance& inst, Rng& rng,
                                               Variant variant, unsigned k_bits = 80,
                                               unsigned k1_max = 100,
                                               const BlindOverrides* ov = nullptr);

/// Server step 2: R1' = (a^2 - n')^{d'} mod p'.
mpz_class server_round1(const BlindedQuery& query, const mpz_class& a);

/// Client step 3: Y iff (a^2 - n')^k * (R1' mod p) = -1 (mod p).
bool client_check_round1(const ProblemInstance& inst, const BlindingSecrets& secrets,
                         const BlindedQuery& query, const mpz_class& a,
                         const mpz_class& r1_b);

/// Server step 4: R2' = (a + sqrt(a^2 - n'))^{d2'} in Z_{p'}[sqrt(w)].
QuadExtElem server_round2(const BlindedQuery& query, const mpz_class& a);

/// Client step 5: reduce R2' coefficient-wise mod p. A vanishing radical
/// coefficient yields a root candidate (Root / CheckFailed); otherwise the
/// result is not an integer and the session failed (NonInteger).
Outcome client_recover(const ProblemInstance& inst, const BlindingSecrets& secrets,
                       const QuadExtElem& r2_b);

/// Full honest session: blind, repeat round 1 with fresh a until the client
/// answers Y, then round 2 and recovery. Rounds are capped at 64*bitlen(p)
/// (protocol_failure_error beyond that).
Transcript honest_run(const ProblemInstance& inst, Rng& rng, Variant variant,
                      unsigned k_bits = 80, unsigned k1_max = 100,
                      const RunOverrides* ov = nullptr);

/// Canonical JSON form (integers as decimal strings):
/// {"n_b","d_b","d2_b","p_b","rounds":[{"a","R1_b","verdict"}],"R2_b":{"u","v","w"},"outcome"}
std::string transcript_json(const Transcript& t);

} // namespace qclab
