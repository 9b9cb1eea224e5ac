#include "qclab/protocol.hpp"

#include <json.hpp>

namespace qclab {

const char* variant_name(Variant v) {
    switch (v) {
    case Variant::Original:
        return "original";
    case Variant::Corrected:
        return "corrected";
    case Variant::KOffset:
        return "koffset";
    }
    return "?";
}

std::optional<Variant> variant_from_name(const std::string& name) {
    if (name == "original")
        return Variant::Original;
    if (name == "corrected")
        return Variant::Corrected;
    if (name == "koffset")
        return Variant::KOffset;
    return std::nullopt;
}

std::pair<BlindingSecrets, BlindedQuery> blind(const ProblemInstance& inst, Rng& rng,
                                               Variant variant, unsigned k_bits,
                                               unsigned k1_max, const BlindOverrides* ov) {
    const mpz_class& p = inst.p;
    if (p < 3 || mpz_even_p(p.get_mpz_t()))
        throw parameter_error("blind: p must be an odd prime");
    unsigned pbits = bitlen(p);

    BlindingSecrets s;
    s.variant = variant;
    if (ov && ov->q)
        s.q = *ov->q;
    else {
        do
            s.q = random_prime(pbits, rng);
        while (s.q == p);
    }
    s.r1 = (ov && ov->r1) ? *ov->r1 : rng.below(p);

    const mpz_class half_up = (p + 1) / 2;   // (p+1)/2
    const mpz_class half_down = (p - 1) / 2; // (p-1)/2

    if (ov && ov->k)
        s.k = *ov->k;
    else {
        if (k_bits + 2 > pbits)
            throw parameter_error("blind: k_bits must be at most bitlen(p) - 2");
        do
            s.k = rng.exact_bits(k_bits);
        while (s.k >= half_down);
    }

    // r2 (and k1 for the offset variant); resample the measure-zero cases
    // that would drive d2' negative.
    mpz_class d2;
    for (;;) {
        s.r2 = (ov && ov->r2) ? *ov->r2 : rng.below(p);
        switch (variant) {
        case Variant::Original:
            d2 = half_up + s.r2 * (p - 1);
            break;
        case Variant::Corrected:
            d2 = half_up + s.r2 * (p * p - 1);
            break;
        case Variant::KOffset: {
            s.k1 = (ov && ov->k1) ? *ov->k1 : rng.below(mpz_class(k1_max) + 1);
            d2 = half_up + s.r2 * (p * p - 1) - *s.k1;
            break;
        }
        }
        if (d2 >= 0)
            break;
        bool pinned = ov && ov->r2 && (variant != Variant::KOffset || ov->k1);
        if (pinned)
            throw parameter_error("blind: overridden r2/k1 make d2' negative");
    }

    BlindedQuery q;
    q.n_b = inst.n - s.r1 * p;
    q.d_b = half_down - s.k;
    q.d2_b = d2;
    q.p_b = p * s.q;
    return {std::move(s), std::move(q)};
}

mpz_class server_round1(const BlindedQuery& query, const mpz_class& a) {
    return mod_pow(a * a - query.n_b, query.d_b, query.p_b);
}

bool client_check_round1(const ProblemInstance& inst, const BlindingSecrets& secrets,
                         const BlindedQuery& query, const mpz_class& a,
                         const mpz_class& r1_b) {
    const mpz_class& p = inst.p;
    mpz_class w = floor_mod(a * a - query.n_b, p);
    mpz_class lhs = mod_pow(w, secrets.k, p) * floor_mod(r1_b, p) % p;
    return lhs == p - 1;
}

QuadExtElem server_round2(const BlindedQuery& query, const mpz_class& a) {
    mpz_class w = floor_mod(a * a - query.n_b, query.p_b);
    return quad_pow(QuadExtElem(a, 1, w, query.p_b), query.d2_b);
}

Outcome client_recover(const ProblemInstance& inst, const BlindingSecrets&,
                       const QuadExtElem& r2_b) {
    const mpz_class& p = inst.p;
    Outcome out;
    out.u = floor_mod(r2_b.u, p);
    out.v = floor_mod(r2_b.v, p);
    out.w = floor_mod(r2_b.w, p);
    if (out.v != 0) {
        out.kind = OutcomeKind::NonInteger;
        return out;
    }
    mpz_class x = out.u;
    if (x * x % p == floor_mod(inst.n, p)) {
        out.kind = OutcomeKind::Root;
        out.x = std::move(x);
    } else {
        out.kind = OutcomeKind::CheckFailed;
    }
    return out;
}

Transcript honest_run(const ProblemInstance& inst, Rng& rng, Variant variant,
                      unsigned k_bits, unsigned k1_max, const RunOverrides* ov) {
    auto [secrets, query] = blind(inst, rng, variant, k_bits, k1_max,
                                  ov ? &ov->blind : nullptr);
    Transcript t;
    t.query = query;

    const unsigned cap = 64 * bitlen(inst.p);
    std::size_t forced_used = 0;
    for (unsigned round = 0; round < cap; ++round) {
        mpz_class a;
        if (ov && !ov->forced_a.empty()) {
            if (forced_used >= ov->forced_a.size())
                throw protocol_failure_error("honest_run: forced a-values exhausted");
            a = ov->forced_a[forced_used++];
        } else {
            a = rng.below(query.p_b);
        }
        mpz_class r1b = server_round1(query, a);
        bool ok = client_check_round1(inst, secrets, query, a, r1b);
        t.rounds.push_back({a, r1b, ok});
        if (ok) {
            QuadExtElem r2b = server_round2(query, a);
            t.r2_b = r2b;
            t.outcome = client_recover(inst, secrets, r2b);
            return t;
        }
    }
    throw protocol_failure_error("honest_run: round cap exceeded");
}

std::string transcript_json(const Transcript& t) {
    using json = nlohmann::ordered_json;
    json j;
    j["n_b"] = t.query.n_b.get_str();
    j["d_b"] = t.query.d_b.get_str();
    j["d2_b"] = t.query.d2_b.get_str();
    j["p_b"] = t.query.p_b.get_str();
    j["rounds"] = json::array();
    for (const auto& r : t.rounds) {
        j["rounds"].push_back(json{{"a", r.a.get_str()},
                                   {"R1_b", r.r1_b.get_str()},
                                   {"verdict", r.accepted ? "Y" : "N"}});
    }
    if (t.r2_b) {
        j["R2_b"] = json{{"u", t.r2_b->u.get_str()},
                         {"v", t.r2_b->v.get_str()},
                         {"w", t.r2_b->w.get_str()}};
    } else {
        j["R2_b"] = nullptr;
    }
    switch (t.outcome.kind) {
    case OutcomeKind::Root:
        j["outcome"] = json{{"kind", "ROOT"}, {"x", t.outcome.x.get_str()}};
        break;
    case OutcomeKind::NonInteger:
        j["outcome"] = json{{"kind", "NON_INTEGER"},
                            {"u", t.outcome.u.get_str()},
                            {"v", t.outcome.v.get_str()},
                            {"w", t.outcome.w.get_str()}};
        break;
    case OutcomeKind::CheckFailed:
        j["outcome"] = json{{"kind", "CHECK_FAILED"}};
        break;
    }
    return j.dump();
}

} // namespace qclab
