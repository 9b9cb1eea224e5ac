#include "qclab/attacks.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

namespace qclab {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t micros_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
}

// Success requires a proper prime divisor of half bit length: this rules out
// 1, p' itself, and (by bit length) any stray q-sized cofactor pileup.
bool plausible_factor(const mpz_class& g, const mpz_class& p_b) {
    if (g <= 1 || g >= p_b)
        return false;
    if (bitlen(g) != half_bitlen(p_b))
        return false;
    if (!mpz_divisible_p(p_b.get_mpz_t(), g.get_mpz_t()))
        return false;
    return is_prime(g, 16);
}

} // namespace

const char* attack_name(AttackKind k) {
    switch (k) {
    case AttackKind::GcdSingle:
        return "gcd";
    case AttackKind::GcdPair:
        return "gcd2";
    case AttackKind::Cf:
        return "cf";
    case AttackKind::Coppersmith:
        return "coppersmith";
    }
    return "?";
}

std::optional<AttackKind> attack_from_name(const std::string& name) {
    if (name == "gcd")
        return AttackKind::GcdSingle;
    if (name == "gcd2")
        return AttackKind::GcdPair;
    if (name == "cf")
        return AttackKind::Cf;
    if (name == "coppersmith")
        return AttackKind::Coppersmith;
    return std::nullopt;
}

std::optional<mpz_class> gcd_single_try(const BlindedQuery& query, const mpz_class& b) {
    mpz_class e = 2 * query.d2_b - 2;
    if (e < 0)
        return std::nullopt;
    mpz_class v = mod_pow(b, e, query.p_b);
    mpz_class t = floor_mod(v - 1, query.p_b);
    if (t == 0)
        return std::nullopt;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), query.p_b.get_mpz_t());
    if (plausible_factor(g, query.p_b))
        return g;
    return std::nullopt;
}

AttackReport gcd_single(const BlindedQuery& query, Rng& rng, unsigned max_tries) {
    auto start = Clock::now();
    AttackReport rep;
    rep.kind = AttackKind::GcdSingle;
    for (unsigned i = 0; i < max_tries; ++i) {
        mpz_class b = 2 + rng.below(query.p_b - 3);
        ++rep.tries;
        if (auto p = gcd_single_try(query, b)) {
            rep.success = true;
            rep.recovered_p = std::move(*p);
            break;
        }
    }
    rep.micros = micros_since(start);
    return rep;
}

AttackReport gcd_pair(const mpz_class& d2_a, const mpz_class& d2_b, const mpz_class& p_b,
                      bool sweep, std::uint32_t sweep_bound) {
    auto start = Clock::now();
    AttackReport rep;
    rep.kind = AttackKind::GcdPair;
    mpz_class g;
    {
        mpz_class ea = 2 * d2_a - 2, eb = 2 * d2_b - 2;
        mpz_gcd(g.get_mpz_t(), ea.get_mpz_t(), eb.get_mpz_t());
    }
    auto consider = [&](const mpz_class& cand) {
        ++rep.tries;
        if (plausible_factor(cand, p_b)) {
            rep.success = true;
            rep.recovered_p = cand;
            return true;
        }
        return false;
    };
    if (g >= 2 && consider(g + 1)) {
        rep.micros = micros_since(start);
        return rep;
    }
    if (sweep && g >= 2) {
        // gcd(1+2r2, 1+2r2bar) may be a small extra factor e; peel it off.
        for (std::uint32_t e = 2; e <= sweep_bound && mpz_class(e) < g; ++e) {
            if (!mpz_divisible_ui_p(g.get_mpz_t(), e))
                continue;
            mpz_class cand = g / e + 1;
            if (consider(cand))
                break;
        }
    }
    rep.micros = micros_since(start);
    return rep;
}

std::optional<std::pair<mpz_class, mpz_class>>
recover_p_given_r2(const mpz_class& d2, const mpz_class& r2, unsigned k1_max) {
    if (r2 < 1)
        return std::nullopt;
    // 2*r2*p^2 + p + (1 - 2*r2 - 2*k1 - 2*d2) = 0 for the right k1;
    // p = (-1 + sqrt(1 - 8*r2*c)) / (4*r2)
    const mpz_class two_a = 4 * r2;
    for (unsigned k1 = 0; k1 <= k1_max; ++k1) {
        mpz_class c = 1 - 2 * r2 - 2 * mpz_class(k1) - 2 * d2;
        mpz_class disc = 1 - 2 * two_a * c;
        if (disc < 0)
            continue;
        if (!mpz_perfect_square_p(disc.get_mpz_t()))
            continue;
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), disc.get_mpz_t());
        mpz_class num = s - 1;
        if (num <= 0)
            continue;
        if (!mpz_divisible_p(num.get_mpz_t(), two_a.get_mpz_t()))
            continue;
        mpz_class p = num / two_a;
        if (p < 3 || mpz_even_p(p.get_mpz_t()) || !is_prime(p, 16))
            continue;
        return std::make_pair(std::move(p), mpz_class(k1));
    }
    return std::nullopt;
}

namespace {

// Given p, pull (r2, k1) back out of d2' = (p+1)/2 + r2 (p^2-1) - k1.
std::optional<std::pair<mpz_class, mpz_class>>
split_d2(const mpz_class& d2, const mpz_class& p, unsigned k1_max) {
    mpz_class base = d2 - (p + 1) / 2;
    mpz_class mod = p * p - 1;
    for (unsigned k1 = 0; k1 <= k1_max; ++k1) {
        mpz_class num = base + k1;
        if (num >= 0 && mpz_divisible_p(num.get_mpz_t(), mod.get_mpz_t()))
            return std::make_pair(mpz_class(num / mod), mpz_class(k1));
    }
    return std::nullopt;
}

} // namespace

AttackReport cf_attack(const mpz_class& d2_a, const mpz_class& d2_b, const mpz_class& p_b,
                       unsigned k1_max) {
    auto start = Clock::now();
    AttackReport rep;
    rep.kind = AttackKind::Cf;
    if (d2_a < 1 || d2_b < 1) {
        rep.micros = micros_since(start);
        return rep;
    }

    auto accept = [&](const mpz_class& p) {
        if (p_b != 0 && !plausible_factor(p, p_b))
            return false;
        auto first = split_d2(d2_a, p, k1_max);
        auto second = split_d2(d2_b, p, k1_max);
        if (!first || !second)
            return false;
        rep.success = true;
        rep.recovered_p = p;
        rep.recovered_r2 = first->first;
        rep.recovered_k1 = first->second;
        rep.recovered_r2_bar = second->first;
        rep.recovered_k1_bar = second->second;
        return true;
    };

    for (const Convergent& cv : cf_convergents(d2_a, d2_b)) {
        ++rep.tries;
        if (auto hit = recover_p_given_r2(d2_a, cv.h, k1_max)) {
            if (accept(hit->first))
                break;
        }
        if (auto hit = recover_p_given_r2(d2_b, cv.l, k1_max)) {
            if (accept(hit->first))
                break;
        }
    }
    rep.micros = micros_since(start);
    return rep;
}

CoppersmithParams CoppersmithParams::defaults_for(const mpz_class& p_b) {
    CoppersmithParams params;
    params.beta = mpq_class(half_bitlen(p_b) - 1, bitlen(p_b));
    params.beta.canonicalize();
    return params;
}

namespace {

// floor(2^e) for fractional e >= 0, accurate to ~1 ulp of double
mpz_class pow2_floor(double e) {
    if (e < 0)
        return 0;
    auto ip = static_cast<unsigned long>(e);
    double frac = e - static_cast<double>(ip);
    // 2^frac in [1,2), scaled to 53 bits
    auto scaled = static_cast<std::uint64_t>(std::ldexp(std::exp2(frac), 52));
    mpz_class out;
    mpz_import(out.get_mpz_t(), 1, 1, sizeof(scaled), 0, 0, &scaled);
    if (ip >= 52)
        out <<= (ip - 52);
    else
        out >>= (52 - ip);
    return out;
}

double log2_mpz(const mpz_class& n) {
    signed long exp2;
    double d = mpz_get_d_2exp(&exp2, n.get_mpz_t());
    return std::log2(d) + static_cast<double>(exp2);
}

// Largest X this lattice size can certify: LLL's first vector satisfies
// |b1| <= 2^((n-1)/2) det^(1/n), and Howgrave-Graham needs |h(xX)| <
// p'^(beta m)/sqrt(n) with det = p'^(m(m+1)/2) X^(n(n-1)/2).
mpz_class hg_capacity(const mpz_class& p_b, const CoppersmithParams& params) {
    const double n = params.m + params.t + 1;
    const double logN = log2_mpz(p_b);
    const double beta = mpq_get_d(params.beta.get_mpq_t());
    double num = n * (params.m * beta * logN - 0.5 * std::log2(n) - (n - 1) / 2.0) -
                 params.m * (params.m + 1) / 2.0 * logN;
    double logX = num * 2.0 / (n * (n - 1));
    return pow2_floor(logX);
}

} // namespace

CoppersmithLattice build_coppersmith_lattice(const BlindedQuery& query,
                                             const CoppersmithParams& params) {
    const mpz_class& N = query.p_b;
    if (mpz_even_p(N.get_mpz_t()) || N < 3)
        throw parameter_error("coppersmith: p' must be odd and >= 3");
    if (params.m < 1)
        throw parameter_error("coppersmith: m must be >= 1");
    const unsigned n = params.m + params.t + 1;
    if (n > 16)
        throw parameter_error("coppersmith: lattice dimension m + t + 1 must be <= 16");
    if (params.beta <= 0 || params.beta > 1)
        throw parameter_error("coppersmith: beta must lie in (0, 1]");

    // f(x) = x + c0 with c0 = d' + (1 - p')/2 mod p'; f(k) = 0 (mod p)
    mpz_class inv2;
    if (mpz_invert(inv2.get_mpz_t(), mpz_class(2).get_mpz_t(), N.get_mpz_t()) == 0)
        throw parameter_error("coppersmith: 2 is not invertible mod p'");
    mpz_class c0 = floor_mod(query.d_b + (1 - N) * inv2, N);

    // The spec bound floor(c * p'^(beta^2)) is the asymptotic one; cap it at
    // what this lattice size provably reaches, or LLL's short vectors need
    // not vanish at k.
    double beta = mpq_get_d(params.beta.get_mpq_t());
    mpz_class x_spec = params.c * pow2_floor(beta * beta * log2_mpz(N));
    mpz_class x_cap = hg_capacity(N, params);
    mpz_class X = x_spec < x_cap ? x_spec : x_cap;
    if (X < 1)
        X = 1;

    // rows of f(x)^i, i = 0..m
    std::vector<std::vector<mpz_class>> fpow{{1}};
    for (unsigned i = 0; i < params.m; ++i) {
        const auto& prev = fpow.back();
        std::vector<mpz_class> next(prev.size() + 1, mpz_class(0));
        for (std::size_t j = 0; j < prev.size(); ++j) {
            next[j] += prev[j] * c0;
            next[j + 1] += prev[j];
        }
        fpow.push_back(std::move(next));
    }

    std::vector<mpz_class> xpow(n);
    xpow[0] = 1;
    for (unsigned j = 1; j < n; ++j)
        xpow[j] = xpow[j - 1] * X;

    CoppersmithLattice lat;
    lat.x_bound = X;
    lat.f_const = c0;
    lat.m = params.m;
    lat.t = params.t;
    lat.basis.rows.reserve(n);
    mpz_class scale;
    mpz_pow_ui(scale.get_mpz_t(), N.get_mpz_t(), params.m);
    for (unsigned i = 0; i <= params.m; ++i) {
        std::vector<mpz_class> row(n, mpz_class(0));
        for (std::size_t j = 0; j < fpow[i].size(); ++j)
            row[j] = fpow[i][j] * scale * xpow[j];
        lat.basis.rows.push_back(std::move(row));
        if (i < params.m)
            mpz_divexact(scale.get_mpz_t(), scale.get_mpz_t(), N.get_mpz_t());
    }
    for (unsigned j = 1; j <= params.t; ++j) {
        std::vector<mpz_class> row(n, mpz_class(0));
        for (std::size_t i = 0; i < fpow[params.m].size(); ++i)
            row[i + j] = fpow[params.m][i] * xpow[i + j];
        lat.basis.rows.push_back(std::move(row));
    }
    return lat;
}

AttackReport coppersmith_attack(const BlindedQuery& query, const CoppersmithParams& params) {
    auto start = Clock::now();
    AttackReport rep;
    rep.kind = AttackKind::Coppersmith;

    CoppersmithLattice lat = build_coppersmith_lattice(query, params);
    const mpz_class& X = lat.x_bound;
    LatticeBasis reduced = lll_reduce(lat.basis, params.delta);

    // examine rows shortest-first
    std::vector<std::pair<mpz_class, std::size_t>> order;
    for (std::size_t i = 0; i < reduced.rows.size(); ++i) {
        mpz_class norm2 = 0;
        for (const auto& c : reduced.rows[i])
            norm2 += c * c;
        order.emplace_back(std::move(norm2), i);
    }
    std::sort(order.begin(), order.end());

    for (const auto& [norm2, idx] : order) {
        const auto& row = reduced.rows[idx];
        std::vector<mpz_class> poly(row.size());
        bool nonzero = false;
        mpz_class xp = 1;
        for (std::size_t j = 0; j < row.size(); ++j) {
            // lattice vectors keep coefficient j divisible by X^j
            mpz_divexact(poly[j].get_mpz_t(), row[j].get_mpz_t(), xp.get_mpz_t());
            nonzero = nonzero || poly[j] != 0;
            xp *= X;
        }
        if (!nonzero)
            continue;
        ++rep.tries;
        for (const mpz_class& root : small_integer_roots(poly, X)) {
            mpz_class cand = 2 * (query.d_b + root) + 1;
            if (plausible_factor(cand, query.p_b)) {
                rep.success = true;
                rep.recovered_k = root;
                rep.recovered_p = std::move(cand);
                rep.micros = micros_since(start);
                return rep;
            }
        }
    }
    rep.micros = micros_since(start);
    return rep;
}

std::pair<mpz_class, mpz_class> recover_n_and_root(const mpz_class& p,
                                                   const BlindedQuery& query, Rng& rng) {
    mpz_class n = floor_mod(query.n_b, p);
    if (euler_symbol(n, p) == p - 1)
        throw not_a_residue_error("recover_n_and_root: n' mod p is a nonresidue "
                                  "(wrong p candidate?)");
    mpz_class x = cipolla_sqrt(n, p, rng);
    return {std::move(n), std::move(x)};
}

std::string attack_report_json(const AttackReport& r) {
    using json = nlohmann::ordered_json;
    json j;
    j["kind"] = attack_name(r.kind);
    j["success"] = r.success;
    auto put = [&](const char* key, const std::optional<mpz_class>& v) {
        if (v)
            j[key] = v->get_str();
        else
            j[key] = nullptr;
    };
    put("recovered_p", r.recovered_p);
    put("recovered_k", r.recovered_k);
    put("recovered_r2", r.recovered_r2);
    put("recovered_k1", r.recovered_k1);
    put("recovered_r2_bar", r.recovered_r2_bar);
    put("recovered_k1_bar", r.recovered_k1_bar);
    put("recovered_n", r.recovered_n);
    put("recovered_x", r.recovered_x);
    j["tries"] = r.tries;
    j["micros"] = r.micros;
    return j.dump();
}

} // namespace qclab
