#include "qclab/diophantine.hpp"

#include <algorithm>
#include <cstddef>

namespace qclab {

std::vector<Convergent> cf_convergents(const mpz_class& num, const mpz_class& den) {
    if (den == 0)
        throw parameter_error("cf_convergents: zero denominator");
    if (num < 0 || den < 0)
        throw parameter_error("cf_convergents: negative input");

    std::vector<Convergent> out;
    mpz_class h0 = 0, l0 = 1; // h_{-2}/l_{-2}
    mpz_class h1 = 1, l1 = 0; // h_{-1}/l_{-1}
    mpz_class a = num, b = den;
    while (b != 0) {
        mpz_class q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        mpz_class h2 = q * h1 + h0;
        mpz_class l2 = q * l1 + l0;
        out.push_back({h2, l2});
        h0 = h1;
        l0 = l1;
        h1 = h2;
        l1 = l2;
        a = b;
        b = r;
    }
    return out;
}

namespace {

using Row = std::vector<mpz_class>;

mpz_class dot(const Row& a, const Row& b) {
    mpz_class s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

// round(num/den) for den > 0
mpz_class round_div(const mpz_class& num, const mpz_class& den) {
    mpz_class q;
    mpz_class two_num = 2 * num + den;
    mpz_class two_den = 2 * den;
    mpz_fdiv_q(q.get_mpz_t(), two_num.get_mpz_t(), two_den.get_mpz_t());
    return q;
}

} // namespace

LatticeBasis lll_reduce(const LatticeBasis& basis, const mpq_class& delta) {
    if (delta <= mpq_class(1, 4) || delta >= 1)
        throw parameter_error("lll_reduce: delta must lie in (1/4, 1)");
    const std::size_t n = basis.dim();
    if (n == 0)
        throw parameter_error("lll_reduce: empty basis");
    const std::size_t len = basis.rows.front().size();
    for (const auto& r : basis.rows)
        if (r.size() != len)
            throw parameter_error("lll_reduce: ragged rows");

    std::vector<Row> b = basis.rows;

    // Integral Gram-Schmidt state: d[i] is the determinant of the leading
    // i x i Gram block (d[0] = 1), lam[i][j] = mu_ij * d[j+1].
    std::vector<mpz_class> d(n + 1);
    std::vector<std::vector<mpz_class>> lam(n, std::vector<mpz_class>(n));
    d[0] = 1;
    auto gso_row = [&](std::size_t i) {
        for (std::size_t j = 0; j <= i; ++j) {
            mpz_class u = dot(b[i], b[j]);
            for (std::size_t t = 0; t < j; ++t) {
                u = d[t + 1] * u - lam[i][t] * lam[j][t];
                mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d[t].get_mpz_t());
            }
            if (j < i)
                lam[i][j] = u;
            else {
                if (u <= 0)
                    throw rank_deficiency_error("lll_reduce: rows are linearly dependent");
                d[i + 1] = u;
            }
        }
    };
    for (std::size_t i = 0; i < n; ++i)
        gso_row(i);

    auto reduce = [&](std::size_t k, std::size_t l) {
        // make |mu_kl| <= 1/2, i.e. |2 lam| <= d[l+1]
        if (2 * abs(lam[k][l]) <= d[l + 1])
            return;
        mpz_class q = round_div(lam[k][l], d[l + 1]);
        for (std::size_t i = 0; i < len; ++i)
            b[k][i] -= q * b[l][i];
        lam[k][l] -= q * d[l + 1];
        for (std::size_t i = 0; i < l; ++i)
            lam[k][i] -= q * lam[l][i];
    };

    auto swap_rows = [&](std::size_t k) {
        std::swap(b[k], b[k - 1]);
        for (std::size_t j = 0; j + 1 < k; ++j)
            std::swap(lam[k][j], lam[k - 1][j]);
        mpz_class lm = lam[k][k - 1];
        mpz_class newd = d[k - 1] * d[k + 1] + lm * lm;
        mpz_divexact(newd.get_mpz_t(), newd.get_mpz_t(), d[k].get_mpz_t());
        for (std::size_t i = k + 1; i < n; ++i) {
            mpz_class t = lam[i][k];
            mpz_class x = d[k + 1] * lam[i][k - 1] - lm * t;
            mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), d[k].get_mpz_t());
            lam[i][k] = x;
            mpz_class y = newd * t + lm * x;
            mpz_divexact(y.get_mpz_t(), y.get_mpz_t(), d[k + 1].get_mpz_t());
            lam[i][k - 1] = y;
        }
        d[k] = newd;
    };

    const mpz_class dn(delta.get_num()), dd(delta.get_den());
    std::size_t k = 1;
    while (k < n) {
        reduce(k, k - 1);
        // Lovasz: delta * d[k]^2 <= d[k+1]*d[k-1] + lam^2
        if (dn * d[k] * d[k] > dd * (d[k + 1] * d[k - 1] + lam[k][k - 1] * lam[k][k - 1])) {
            swap_rows(k);
            k = (k > 1) ? k - 1 : 1;
        } else {
            for (std::size_t l = k - 1; l-- > 0;)
                reduce(k, l);
            ++k;
        }
    }

    LatticeBasis out;
    out.rows = std::move(b);
    return out;
}

namespace {

using Poly = std::vector<mpz_class>; // poly[i] = coefficient of x^i

void trim(Poly& p) {
    while (!p.empty() && p.back() == 0)
        p.pop_back();
}

int sign_of(const mpz_class& v) { return mpz_sgn(v.get_mpz_t()); }

mpz_class content(const Poly& p) {
    mpz_class g = 0;
    for (const auto& c : p)
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;
}

// divide by content and make the leading coefficient positive
void make_primitive(Poly& p) {
    trim(p);
    if (p.empty())
        return;
    mpz_class g = content(p);
    if (sign_of(p.back()) < 0)
        g = -g;
    if (g != 1)
        for (auto& c : p)
            mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

Poly derivative(const Poly& p) {
    Poly out;
    for (std::size_t i = 1; i < p.size(); ++i)
        out.push_back(mpz_class(i) * p[i]);
    return out;
}

mpz_class eval(const Poly& p, const mpz_class& x) {
    mpz_class acc = 0;
    for (std::size_t i = p.size(); i-- > 0;)
        acc = acc * x + p[i];
    return acc;
}

// strip content only; the sign stays (Sturm chains depend on it)
void scale_primitive_keep_sign(Poly& p) {
    trim(p);
    if (p.empty())
        return;
    mpz_class g = content(p);
    if (g > 1)
        for (auto& c : p)
            mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

// Remainder of a/b over Q, rescaled to a primitive integer polynomial
// (positive scaling keeps signs, which is all Sturm chains need).
Poly rational_rem(const Poly& a, const Poly& b) {
    std::vector<mpq_class> r(a.begin(), a.end());
    std::size_t db = b.size() - 1;
    mpq_class lead(b.back());
    while (r.size() >= b.size()) {
        mpq_class q = r.back() / lead;
        for (std::size_t i = 0; i < b.size(); ++i)
            r[r.size() - b.size() + i] -= q * b[i];
        while (!r.empty() && r.back() == 0)
            r.pop_back();
        if (r.size() <= db)
            break;
    }
    // clear denominators
    mpz_class l = 1;
    for (const auto& c : r)
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    Poly out;
    out.reserve(r.size());
    for (const auto& c : r) {
        mpq_class scaled = c * l;
        out.push_back(scaled.get_num());
    }
    scale_primitive_keep_sign(out);
    return out;
}

// Exact quotient a/b (b | a over Q[x]); result rescaled to primitive.
Poly rational_quot(const Poly& a, const Poly& b) {
    std::vector<mpq_class> r(a.begin(), a.end());
    std::vector<mpq_class> q(a.size() - b.size() + 1, mpq_class(0));
    mpq_class lead(b.back());
    while (r.size() >= b.size()) {
        mpq_class c = r.back() / lead;
        q[r.size() - b.size()] = c;
        for (std::size_t i = 0; i < b.size(); ++i)
            r[r.size() - b.size() + i] -= c * b[i];
        while (!r.empty() && r.back() == 0)
            r.pop_back();
    }
    mpz_class l = 1;
    for (const auto& c : q)
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    Poly out;
    out.reserve(q.size());
    for (const auto& c : q) {
        mpq_class scaled = c * l;
        out.push_back(scaled.get_num());
    }
    make_primitive(out);
    return out;
}

Poly poly_gcd(Poly a, Poly b) {
    make_primitive(a);
    make_primitive(b);
    while (!b.empty()) {
        Poly r = rational_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    make_primitive(a);
    return a;
}

struct SturmChain {
    std::vector<Poly> seq;

    explicit SturmChain(const Poly& f) {
        seq.push_back(f);
        Poly d = derivative(f);
        make_primitive(d);
        if (!d.empty())
            seq.push_back(d);
        while (seq.back().size() > 1) {
            Poly r = rational_rem(seq[seq.size() - 2], seq.back());
            if (r.empty())
                break; // squarefree input never reaches this
            for (auto& c : r)
                c = -c;
            seq.push_back(std::move(r));
        }
    }

    // sign variations of the chain evaluated at x
    unsigned variations(const mpz_class& x) const {
        unsigned v = 0;
        int prev = 0;
        for (const auto& p : seq) {
            int s = sign_of(eval(p, x));
            if (s != 0) {
                if (prev != 0 && s != prev)
                    ++v;
                prev = s;
            }
        }
        return v;
    }
};

} // namespace

std::vector<mpz_class> small_integer_roots(const std::vector<mpz_class>& poly,
                                           const mpz_class& bound) {
    Poly f = poly;
    trim(f);
    if (f.empty())
        throw parameter_error("small_integer_roots: zero polynomial");
    if (bound < 1)
        throw parameter_error("small_integer_roots: bound must be >= 1");

    std::vector<mpz_class> roots;

    // factor out x^valuation
    std::size_t val = 0;
    while (val < poly.size() && poly[val] == 0)
        ++val;
    if (val > 0) {
        roots.push_back(0);
        f.erase(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(val));
    }
    make_primitive(f);

    if (f.size() > 1) {
        // strip repeated factors so the Sturm chain is clean
        Poly g = poly_gcd(f, derivative(f));
        Poly sf = (g.size() > 1) ? rational_quot(f, g) : f;

        SturmChain chain(sf);
        mpz_class lo = -bound - 1, hi = bound;
        unsigned vlo = chain.variations(lo), vhi = chain.variations(hi);

        // bisect (lo, hi] wherever the chain reports roots inside
        struct Seg {
            mpz_class lo, hi;
            unsigned vlo, vhi;
        };
        std::vector<Seg> stack;
        stack.push_back({lo, hi, vlo, vhi});
        while (!stack.empty()) {
            Seg s = std::move(stack.back());
            stack.pop_back();
            if (s.vlo == s.vhi)
                continue;
            if (s.hi - s.lo == 1) {
                if (eval(sf, s.hi) == 0)
                    roots.push_back(s.hi);
                continue;
            }
            mpz_class mid = (s.lo + s.hi) >> 1; // floor((lo+hi)/2)
            unsigned vm = chain.variations(mid);
            stack.push_back({s.lo, mid, s.vlo, vm});
            stack.push_back({mid, s.hi, vm, s.vhi});
        }
    }

    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

    // exact verification against the original polynomial
    std::vector<mpz_class> verified;
    for (const auto& r : roots)
        if (abs(r) <= bound && eval(poly, r) == 0)
            verified.push_back(r);
    return verified;
}

} // namespace qclab
