#pragma once

#include <vector>

#include <gmpxx.h>

#include "qclab/errors.hpp"

namespace qclab {

/// One continued-fraction convergent h/l (always in lowest terms, l >= 1).
struct Convergent {
    mpz_class h;
    mpz_class l;

    bool operator==(const Convergent&) const = default;
};

/// Full convergent sequence of num/den (num >= 0, den >= 1). The last entry
/// equals num/den in lowest terms.
std::vector<Convergent> cf_convergents(const mpz_class& num, const mpz_class& den);

/// Row-major integer lattice basis; rows are the basis vectors.
struct LatticeBasis {
    std::vector<std::vector<mpz_class>> rows;

    std::size_t dim() const { return rows.size(); }
    std::size_t len() const { return rows.empty() ? 0 : rows.front().size(); }
};

/// LLL reduction with parameter delta in (1/4, 1), exact integer arithmetic
/// throughout (de Weger's integral formulation: Gram integers d_i and scaled
/// coefficients lambda_ij = mu_ij * d_j). Output spans the same lattice, is
/// size-reduced (|mu_ij| <= 1/2) and satisfies the Lovasz condition.
/// Throws rank_deficiency_error on dependent rows.
LatticeBasis lll_reduce(const LatticeBasis& basis, const mpq_class& delta = mpq_class(3, 4));

/// All integers r with |r| <= bound and poly(r) == 0, sorted ascending.
/// poly[i] is the coefficient of x^i; the polynomial must not be identically
/// zero and bound must be >= 1. Roots are located by bisection on [-bound,
/// bound] with exact Sturm-chain sign-variation counts deciding where to
/// recurse, and every candidate is verified by exact evaluation.
std::vector<mpz_class> small_integer_roots(const std::vector<mpz_class>& poly,
                                           const mpz_class& bound);

} // namespace qclab
