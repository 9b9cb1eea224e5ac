#pragma once

#include <stdexcept>
#include <string>

namespace qclab {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Modulus is zero (or otherwise unusable) where a modulus >= 1 is required.
struct invalid_modulus_error : error {
    using error::error;
};

// Quadratic-extension elements over different (w, m) cannot be combined.
struct domain_mismatch_error : error {
    using error::error;
};

// Square-root request for a quadratic nonresidue.
struct not_a_residue_error : error {
    using error::error;
};

// Caller-supplied argument outside the documented domain.
struct parameter_error : error {
    using error::error;
};

// Lattice rows are linearly dependent.
struct rank_deficiency_error : error {
    using error::error;
};

// A protocol session exceeded its round cap or ran out of forced inputs.
struct protocol_failure_error : error {
    using error::error;
};

} // namespace qclab
