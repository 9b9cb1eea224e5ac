#pragma once

#include <cstdint>

#include <gmpxx.h>

namespace qclab {

/// Deterministic seeded generator (splitmix64 core). The same seed produces
/// the same stream on every platform; all randomness in this library flows
/// through explicit Rng values, never hidden global state.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent stream for trial `index` of a seeded experiment. The
    /// derivation is a fixed hash of (seed, index), so results do not depend
    /// on the order in which trials execute.
    static Rng derive(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();

    /// Uniform in [0, 2^nbits).
    mpz_class bits(unsigned nbits);

    /// Uniform in [0, bound) by rejection; bound >= 1.
    mpz_class below(const mpz_class& bound);

    /// Uniform with exactly `nbits` bits (top bit set); nbits >= 1.
    mpz_class exact_bits(unsigned nbits);

  private:
    std::uint64_t state_;
};

} // namespace qclab
