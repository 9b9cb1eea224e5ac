#include "qclab/rng.hpp"

#include "qclab/errors.hpp"

namespace qclab {

namespace {

std::uint64_t splitmix_output(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

} // namespace

std::uint64_t Rng::next_u64() {
    state_ += kGamma;
    return splitmix_output(state_);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t index) {
    Rng base(seed);
    std::uint64_t a = base.next_u64();
    return Rng(splitmix_output(a ^ (index * kGamma + 1)));
}

mpz_class Rng::bits(unsigned nbits) {
    mpz_class out = 0;
    unsigned words = (nbits + 63) / 64;
    for (unsigned i = 0; i < words; ++i) {
        out <<= 64;
        std::uint64_t w = next_u64();
        mpz_class chunk;
        mpz_import(chunk.get_mpz_t(), 1, 1, sizeof(w), 0, 0, &w);
        out |= chunk;
    }
    // trim to exactly nbits
    mpz_fdiv_r_2exp(out.get_mpz_t(), out.get_mpz_t(), nbits);
    return out;
}

mpz_class Rng::below(const mpz_class& bound) {
    if (bound < 1)
        throw parameter_error("Rng::below: bound must be >= 1");
    unsigned nbits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
    for (;;) {
        mpz_class c = bits(nbits);
        if (c < bound)
            return c;
    }
}

mpz_class Rng::exact_bits(unsigned nbits) {
    if (nbits < 1)
        throw parameter_error("Rng::exact_bits: nbits must be >= 1");
    mpz_class c = bits(nbits);
    mpz_setbit(c.get_mpz_t(), nbits - 1);
    return c;
}

} // namespace qclab
