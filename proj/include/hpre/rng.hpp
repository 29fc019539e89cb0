#pragma once

#include <gmpxx.h>

#include <cstdint>

namespace hpre {

// Big-integer entropy source (Mersenne twister state). Not shareable across
// threads: create one instance per concurrent caller.
class Rng {
public:
    // Seeded from the system entropy source.
    Rng();

    // Deterministic stream, for tests and reproducible runs.
    explicit Rng(std::uint64_t seed);

    // Uniform in [0, bound). bound must be positive.
    mpz_class below(const mpz_class& bound);

    // Uniform in [0, 2^bit_count).
    mpz_class bits(unsigned bit_count);

    std::uint64_t u64();

private:
    gmp_randclass state_;
};

}  // namespace hpre
