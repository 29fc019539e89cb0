#include "hpre/rng.hpp"

#include <random>

#include "hpre/errors.hpp"

namespace hpre {

namespace {

mpz_class system_seed() {
    try {
        std::random_device rd;
        mpz_class seed = 0;
        for (int i = 0; i < 8; ++i) {
            seed <<= 32;
            seed += static_cast<unsigned long>(rd());
        }
        return seed;
    } catch (const std::exception& e) {
        throw Error(std::string("entropy source failure: ") + e.what());
    }
}

}  // namespace

Rng::Rng() : state_(gmp_randinit_mt) {
    state_.seed(system_seed());
}

Rng::Rng(std::uint64_t seed) : state_(gmp_randinit_mt) {
    mpz_class s;
    mpz_import(s.get_mpz_t(), 1, 1, sizeof(seed), 0, 0, &seed);
    state_.seed(s);
}

mpz_class Rng::below(const mpz_class& bound) {
    if (bound <= 0) {
        throw Error("Rng::below requires a positive bound");
    }
    return state_.get_z_range(bound);
}

mpz_class Rng::bits(unsigned bit_count) {
    return state_.get_z_bits(bit_count);
}

std::uint64_t Rng::u64() {
    mpz_class v = state_.get_z_bits(64);
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, v.get_mpz_t());
    return out;
}

}  // namespace hpre
