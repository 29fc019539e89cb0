#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "hpre/paillier.hpp"

namespace hpre {

// Linear congruential generator X_{n+1} = a*X_n + c mod m. The seed X0 and
// increment are the secret; the multiplier is public.
struct LcgParams {
    mpz_class multiplier;
    mpz_class increment;
    mpz_class modulus;
    mpz_class seed;

    LcgParams(mpz_class multiplier, mpz_class increment, mpz_class modulus, mpz_class seed);
};

struct ClearLcgState {
    LcgParams params;
    mpz_class value;    // X_n
    std::uint64_t index = 0;
};

ClearLcgState make_clear_lcg(LcgParams params);

// One clear-domain step. States are immutable; a new state is returned.
ClearLcgState clear_next(const ClearLcgState& state);

// First `count` terms X_0..X_{count-1} (term 0 is the seed itself).
std::vector<mpz_class> clear_sequence(const LcgParams& params, std::size_t count);

// Same generator evaluated over Paillier ciphertexts:
//   E[X_{n+1}, r_{n+1}] = E[X_n, r_n]^a * E[c, r_c] mod Kp^2
// No private key is involved at any point.
struct SecureLcgState {
    PaillierPublicKey pk;        // LCG modulus m = Kp
    mpz_class multiplier;
    Ciphertext enc_increment;    // E[c, r_c]
    Ciphertext current;          // E[X_n, r_n]
    std::uint64_t index = 0;
};

SecureLcgState make_secure_lcg(PaillierPublicKey pk, mpz_class multiplier,
                               Ciphertext enc_increment, Ciphertext enc_seed);

SecureLcgState secure_next(const SecureLcgState& state);

// Randomizer recursion implied by the encrypted step: r_{n+1} = r_n^a * r_c mod Kp.
Randomizer randomizer_next(const Randomizer& r_n, const Randomizer& r_c,
                           const mpz_class& multiplier, const PaillierPublicKey& pk);

// E[X_0, r_0] .. E[X_{count-1}, r_{count-1}]; element 0 is the initial
// encrypted seed as provided.
std::vector<Ciphertext> generate_encrypted_sequence(const SecureLcgState& init,
                                                    std::size_t count);

}  // namespace hpre
