#pragma once

#include <gmpxx.h>

#include <vector>

#include "hpre/paillier.hpp"

namespace hpre {

// Per-element work in these kernels is independent, so each has an OpenMP
// path next to the serial reference path. Both produce bit-identical output;
// tests compare them and the benchmark target times them against each other.
enum class ExecMode { serial, parallel };

std::vector<Ciphertext> encrypt_batch(const PaillierPublicKey& pk,
                                      const std::vector<mpz_class>& values,
                                      const std::vector<Randomizer>& randomizers,
                                      ExecMode mode);

std::vector<mpz_class> decrypt_batch(const PaillierPrivateKey& sk,
                                     const PaillierPublicKey& pk,
                                     const std::vector<Ciphertext>& cts, ExecMode mode);

// encrypted_difference applied pairwise.
std::vector<mpz_class> difference_batch(const PaillierPublicKey& pk,
                                        const std::vector<Ciphertext>& lhs,
                                        const std::vector<Ciphertext>& rhs, ExecMode mode);

// Homomorphic subtraction lhs[i] * rhs[i]^-1 mod Kp^2, element-wise.
std::vector<Ciphertext> hom_sub_batch(const PaillierPublicKey& pk,
                                      const std::vector<Ciphertext>& lhs,
                                      const std::vector<Ciphertext>& rhs, ExecMode mode);

}  // namespace hpre
