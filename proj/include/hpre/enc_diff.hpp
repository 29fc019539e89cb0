#pragma once

#include <gmpxx.h>

#include "hpre/paillier.hpp"

namespace hpre {

// Plaintext difference (a - b) mod Kp recovered from two ciphertexts that
// were encrypted under the same key with the same randomizer:
//
//   ((c_a * c_b^-1 mod Kp^2) - 1) / Kp  mod Kp
//
// Requires no private key. The division must be exact; an inexact division
// signals a violated same-randomizer precondition (the check is sufficient
// but not necessary) and raises ProtocolError.
mpz_class encrypted_difference(const PaillierPublicKey& pk, const Ciphertext& c_a,
                               const Ciphertext& c_b);

}  // namespace hpre
