#include "hpre/enc_diff.hpp"

#include "hpre/errors.hpp"

namespace hpre {

mpz_class encrypted_difference(const PaillierPublicKey& pk, const Ciphertext& c_a,
                               const Ciphertext& c_b) {
    if (c_a.key_fingerprint() != pk.fingerprint() ||
        c_b.key_fingerprint() != pk.fingerprint()) {
        throw KeyMismatchError("difference operands under different keys");
    }
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), c_b.value().get_mpz_t(),
                   pk.modulus_squared().get_mpz_t()) == 0) {
        throw ProtocolError("right operand not invertible mod Kp^2");
    }
    mpz_class u = c_a.value() * inv % pk.modulus_squared();
    u -= 1;
    mpz_class d, rem;
    mpz_fdiv_qr(d.get_mpz_t(), rem.get_mpz_t(), u.get_mpz_t(), pk.modulus().get_mpz_t());
    if (rem != 0) {
        throw ProtocolError("inexact division: operands were not encrypted with the same randomizer");
    }
    return d % pk.modulus();
}

}  // namespace hpre
