#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <string>

#include "hpre/rng.hpp"

namespace hpre {

// First 16 bytes of SHA-256 over the modulus magnitude. Used for key
// mismatch detection only, not as a security feature.
using Fingerprint = std::array<std::uint8_t, 16>;

std::string fingerprint_hex(const Fingerprint& fp);
Fingerprint fingerprint_of_modulus(const mpz_class& modulus);

// Element of Z*_Kp making encryption probabilistic.
class Randomizer {
public:
    Randomizer(mpz_class value, const mpz_class& modulus);
    const mpz_class& value() const noexcept { return value_; }
    bool operator==(const Randomizer&) const = default;

private:
    mpz_class value_;
};

// Element of Z*_{Kp^2} tagged with the key that produced it.
class Ciphertext {
public:
    Ciphertext(mpz_class value, Fingerprint key);
    const mpz_class& value() const noexcept { return value_; }
    const Fingerprint& key_fingerprint() const noexcept { return key_; }
    bool operator==(const Ciphertext&) const = default;

private:
    mpz_class value_;
    Fingerprint key_;
};

// Fast-variant Paillier public key: generator fixed to 1 + Kp, so encryption
// is (1 + m*Kp) * r^Kp mod Kp^2 with a single modular exponentiation.
class PaillierPublicKey {
public:
    static PaillierPublicKey from_modulus(mpz_class modulus);

    const mpz_class& modulus() const noexcept { return kp_; }
    const mpz_class& modulus_squared() const noexcept { return kp2_; }
    const mpz_class& generator() const noexcept { return g_; }
    unsigned bit_length() const noexcept { return bits_; }
    const Fingerprint& fingerprint() const noexcept { return fp_; }

    Ciphertext encrypt(const mpz_class& m, const Randomizer& r) const;

    // Homomorphic sum: result decrypts to m1 + m2 mod Kp, randomizer r1*r2.
    Ciphertext add(const Ciphertext& c1, const Ciphertext& c2) const;

    // result decrypts to k*m mod Kp, randomizer r^k. k must be >= 0.
    Ciphertext scalar_mul(const Ciphertext& c, const mpz_class& k) const;

    // c^-1 mod Kp^2; add(c, invert(c)) decrypts to zero.
    Ciphertext invert(const Ciphertext& c) const;

    bool operator==(const PaillierPublicKey&) const = default;

private:
    PaillierPublicKey() = default;

    mpz_class kp_;
    mpz_class kp2_;
    mpz_class g_;
    unsigned bits_ = 0;
    Fingerprint fp_{};
};

class PaillierPrivateKey {
public:
    PaillierPrivateKey(mpz_class ks, mpz_class ks_inverse, Fingerprint owner);

    const mpz_class& ks() const noexcept { return ks_; }
    const mpz_class& ks_inverse() const noexcept { return ks_inverse_; }
    const Fingerprint& owner_fingerprint() const noexcept { return owner_; }

    mpz_class decrypt(const PaillierPublicKey& pk, const Ciphertext& c) const;

private:
    mpz_class ks_;
    mpz_class ks_inverse_;
    Fingerprint owner_;
};

struct PaillierKeyPair {
    PaillierPublicKey pub;
    PaillierPrivateKey priv;

    mpz_class decrypt(const Ciphertext& c) const { return priv.decrypt(pub, c); }
};

// Generates Kp = pq with p, q distinct probable primes of exactly bits/2 bits
// each, so Kp has exactly `bits` bits and gcd(Kp, Ks) = 1.
// Policy: bits must be even and >= 64, or >= 8 when test_mode is set.
PaillierKeyPair keygen(unsigned bits, Rng& rng, bool test_mode = false);

// Builds a key pair from caller-chosen primes. Intended for tests with tiny
// fixed keys; validates primality and distinctness but applies no size policy.
PaillierKeyPair keypair_from_primes(const mpz_class& p, const mpz_class& q);

// Uniform over Z*_Kp by rejection sampling.
Randomizer sample_randomizer(const PaillierPublicKey& pk, Rng& rng);

bool is_probable_prime(const mpz_class& n, unsigned rounds, Rng& rng);

// Process-wide count of big-number modular exponentiations performed by this
// library. Used by tests to pin operation costs (e.g. one per encryption).
std::uint64_t modexp_count() noexcept;

}  // namespace hpre
