#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hpre/paillier.hpp"
#include "hpre/protocol.hpp"

namespace hpre {

// Binary formats. All integers are big-endian; big numbers are either
// length-prefixed (4-byte length + magnitude) or fixed-width for ciphertexts.
//
// Public key file ("HPK1", version 1):
//   magic[4] version[1] bit_length[4] lp(Kp)
// Private key file ("HSK1", version 1; carries the public modulus so the
// file alone suffices for decryption):
//   magic[4] version[1] bit_length[4] lp(Kp) lp(Ks) lp(Ks_inverse)
// Ciphertext blob file ("HCB1", version 1, 42-byte header):
//   magic[4] version[1] fingerprint[16] key_bits[4] bit_depth[1]
//   width[4] height[4] count[8]
//   followed by `count` ciphertexts of ciphertext_wire_bytes(key_bits) each.

inline constexpr std::size_t kBlobHeaderBytes = 42;

// Fixed ciphertext width: an element of Z_{Kp^2} needs 2*key_bits bits.
std::size_t ciphertext_wire_bytes(unsigned key_bits);

// Fixed width of a residue mod Kp (the clear alphas).
std::size_t residue_wire_bytes(unsigned key_bits);

// Length-prefixed integer: 4-byte length + minimal big-endian magnitude.
std::size_t length_prefixed_bytes(const mpz_class& value);

std::size_t blob_file_bytes(std::size_t count, unsigned key_bits);

struct CiphertextBlob {
    Fingerprint key{};
    unsigned key_bits = 0;
    unsigned bit_depth = 8;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<Ciphertext> cts;
};

void write_public_key(const std::filesystem::path& path, const PaillierPublicKey& pk);
PaillierPublicKey read_public_key(const std::filesystem::path& path);

void write_private_key(const std::filesystem::path& path, const PaillierKeyPair& keys);
PaillierKeyPair read_private_key(const std::filesystem::path& path);

void write_blob(const std::filesystem::path& path, const CiphertextBlob& blob);
CiphertextBlob read_blob(const std::filesystem::path& path);

// Share agreement as plain text (`seed = / increment = / multiplier =`, one
// decimal value per line, `#` comments). Exchanging it securely is out of
// band.
void write_agreement(const std::filesystem::path& path, const ShareAgreement& agreement);
ShareAgreement read_agreement(const std::filesystem::path& path,
                              const PaillierPublicKey& delegator_pk,
                              const PaillierPublicKey& delegate_pk);

// Delegator-retained (r0, rc, multiplier) in the same text format plus the
// owning key fingerprint; written with owner-only permissions.
void write_secrets(const std::filesystem::path& path, const RetainedSecrets& secrets,
                   const Fingerprint& key);
RetainedSecrets read_secrets(const std::filesystem::path& path, const PaillierPublicKey& pk);

}  // namespace hpre
