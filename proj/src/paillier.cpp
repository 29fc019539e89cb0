#include "hpre/paillier.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cstdio>
#include <utility>
#include <vector>

#include "hpre/bytes.hpp"
#include "hpre/errors.hpp"
#include "internal.hpp"

namespace hpre {

namespace {

std::atomic<std::uint64_t> g_modexp_count{0};

const std::vector<unsigned>& small_primes() {
    static const std::vector<unsigned> primes = [] {
        std::vector<unsigned> out;
        std::vector<bool> composite(1024, false);
        for (unsigned i = 2; i < composite.size(); ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (unsigned j = i * i; j < composite.size(); j += i) composite[j] = true;
        }
        return out;
    }();
    return primes;
}

mpz_class random_prime(unsigned bits, Rng& rng) {
    // Top two bits forced so the product of two such primes has exactly
    // 2*bits bits. With fewer than 5 bits that space holds a single prime,
    // so only the top bit is forced and keygen retries on a short product.
    for (;;) {
        mpz_class cand = rng.bits(bits);
        mpz_setbit(cand.get_mpz_t(), bits - 1);
        if (bits >= 5) {
            mpz_setbit(cand.get_mpz_t(), bits - 2);
        }
        mpz_setbit(cand.get_mpz_t(), 0);
        if (is_probable_prime(cand, 64, rng)) {
            return cand;
        }
    }
}

PaillierKeyPair make_keypair(mpz_class kp, const mpz_class& ks) {
    PaillierPublicKey pub = PaillierPublicKey::from_modulus(std::move(kp));
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), ks.get_mpz_t(), pub.modulus().get_mpz_t()) == 0) {
        throw Error("gcd(Ks, Kp) != 1");
    }
    Fingerprint fp = pub.fingerprint();
    return PaillierKeyPair{std::move(pub), PaillierPrivateKey(ks, std::move(inv), fp)};
}

}  // namespace

namespace internal {

mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
    g_modexp_count.fetch_add(1, std::memory_order_relaxed);
    mpz_class out;
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return out;
}

}  // namespace internal

std::uint64_t modexp_count() noexcept {
    return g_modexp_count.load(std::memory_order_relaxed);
}

std::string fingerprint_hex(const Fingerprint& fp) {
    std::string out(fp.size() * 2, '0');
    for (std::size_t i = 0; i < fp.size(); ++i) {
        std::snprintf(out.data() + 2 * i, 3, "%02x", fp[i]);
    }
    return out;
}

Fingerprint fingerprint_of_modulus(const mpz_class& modulus) {
    std::vector<std::uint8_t> bytes = mpz_bytes_be(modulus);
    std::array<std::uint8_t, EVP_MAX_MD_SIZE> digest{};
    unsigned digest_len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &digest_len,
                   EVP_sha256(), nullptr) != 1 ||
        digest_len < 16) {
        throw Error("SHA-256 digest failure");
    }
    Fingerprint fp;
    std::copy_n(digest.begin(), fp.size(), fp.begin());
    return fp;
}

Randomizer::Randomizer(mpz_class value, const mpz_class& modulus) : value_(std::move(value)) {
    if (value_ < 1 || value_ >= modulus) {
        throw ProtocolError("randomizer outside [1, Kp)");
    }
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), value_.get_mpz_t(), modulus.get_mpz_t());
    if (g != 1) {
        throw ProtocolError("randomizer not invertible mod Kp");
    }
}

Ciphertext::Ciphertext(mpz_class value, Fingerprint key)
    : value_(std::move(value)), key_(key) {
    if (value_ <= 0) {
        throw ProtocolError("ciphertext value must be positive");
    }
}

PaillierPublicKey PaillierPublicKey::from_modulus(mpz_class modulus) {
    if (modulus < 3 || mpz_even_p(modulus.get_mpz_t())) {
        throw ProtocolError("Paillier modulus must be an odd integer >= 3");
    }
    PaillierPublicKey pk;
    pk.kp_ = std::move(modulus);
    pk.kp2_ = pk.kp_ * pk.kp_;
    pk.g_ = pk.kp_ + 1;
    pk.bits_ = static_cast<unsigned>(mpz_sizeinbase(pk.kp_.get_mpz_t(), 2));
    pk.fp_ = fingerprint_of_modulus(pk.kp_);
    return pk;
}

Ciphertext PaillierPublicKey::encrypt(const mpz_class& m, const Randomizer& r) const {
    if (m < 0 || m >= kp_) {
        throw ProtocolError("plaintext outside Z_Kp");
    }
    if (r.value() >= kp_) {
        throw ProtocolError("randomizer outside Z*_Kp");
    }
    mpz_class c = 1 + m * kp_;
    c = c * internal::powmod(r.value(), kp_, kp2_) % kp2_;
    return Ciphertext(std::move(c), fp_);
}

Ciphertext PaillierPublicKey::add(const Ciphertext& c1, const Ciphertext& c2) const {
    if (c1.key_fingerprint() != fp_ || c2.key_fingerprint() != fp_) {
        throw KeyMismatchError("homomorphic add across different keys");
    }
    return Ciphertext(c1.value() * c2.value() % kp2_, fp_);
}

Ciphertext PaillierPublicKey::scalar_mul(const Ciphertext& c, const mpz_class& k) const {
    if (c.key_fingerprint() != fp_) {
        throw KeyMismatchError("scalar_mul under a different key");
    }
    if (k < 0) {
        throw ProtocolError("scalar must be non-negative");
    }
    return Ciphertext(internal::powmod(c.value(), k, kp2_), fp_);
}

Ciphertext PaillierPublicKey::invert(const Ciphertext& c) const {
    if (c.key_fingerprint() != fp_) {
        throw KeyMismatchError("invert under a different key");
    }
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), c.value().get_mpz_t(), kp2_.get_mpz_t()) == 0) {
        throw ProtocolError("ciphertext not invertible (corrupted value)");
    }
    return Ciphertext(std::move(inv), fp_);
}

PaillierPrivateKey::PaillierPrivateKey(mpz_class ks, mpz_class ks_inverse, Fingerprint owner)
    : ks_(std::move(ks)), ks_inverse_(std::move(ks_inverse)), owner_(owner) {}

mpz_class PaillierPrivateKey::decrypt(const PaillierPublicKey& pk, const Ciphertext& c) const {
    if (owner_ != pk.fingerprint()) {
        throw KeyMismatchError("private key does not belong to this public key");
    }
    if (c.key_fingerprint() != pk.fingerprint()) {
        throw KeyMismatchError("ciphertext was produced under a different key");
    }
    if (c.value() >= pk.modulus_squared()) {
        throw ProtocolError("ciphertext outside Z*_{Kp^2}");
    }
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), c.value().get_mpz_t(), pk.modulus_squared().get_mpz_t());
    if (g != 1) {
        throw ProtocolError("ciphertext outside Z*_{Kp^2}");
    }
    mpz_class u = internal::powmod(c.value(), ks_, pk.modulus_squared());
    u -= 1;
    // u is a multiple of Kp for every unit mod Kp^2
    mpz_class l, rem;
    mpz_fdiv_qr(l.get_mpz_t(), rem.get_mpz_t(), u.get_mpz_t(), pk.modulus().get_mpz_t());
    if (rem != 0) {
        throw ProtocolError("decryption L-function division not exact");
    }
    return l * ks_inverse_ % pk.modulus();
}

PaillierKeyPair keygen(unsigned bits, Rng& rng, bool test_mode) {
    const unsigned min_bits = test_mode ? 8u : 64u;
    if (bits < min_bits || bits % 2 != 0) {
        throw PolicyError("key size must be even and >= " + std::to_string(min_bits) + " bits");
    }
    for (;;) {
        mpz_class p = random_prime(bits / 2, rng);
        mpz_class q = random_prime(bits / 2, rng);
        if (p == q) {
            continue;
        }
        mpz_class kp = p * q;
        if (mpz_sizeinbase(kp.get_mpz_t(), 2) != bits) {
            continue;
        }
        mpz_class ks = (p - 1) * (q - 1);
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), kp.get_mpz_t(), ks.get_mpz_t());
        if (g != 1) {
            continue;
        }
        return make_keypair(std::move(kp), ks);
    }
}

PaillierKeyPair keypair_from_primes(const mpz_class& p, const mpz_class& q) {
    Rng check_rng(0x9e3779b97f4a7c15ull);
    if (p == q) {
        throw ProtocolError("primes must be distinct");
    }
    if (!is_probable_prime(p, 64, check_rng) || !is_probable_prime(q, 64, check_rng)) {
        throw ProtocolError("keypair_from_primes requires prime inputs");
    }
    return make_keypair(p * q, (p - 1) * (q - 1));
}

Randomizer sample_randomizer(const PaillierPublicKey& pk, Rng& rng) {
    for (;;) {
        mpz_class r = rng.below(pk.modulus());
        if (r == 0) {
            continue;
        }
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.modulus().get_mpz_t());
        if (g == 1) {
            return Randomizer(std::move(r), pk.modulus());
        }
    }
}

bool is_probable_prime(const mpz_class& n, unsigned rounds, Rng& rng) {
    if (n < 2) {
        return false;
    }
    for (unsigned p : small_primes()) {
        if (n == p) {
            return true;
        }
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            return false;
        }
    }
    // Miller-Rabin with random bases; n is odd and > 1021 here.
    mpz_class nm1 = n - 1;
    const unsigned long s = mpz_scan1(nm1.get_mpz_t(), 0);
    mpz_class odd = nm1 >> s;
    mpz_class nm3 = n - 3;
    for (unsigned round = 0; round < rounds; ++round) {
        mpz_class a = 2 + rng.below(nm3);
        mpz_class x = internal::powmod(a, odd, n);
        if (x == 1 || x == nm1) {
            continue;
        }
        bool witness = true;
        for (unsigned long i = 1; i < s; ++i) {
            x = x * x % n;
            if (x == nm1) {
                witness = false;
                break;
            }
        }
        if (witness) {
            return false;
        }
    }
    return true;
}

}  // namespace hpre
