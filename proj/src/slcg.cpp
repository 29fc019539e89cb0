#include "hpre/slcg.hpp"

#include <utility>

#include "hpre/errors.hpp"
#include "internal.hpp"

namespace hpre {

LcgParams::LcgParams(mpz_class multiplier_in, mpz_class increment_in, mpz_class modulus_in,
                     mpz_class seed_in)
    : multiplier(std::move(multiplier_in)),
      increment(std::move(increment_in)),
      modulus(std::move(modulus_in)),
      seed(std::move(seed_in)) {
    if (modulus < 1) {
        throw ProtocolError("LCG modulus must be positive");
    }
    if (multiplier < 1) {
        throw ProtocolError("LCG multiplier must be >= 1");
    }
    if (increment < 0 || increment >= modulus) {
        throw ProtocolError("LCG increment outside Z_m");
    }
    if (seed < 0 || seed >= modulus) {
        throw ProtocolError("LCG seed outside Z_m");
    }
}

ClearLcgState make_clear_lcg(LcgParams params) {
    mpz_class x0 = params.seed;
    return ClearLcgState{std::move(params), std::move(x0), 0};
}

ClearLcgState clear_next(const ClearLcgState& state) {
    mpz_class next =
        (state.params.multiplier * state.value + state.params.increment) % state.params.modulus;
    return ClearLcgState{state.params, std::move(next), state.index + 1};
}

std::vector<mpz_class> clear_sequence(const LcgParams& params, std::size_t count) {
    if (count == 0) {
        throw ProtocolError("sequence length must be >= 1");
    }
    std::vector<mpz_class> out;
    out.reserve(count);
    out.push_back(params.seed);
    mpz_class x = params.seed;
    for (std::size_t i = 1; i < count; ++i) {
        x = (params.multiplier * x + params.increment) % params.modulus;
        out.push_back(x);
    }
    return out;
}

SecureLcgState make_secure_lcg(PaillierPublicKey pk, mpz_class multiplier,
                               Ciphertext enc_increment, Ciphertext enc_seed) {
    if (enc_increment.key_fingerprint() != pk.fingerprint() ||
        enc_seed.key_fingerprint() != pk.fingerprint()) {
        throw KeyMismatchError("secure LCG ciphertexts under a different key");
    }
    if (multiplier < 1) {
        throw ProtocolError("LCG multiplier must be >= 1");
    }
    return SecureLcgState{std::move(pk), std::move(multiplier), std::move(enc_increment),
                          std::move(enc_seed), 0};
}

SecureLcgState secure_next(const SecureLcgState& state) {
    Ciphertext next =
        state.pk.add(state.pk.scalar_mul(state.current, state.multiplier), state.enc_increment);
    return SecureLcgState{state.pk, state.multiplier, state.enc_increment, std::move(next),
                          state.index + 1};
}

Randomizer randomizer_next(const Randomizer& r_n, const Randomizer& r_c,
                           const mpz_class& multiplier, const PaillierPublicKey& pk) {
    mpz_class next =
        internal::powmod(r_n.value(), multiplier, pk.modulus()) * r_c.value() % pk.modulus();
    return Randomizer(std::move(next), pk.modulus());
}

std::vector<Ciphertext> generate_encrypted_sequence(const SecureLcgState& init,
                                                    std::size_t count) {
    if (count == 0) {
        throw ProtocolError("sequence length must be >= 1");
    }
    std::vector<Ciphertext> out;
    out.reserve(count);
    out.push_back(init.current);
    SecureLcgState state = init;
    for (std::size_t i = 1; i < count; ++i) {
        state = secure_next(state);
        out.push_back(state.current);
    }
    return out;
}

}  // namespace hpre
