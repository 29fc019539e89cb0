#pragma once

#include <optional>
#include <vector>

#include "hpre/protocol.hpp"

namespace hpre {

// The semi-honest cloud. Everything it does runs on public keys, ciphertexts
// and clear residues; no operation in this interface accepts a private key,
// and the key-isolation audit test checks exactly that.
class Proxy {
public:
    explicit Proxy(PaillierPublicKey delegator_pk);

    void store(OutsourcedData data);
    const OutsourcedData& stored() const;

    // E[X_0, r_0] .. E[X_{N-1}, r_{N-1}] via the secure LCG. Term 0 is the
    // encrypted seed from the message, unchanged.
    std::vector<Ciphertext> generate_noise(const DelegatorShareMessage& msg, std::size_t count);

    // D_i = (X_i - I_i) mod Kp1, computed in clear from the ciphertexts.
    std::vector<mpz_class> compute_differences(const std::vector<Ciphertext>& noise,
                                               ExecMode mode = ExecMode::parallel);

    // G_i = (alpha_i + D_i) mod Kp1, encrypted under the delegate's key and
    // subtracted from E[beta_i]: the result decrypts to the original value.
    ReEncryptedData refresh_and_reencrypt(const std::vector<mpz_class>& differences,
                                          const DelegateRefreshMessage& refresh,
                                          const PaillierPublicKey& delegate_pk, Rng& rng,
                                          ExecMode mode = ExecMode::parallel);

    const PaillierPublicKey& delegator_public_key() const noexcept { return pk1_; }
    const RoleCounters& counters() const noexcept { return counters_; }

private:
    PaillierPublicKey pk1_;
    std::optional<OutsourcedData> data_;
    RoleCounters counters_;
};

}  // namespace hpre
