#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hpre/kernels.hpp"
#include "hpre/paillier.hpp"
#include "hpre/rng.hpp"

namespace hpre {

enum class Role { delegator, proxy, delegate };

const char* role_name(Role role) noexcept;

// Vector of b-bit integers, optionally shaped as an image.
struct DataVector {
    std::vector<std::uint64_t> values;
    unsigned bit_depth = 8;
    std::uint32_t width = 0;
    std::uint32_t height = 0;

    static DataVector image(std::vector<std::uint64_t> values, unsigned bit_depth,
                            std::uint32_t width, std::uint32_t height);
    static DataVector flat(std::vector<std::uint64_t> values, unsigned bit_depth);

    std::size_t size() const noexcept { return values.size(); }
    bool operator==(const DataVector&) const = default;
};

// Ciphertexts under the delegator's key, produced with chained randomizers:
// r_{i+1} = r_i^a * r_c mod Kp1.
struct OutsourcedData {
    std::vector<Ciphertext> cts;
    unsigned bit_depth = 8;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    Fingerprint key{};

    std::size_t size() const noexcept { return cts.size(); }
};

// Ciphertexts under the delegate's key; decrypting them yields the original
// data exactly.
struct ReEncryptedData {
    std::vector<Ciphertext> cts;
    unsigned bit_depth = 8;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    Fingerprint key{};

    std::size_t size() const noexcept { return cts.size(); }
};

// LCG parameters both parties agreed on. Seed and increment are the shared
// secret; the multiplier is public.
struct ShareAgreement {
    mpz_class seed;
    mpz_class increment;
    mpz_class multiplier;
    Fingerprint delegator_key{};
    Fingerprint delegate_key{};

    bool operator==(const ShareAgreement&) const = default;
};

ShareAgreement make_share_agreement(const PaillierPublicKey& delegator_pk,
                                    const PaillierPublicKey& delegate_pk, mpz_class seed,
                                    mpz_class increment, mpz_class multiplier);

ShareAgreement random_share_agreement(const PaillierPublicKey& delegator_pk,
                                      const PaillierPublicKey& delegate_pk,
                                      mpz_class multiplier, Rng& rng);

// What the delegator memorizes per outsourced file.
struct RetainedSecrets {
    Randomizer r0;
    Randomizer rc;
    mpz_class multiplier;
};

struct DelegatorShareMessage {
    Ciphertext enc_seed;       // E_{Kp1}[X0, r0], same r0 as pixel 0
    Ciphertext enc_increment;  // E_{Kp1}[c, r_c]
    mpz_class multiplier;
};

struct DelegateRefreshMessage {
    std::vector<Ciphertext> enc_betas;  // E_{Kp2}[beta_i, r'_i]
    std::vector<mpz_class> alphas;      // (beta_i - X_i) mod Kp1
};

struct RoleCounters {
    std::uint64_t encryptions = 0;
    std::uint64_t decryptions = 0;
    std::uint64_t homomorphic_mults = 0;
    std::uint64_t ciphertext_inversions = 0;
    std::uint64_t modular_exponentiations = 0;
    std::uint64_t clear_additions = 0;
    std::uint64_t secure_lcg_steps = 0;
    std::uint64_t differences = 0;

    bool operator==(const RoleCounters&) const = default;
};

struct CounterSnapshot {
    RoleCounters delegator;
    RoleCounters proxy;
    RoleCounters delegate;
};

enum class RecordKind { phase, message };

struct TranscriptRecord {
    std::uint64_t seq = 0;
    RecordKind kind = RecordKind::phase;
    std::string phase;
    std::string payload_type;  // messages only
    Role sender = Role::delegator;
    Role receiver = Role::delegator;
    std::uint64_t payload_bytes = 0;
    CounterSnapshot counters;
};

// Ordered record of every message and per-phase counter snapshot.
class ProtocolTranscript {
public:
    void log_phase(Role actor, std::string phase, CounterSnapshot counters);
    void log_message(Role sender, Role receiver, std::string phase, std::string payload_type,
                     std::uint64_t payload_bytes, CounterSnapshot counters);

    const std::vector<TranscriptRecord>& records() const noexcept { return records_; }
    std::size_t message_count() const;
    std::uint64_t bytes_sent_by(Role role) const;

    // Messages sent by `role` with seq strictly greater than `seq`.
    std::size_t messages_sent_after(Role role, std::uint64_t seq) const;

    // One JSON object per line, one line per record.
    void write_jsonl(std::ostream& out) const;

private:
    std::vector<TranscriptRecord> records_;
};

// Exact wire sizes of the protocol messages (see the serialized formats).
std::uint64_t share_message_payload_bytes(unsigned delegator_key_bits,
                                          const mpz_class& multiplier);
std::uint64_t refresh_message_payload_bytes(std::size_t count, unsigned delegator_key_bits,
                                            unsigned delegate_key_bits);
std::uint64_t result_payload_bytes(std::size_t count, unsigned delegate_key_bits);

// Data owner. One instance is bound to one outsourced file and to one share
// agreement; reusing the LCG secret across files would reuse the noise pad.
class Delegator {
public:
    explicit Delegator(PaillierPublicKey pk);
    Delegator(PaillierPublicKey pk, RetainedSecrets secrets);

    // Encrypts value i with r_i following the randomizer chain from (r0, rc).
    // Only (r0, rc, multiplier) are retained afterwards.
    OutsourcedData outsource(const DataVector& data, const Randomizer& r0, const Randomizer& rc,
                             const mpz_class& multiplier, ExecMode mode = ExecMode::parallel);

    DelegatorShareMessage initiate_share(const ShareAgreement& agreement);

    const PaillierPublicKey& public_key() const noexcept { return pk_; }
    const RetainedSecrets& secrets() const;
    const RoleCounters& counters() const noexcept { return counters_; }

private:
    PaillierPublicKey pk_;
    std::optional<RetainedSecrets> secrets_;
    std::optional<ShareAgreement> bound_agreement_;
    RoleCounters counters_;
};

// Share recipient. Construct with only the public key to run the refresh
// phase; the full key pair is needed to decrypt the re-encrypted result.
class Delegate {
public:
    explicit Delegate(PaillierPublicKey pk);
    explicit Delegate(PaillierKeyPair keys);

    // Regenerates the clear LCG sequence, samples the bounded noise
    // 2^b - 1 < beta_i < min(Kp1, Kp2) and encrypts it under the own key.
    DelegateRefreshMessage prepare_refresh(const ShareAgreement& agreement, std::size_t count,
                                           unsigned bit_depth,
                                           const PaillierPublicKey& delegator_pk, Rng& rng,
                                           ExecMode mode = ExecMode::parallel);

    DataVector decrypt_result(const ReEncryptedData& data,
                              ExecMode mode = ExecMode::parallel);

    const PaillierPublicKey& public_key() const noexcept { return pk_; }
    const RoleCounters& counters() const noexcept { return counters_; }

private:
    PaillierPublicKey pk_;
    std::optional<PaillierPrivateKey> sk_;
    RoleCounters counters_;
};

// Recovers the randomizer of c = E[m, r] from the private key and the known
// plaintext: r = (c * (1 + m*Kp)^-1)^(Kp^-1 mod Ks) mod Kp.
Randomizer recover_randomizer(const PaillierKeyPair& keys, const Ciphertext& c,
                              const mpz_class& plaintext);

// (r0, rc) from the stored share message, so the delegator does not have to
// keep the random values herself.
std::pair<Randomizer, Randomizer> recover_share_randomizers(const PaillierKeyPair& keys,
                                                            const DelegatorShareMessage& msg,
                                                            const mpz_class& seed,
                                                            const mpz_class& increment);

struct PhaseTimings {
    double outsource_s = 0;
    double initiate_s = 0;
    double noise_s = 0;
    double differences_s = 0;
    double refresh_s = 0;
    double reencrypt_s = 0;

    double proxy_s() const noexcept { return noise_s + differences_s + reencrypt_s; }
    double delegate_s() const noexcept { return refresh_s; }
    double delegator_share_s() const noexcept { return initiate_s; }
};

struct ShareCounterSummary {
    std::uint64_t delegator_share_encryptions = 0;  // 2: seed + increment
    std::uint64_t proxy_secure_steps = 0;           // N - 1
    std::uint64_t proxy_differences = 0;            // N
    std::uint64_t proxy_encryptions = 0;            // N
    std::uint64_t proxy_ciphertext_inversions = 0;  // N
    std::uint64_t delegate_encryptions = 0;         // N
};

struct SimulationOptions {
    ExecMode exec = ExecMode::parallel;
};

struct ShareRun {
    OutsourcedData outsourced;
    ReEncryptedData result;
    ProtocolTranscript transcript;
    ShareCounterSummary counters;
    PhaseTimings timings;
};

// Full in-process run: outsource, share message, noise generation,
// differences, noise refreshment, re-encryption. The delegator originates no
// message after the share message; the proxy never sees a private key.
ShareRun run_share_simulation(const DataVector& data, const PaillierPublicKey& delegator_pk,
                              const PaillierPublicKey& delegate_pk,
                              const ShareAgreement& agreement, Rng& rng,
                              const SimulationOptions& opts = {});

// Share phases only, starting from data that was outsourced earlier.
ShareRun run_share_from_outsourced(OutsourcedData data, const RetainedSecrets& secrets,
                                   const PaillierPublicKey& delegator_pk,
                                   const PaillierPublicKey& delegate_pk,
                                   const ShareAgreement& agreement, Rng& rng,
                                   const SimulationOptions& opts = {});

}  // namespace hpre
