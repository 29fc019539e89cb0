#include "hpre/protocol.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <ostream>

#include "hpre/errors.hpp"
#include "hpre/proxy.hpp"
#include "hpre/serialize.hpp"
#include "hpre/slcg.hpp"
#include "internal.hpp"

namespace hpre {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

mpz_class pow2(unsigned bits) {
    mpz_class out = 1;
    out <<= bits;
    return out;
}

nlohmann::json counters_json(const RoleCounters& c) {
    return {{"encryptions", c.encryptions},
            {"decryptions", c.decryptions},
            {"homomorphic_mults", c.homomorphic_mults},
            {"ciphertext_inversions", c.ciphertext_inversions},
            {"modular_exponentiations", c.modular_exponentiations},
            {"clear_additions", c.clear_additions},
            {"secure_lcg_steps", c.secure_lcg_steps},
            {"differences", c.differences}};
}

}  // namespace

const char* role_name(Role role) noexcept {
    switch (role) {
        case Role::delegator: return "delegator";
        case Role::proxy: return "proxy";
        case Role::delegate: return "delegate";
    }
    return "?";
}

DataVector DataVector::image(std::vector<std::uint64_t> values, unsigned bit_depth,
                             std::uint32_t width, std::uint32_t height) {
    if (bit_depth < 1 || bit_depth > 64) {
        throw ProtocolError("bit depth must be in [1, 64]");
    }
    if (values.size() != static_cast<std::size_t>(width) * height) {
        throw ProtocolError("value count does not match width*height");
    }
    if (bit_depth < 64) {
        const std::uint64_t limit = std::uint64_t{1} << bit_depth;
        for (std::uint64_t v : values) {
            if (v >= limit) {
                throw ProtocolError("value does not fit the declared bit depth");
            }
        }
    }
    DataVector out;
    out.values = std::move(values);
    out.bit_depth = bit_depth;
    out.width = width;
    out.height = height;
    return out;
}

DataVector DataVector::flat(std::vector<std::uint64_t> values, unsigned bit_depth) {
    const auto n = static_cast<std::uint32_t>(values.size());
    return image(std::move(values), bit_depth, n, 1);
}

ShareAgreement make_share_agreement(const PaillierPublicKey& delegator_pk,
                                    const PaillierPublicKey& delegate_pk, mpz_class seed,
                                    mpz_class increment, mpz_class multiplier) {
    if (seed < 0 || seed >= delegator_pk.modulus()) {
        throw ProtocolError("agreement seed outside Z_Kp1");
    }
    if (increment < 0 || increment >= delegator_pk.modulus()) {
        throw ProtocolError("agreement increment outside Z_Kp1");
    }
    if (multiplier < 1) {
        throw ProtocolError("agreement multiplier must be >= 1");
    }
    ShareAgreement out;
    out.seed = std::move(seed);
    out.increment = std::move(increment);
    out.multiplier = std::move(multiplier);
    out.delegator_key = delegator_pk.fingerprint();
    out.delegate_key = delegate_pk.fingerprint();
    return out;
}

ShareAgreement random_share_agreement(const PaillierPublicKey& delegator_pk,
                                      const PaillierPublicKey& delegate_pk,
                                      mpz_class multiplier, Rng& rng) {
    mpz_class seed = rng.below(delegator_pk.modulus());
    mpz_class increment = rng.below(delegator_pk.modulus());
    return make_share_agreement(delegator_pk, delegate_pk, std::move(seed),
                                std::move(increment), std::move(multiplier));
}

void ProtocolTranscript::log_phase(Role actor, std::string phase, CounterSnapshot counters) {
    TranscriptRecord rec;
    rec.seq = records_.size() + 1;
    rec.kind = RecordKind::phase;
    rec.phase = std::move(phase);
    rec.sender = actor;
    rec.receiver = actor;
    rec.counters = std::move(counters);
    records_.push_back(std::move(rec));
}

void ProtocolTranscript::log_message(Role sender, Role receiver, std::string phase,
                                     std::string payload_type, std::uint64_t payload_bytes,
                                     CounterSnapshot counters) {
    TranscriptRecord rec;
    rec.seq = records_.size() + 1;
    rec.kind = RecordKind::message;
    rec.phase = std::move(phase);
    rec.payload_type = std::move(payload_type);
    rec.sender = sender;
    rec.receiver = receiver;
    rec.payload_bytes = payload_bytes;
    rec.counters = std::move(counters);
    records_.push_back(std::move(rec));
}

std::size_t ProtocolTranscript::message_count() const {
    std::size_t n = 0;
    for (const auto& rec : records_) {
        if (rec.kind == RecordKind::message) ++n;
    }
    return n;
}

std::uint64_t ProtocolTranscript::bytes_sent_by(Role role) const {
    std::uint64_t total = 0;
    for (const auto& rec : records_) {
        if (rec.kind == RecordKind::message && rec.sender == role) {
            total += rec.payload_bytes;
        }
    }
    return total;
}

std::size_t ProtocolTranscript::messages_sent_after(Role role, std::uint64_t seq) const {
    std::size_t n = 0;
    for (const auto& rec : records_) {
        if (rec.kind == RecordKind::message && rec.sender == role && rec.seq > seq) {
            ++n;
        }
    }
    return n;
}

void ProtocolTranscript::write_jsonl(std::ostream& out) const {
    for (const auto& rec : records_) {
        nlohmann::json line = {
            {"seq", rec.seq},
            {"kind", rec.kind == RecordKind::message ? "message" : "phase"},
            {"phase", rec.phase},
            {"counters",
             {{"delegator", counters_json(rec.counters.delegator)},
              {"proxy", counters_json(rec.counters.proxy)},
              {"delegate", counters_json(rec.counters.delegate)}}},
        };
        if (rec.kind == RecordKind::message) {
            line["from"] = role_name(rec.sender);
            line["to"] = role_name(rec.receiver);
            line["payload_type"] = rec.payload_type;
            line["payload_bytes"] = rec.payload_bytes;
        } else {
            line["actor"] = role_name(rec.sender);
        }
        out << line.dump() << '\n';
    }
}

std::uint64_t share_message_payload_bytes(unsigned delegator_key_bits,
                                          const mpz_class& multiplier) {
    return 2 * ciphertext_wire_bytes(delegator_key_bits) + length_prefixed_bytes(multiplier);
}

std::uint64_t refresh_message_payload_bytes(std::size_t count, unsigned delegator_key_bits,
                                            unsigned delegate_key_bits) {
    return count * (ciphertext_wire_bytes(delegate_key_bits) +
                    residue_wire_bytes(delegator_key_bits));
}

std::uint64_t result_payload_bytes(std::size_t count, unsigned delegate_key_bits) {
    return count * ciphertext_wire_bytes(delegate_key_bits);
}

Delegator::Delegator(PaillierPublicKey pk) : pk_(std::move(pk)) {}

Delegator::Delegator(PaillierPublicKey pk, RetainedSecrets secrets)
    : pk_(std::move(pk)), secrets_(std::move(secrets)) {}

const RetainedSecrets& Delegator::secrets() const {
    if (!secrets_) {
        throw ProtocolError("no retained outsourcing secrets");
    }
    return *secrets_;
}

OutsourcedData Delegator::outsource(const DataVector& data, const Randomizer& r0,
                                    const Randomizer& rc, const mpz_class& multiplier,
                                    ExecMode mode) {
    if (secrets_) {
        throw ProtocolError("delegator instance already bound to an outsourced file");
    }
    if (data.size() == 0) {
        throw ProtocolError("nothing to outsource");
    }
    if (multiplier < 1) {
        throw ProtocolError("chain multiplier must be >= 1");
    }
    const std::size_t n = data.size();

    // The chain itself is sequential; the encryptions after it are not.
    std::vector<Randomizer> chain;
    chain.reserve(n);
    chain.push_back(r0);
    for (std::size_t i = 1; i < n; ++i) {
        chain.push_back(randomizer_next(chain.back(), rc, multiplier, pk_));
    }
    counters_.modular_exponentiations += n - 1;

    std::vector<mpz_class> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = data.values[i];
    }
    std::vector<Ciphertext> cts = encrypt_batch(pk_, values, chain, mode);
    counters_.encryptions += n;
    counters_.modular_exponentiations += n;

    secrets_ = RetainedSecrets{r0, rc, multiplier};

    OutsourcedData out;
    out.cts = std::move(cts);
    out.bit_depth = data.bit_depth;
    out.width = data.width;
    out.height = data.height;
    out.key = pk_.fingerprint();
    return out;
}

DelegatorShareMessage Delegator::initiate_share(const ShareAgreement& agreement) {
    if (!secrets_) {
        throw ProtocolError("initiate_share requires retained outsourcing secrets");
    }
    if (agreement.delegator_key != pk_.fingerprint()) {
        throw KeyMismatchError("agreement names a different delegator key");
    }
    if (agreement.multiplier != secrets_->multiplier) {
        throw ProtocolError("agreement multiplier differs from the outsourcing chain multiplier");
    }
    if (bound_agreement_ && !(*bound_agreement_ == agreement)) {
        throw ProtocolError("this outsourced file is already bound to a share agreement");
    }
    bound_agreement_ = agreement;

    Ciphertext enc_seed = pk_.encrypt(agreement.seed, secrets_->r0);
    Ciphertext enc_increment = pk_.encrypt(agreement.increment, secrets_->rc);
    counters_.encryptions += 2;
    counters_.modular_exponentiations += 2;
    return DelegatorShareMessage{std::move(enc_seed), std::move(enc_increment),
                                 agreement.multiplier};
}

Proxy::Proxy(PaillierPublicKey delegator_pk) : pk1_(std::move(delegator_pk)) {}

void Proxy::store(OutsourcedData data) {
    if (data.key != pk1_.fingerprint()) {
        throw KeyMismatchError("outsourced data is not under the delegator key");
    }
    data_ = std::move(data);
}

const OutsourcedData& Proxy::stored() const {
    if (!data_) {
        throw ProtocolError("no outsourced data stored");
    }
    return *data_;
}

std::vector<Ciphertext> Proxy::generate_noise(const DelegatorShareMessage& msg,
                                              std::size_t count) {
    const OutsourcedData& data = stored();
    if (count != data.size()) {
        throw ProtocolError("noise length does not match the outsourced data");
    }
    SecureLcgState state =
        make_secure_lcg(pk1_, msg.multiplier, msg.enc_increment, msg.enc_seed);
    std::vector<Ciphertext> noise = generate_encrypted_sequence(state, count);
    counters_.secure_lcg_steps += count - 1;
    counters_.homomorphic_mults += count - 1;
    counters_.modular_exponentiations += count - 1;
    return noise;
}

std::vector<mpz_class> Proxy::compute_differences(const std::vector<Ciphertext>& noise,
                                                  ExecMode mode) {
    const OutsourcedData& data = stored();
    if (noise.size() != data.size()) {
        throw ProtocolError("noise length does not match the outsourced data");
    }
    std::vector<mpz_class> diffs = difference_batch(pk1_, noise, data.cts, mode);
    counters_.differences += diffs.size();
    return diffs;
}

ReEncryptedData Proxy::refresh_and_reencrypt(const std::vector<mpz_class>& differences,
                                             const DelegateRefreshMessage& refresh,
                                             const PaillierPublicKey& delegate_pk, Rng& rng,
                                             ExecMode mode) {
    const OutsourcedData& data = stored();
    const std::size_t n = data.size();
    if (differences.size() != n || refresh.alphas.size() != n ||
        refresh.enc_betas.size() != n) {
        throw ProtocolError("refresh message length mismatch");
    }

    std::vector<mpz_class> blinded(n);  // G_i = (alpha_i + D_i) mod Kp1 = beta_i - I_i
    for (std::size_t i = 0; i < n; ++i) {
        mpz_class g = refresh.alphas[i] + differences[i];
        mpz_mod(g.get_mpz_t(), g.get_mpz_t(), pk1_.modulus().get_mpz_t());
        if (g >= delegate_pk.modulus()) {
            // impossible while the beta window of the refresh held
            throw ProtocolError("blinded value exceeds the delegate modulus");
        }
        blinded[i] = std::move(g);
    }
    counters_.clear_additions += n;

    std::vector<Randomizer> fresh;
    fresh.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        fresh.push_back(sample_randomizer(delegate_pk, rng));
    }
    std::vector<Ciphertext> enc_blinded = encrypt_batch(delegate_pk, blinded, fresh, mode);
    counters_.encryptions += n;
    counters_.modular_exponentiations += n;

    std::vector<Ciphertext> result = hom_sub_batch(delegate_pk, refresh.enc_betas, enc_blinded, mode);
    counters_.ciphertext_inversions += n;
    counters_.homomorphic_mults += n;

    ReEncryptedData out;
    out.cts = std::move(result);
    out.bit_depth = data.bit_depth;
    out.width = data.width;
    out.height = data.height;
    out.key = delegate_pk.fingerprint();
    return out;
}

Delegate::Delegate(PaillierPublicKey pk) : pk_(std::move(pk)) {}

Delegate::Delegate(PaillierKeyPair keys)
    : pk_(std::move(keys.pub)), sk_(std::move(keys.priv)) {}

DelegateRefreshMessage Delegate::prepare_refresh(const ShareAgreement& agreement,
                                                 std::size_t count, unsigned bit_depth,
                                                 const PaillierPublicKey& delegator_pk,
                                                 Rng& rng, ExecMode mode) {
    if (agreement.delegate_key != pk_.fingerprint()) {
        throw KeyMismatchError("agreement names a different delegate key");
    }
    if (agreement.delegator_key != delegator_pk.fingerprint()) {
        throw KeyMismatchError("agreement names a different delegator key");
    }
    if (count == 0) {
        throw ProtocolError("refresh for an empty share");
    }
    const mpz_class& kp1 = delegator_pk.modulus();
    const mpz_class& kp2 = pk_.modulus();
    const mpz_class smaller = kp1 < kp2 ? kp1 : kp2;
    const mpz_class low = pow2(bit_depth);
    if (smaller <= low) {
        throw ProtocolError("no valid beta window: min(Kp1, Kp2) <= 2^b");
    }

    // Same sequence the proxy generates under encryption.
    std::vector<mpz_class> xs =
        clear_sequence(LcgParams(agreement.multiplier, agreement.increment, kp1,
                                 agreement.seed),
                       count);

    const mpz_class span = smaller - low;  // betas uniform in [2^b, min - 1]
    std::vector<mpz_class> betas(count);
    std::vector<mpz_class> alphas(count);
    for (std::size_t i = 0; i < count; ++i) {
        betas[i] = low + rng.below(span);
        mpz_class a = betas[i] - xs[i];
        mpz_mod(a.get_mpz_t(), a.get_mpz_t(), kp1.get_mpz_t());
        alphas[i] = std::move(a);
    }
    counters_.clear_additions += count;

    std::vector<Randomizer> fresh;
    fresh.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        fresh.push_back(sample_randomizer(pk_, rng));
    }
    std::vector<Ciphertext> enc_betas = encrypt_batch(pk_, betas, fresh, mode);
    counters_.encryptions += count;
    counters_.modular_exponentiations += count;

    return DelegateRefreshMessage{std::move(enc_betas), std::move(alphas)};
}

DataVector Delegate::decrypt_result(const ReEncryptedData& data, ExecMode mode) {
    if (!sk_) {
        throw ProtocolError("this delegate holds no private key");
    }
    if (data.key != pk_.fingerprint()) {
        throw KeyMismatchError("re-encrypted data is not under the delegate key");
    }
    std::vector<mpz_class> plain = decrypt_batch(*sk_, pk_, data.cts, mode);
    counters_.decryptions += plain.size();
    counters_.modular_exponentiations += plain.size();

    const mpz_class limit = pow2(data.bit_depth);
    std::vector<std::uint64_t> values(plain.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
        if (plain[i] >= limit) {
            throw ProtocolError("decrypted value exceeds the bit depth (corrupted share)");
        }
        values[i] = mpz_get_ui(plain[i].get_mpz_t());
    }
    return DataVector::image(std::move(values), data.bit_depth, data.width, data.height);
}

Randomizer recover_randomizer(const PaillierKeyPair& keys, const Ciphertext& c,
                              const mpz_class& plaintext) {
    const PaillierPublicKey& pk = keys.pub;
    mpz_class decrypted = keys.priv.decrypt(pk, c);
    if (decrypted != plaintext) {
        throw ProtocolError("ciphertext does not decrypt to the claimed plaintext");
    }
    // c = (1 + m*Kp) * r^Kp, so r = (c * (1 + m*Kp)^-1)^(Kp^-1 mod Ks) mod Kp.
    mpz_class shifted = 1 + plaintext * pk.modulus();
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), shifted.get_mpz_t(),
                   pk.modulus_squared().get_mpz_t()) == 0) {
        throw ProtocolError("plaintext term not invertible");
    }
    mpz_class u = c.value() * inv % pk.modulus_squared();
    mpz_class exp;
    if (mpz_invert(exp.get_mpz_t(), pk.modulus().get_mpz_t(), keys.priv.ks().get_mpz_t()) == 0) {
        throw ProtocolError("gcd(Kp, Ks) != 1");
    }
    u %= pk.modulus();
    mpz_class r = internal::powmod(u, exp, pk.modulus());
    Randomizer out(std::move(r), pk.modulus());
    if (!(pk.encrypt(plaintext, out) == c)) {
        throw ProtocolError("recovered randomizer does not reproduce the ciphertext");
    }
    return out;
}

std::pair<Randomizer, Randomizer> recover_share_randomizers(const PaillierKeyPair& keys,
                                                            const DelegatorShareMessage& msg,
                                                            const mpz_class& seed,
                                                            const mpz_class& increment) {
    return {recover_randomizer(keys, msg.enc_seed, seed),
            recover_randomizer(keys, msg.enc_increment, increment)};
}

namespace {

ShareRun execute_share(Delegator& alice, OutsourcedData outsourced, double outsource_seconds,
                       const PaillierPublicKey& delegator_pk,
                       const PaillierPublicKey& delegate_pk, const ShareAgreement& agreement,
                       Rng& rng, const SimulationOptions& opts) {
    const std::size_t n = outsourced.size();
    const unsigned bit_depth = outsourced.bit_depth;

    Proxy proxy(delegator_pk);
    Delegate bob(delegate_pk);
    proxy.store(std::move(outsourced));

    ProtocolTranscript transcript;
    auto snap = [&] {
        return CounterSnapshot{alice.counters(), proxy.counters(), bob.counters()};
    };

    PhaseTimings timings;
    timings.outsource_s = outsource_seconds;
    transcript.log_phase(Role::delegator, "outsource", snap());

    const std::uint64_t before_initiate = alice.counters().encryptions;
    auto t = Clock::now();
    DelegatorShareMessage msg = alice.initiate_share(agreement);
    timings.initiate_s = seconds_since(t);
    transcript.log_message(
        Role::delegator, Role::proxy, "share_message", "delegator_share_message",
        share_message_payload_bytes(delegator_pk.bit_length(), msg.multiplier), snap());
    const std::uint64_t share_seq = transcript.records().back().seq;

    t = Clock::now();
    std::vector<Ciphertext> noise = proxy.generate_noise(msg, n);
    timings.noise_s = seconds_since(t);
    transcript.log_phase(Role::proxy, "noise_generation", snap());

    t = Clock::now();
    std::vector<mpz_class> diffs = proxy.compute_differences(noise, opts.exec);
    timings.differences_s = seconds_since(t);
    transcript.log_phase(Role::proxy, "difference_computation", snap());

    t = Clock::now();
    DelegateRefreshMessage refresh =
        bob.prepare_refresh(agreement, n, bit_depth, delegator_pk, rng, opts.exec);
    timings.refresh_s = seconds_since(t);
    transcript.log_message(
        Role::delegate, Role::proxy, "refresh_message", "delegate_refresh_message",
        refresh_message_payload_bytes(n, delegator_pk.bit_length(), delegate_pk.bit_length()),
        snap());

    t = Clock::now();
    ReEncryptedData result = proxy.refresh_and_reencrypt(diffs, refresh, delegate_pk, rng, opts.exec);
    timings.reencrypt_s = seconds_since(t);
    transcript.log_phase(Role::proxy, "noise_refresh_reencrypt", snap());

    transcript.log_message(Role::proxy, Role::delegate, "result_notification",
                           "reencrypted_data",
                           result_payload_bytes(n, delegate_pk.bit_length()), snap());

    if (transcript.messages_sent_after(Role::delegator, share_seq) != 0) {
        throw ProtocolError("delegator sent a message after the share message");
    }

    ShareCounterSummary summary;
    summary.delegator_share_encryptions = alice.counters().encryptions - before_initiate;
    summary.proxy_secure_steps = proxy.counters().secure_lcg_steps;
    summary.proxy_differences = proxy.counters().differences;
    summary.proxy_encryptions = proxy.counters().encryptions;
    summary.proxy_ciphertext_inversions = proxy.counters().ciphertext_inversions;
    summary.delegate_encryptions = bob.counters().encryptions;

    ShareRun run{proxy.stored(), std::move(result), std::move(transcript), summary, timings};
    return run;
}

}  // namespace

ShareRun run_share_simulation(const DataVector& data, const PaillierPublicKey& delegator_pk,
                              const PaillierPublicKey& delegate_pk,
                              const ShareAgreement& agreement, Rng& rng,
                              const SimulationOptions& opts) {
    if (agreement.delegator_key != delegator_pk.fingerprint() ||
        agreement.delegate_key != delegate_pk.fingerprint()) {
        throw KeyMismatchError("agreement does not match the supplied keys");
    }
    Delegator alice(delegator_pk);
    Randomizer r0 = sample_randomizer(delegator_pk, rng);
    Randomizer rc = sample_randomizer(delegator_pk, rng);

    auto t = Clock::now();
    OutsourcedData outsourced = alice.outsource(data, r0, rc, agreement.multiplier, opts.exec);
    double outsource_seconds = seconds_since(t);

    return execute_share(alice, std::move(outsourced), outsource_seconds, delegator_pk,
                         delegate_pk, agreement, rng, opts);
}

ShareRun run_share_from_outsourced(OutsourcedData data, const RetainedSecrets& secrets,
                                   const PaillierPublicKey& delegator_pk,
                                   const PaillierPublicKey& delegate_pk,
                                   const ShareAgreement& agreement, Rng& rng,
                                   const SimulationOptions& opts) {
    if (agreement.delegator_key != delegator_pk.fingerprint() ||
        agreement.delegate_key != delegate_pk.fingerprint()) {
        throw KeyMismatchError("agreement does not match the supplied keys");
    }
    Delegator alice(delegator_pk, secrets);
    return execute_share(alice, std::move(data), 0.0, delegator_pk, delegate_pk, agreement,
                         rng, opts);
}

}  // namespace hpre
