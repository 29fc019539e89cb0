#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hpre/errors.hpp"
#include "hpre/protocol.hpp"
#include "hpre/proxy.hpp"
#include "hpre/serialize.hpp"
#include "oracles.hpp"

using namespace hpre;

namespace {

// 16-bit test keys: 42173 = 181*233 and 59989 = 239*251.
PaillierKeyPair delegator_keys() { return keypair_from_primes(181, 233); }
PaillierKeyPair delegate_keys() { return keypair_from_primes(239, 251); }

DataVector small_image() {
    return DataVector::image({0, 1, 2, 3}, 8, 2, 2);
}

}  // namespace

TEST_CASE("DataVector validation") {
    CHECK_THROWS_AS(DataVector::image({0, 1, 2}, 8, 2, 2), ProtocolError);
    CHECK_THROWS_AS(DataVector::image({256}, 8, 1, 1), ProtocolError);
    CHECK_THROWS_AS(DataVector::image({0}, 65, 1, 1), ProtocolError);
    DataVector v = DataVector::flat({7, 9}, 4);
    CHECK(v.width == 2);
    CHECK(v.height == 1);
}

TEST_CASE("outsourcing encrypts with the chained randomizers") {
    PaillierKeyPair k1 = delegator_keys();
    const mpz_class kp = k1.pub.modulus();
    Delegator alice(k1.pub);
    Randomizer r0(101, kp), rc(217, kp);
    const mpz_class a = 16807;

    DataVector data = small_image();
    OutsourcedData out = alice.outsource(data, r0, rc, a, ExecMode::serial);
    REQUIRE(out.size() == 4);
    CHECK(out.key == k1.pub.fingerprint());
    CHECK(out.bit_depth == 8);

    SUBCASE("decryptions restore the pixels") {
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(k1.decrypt(out.cts[i]) == data.values[i]);
        }
    }
    SUBCASE("every ciphertext is reproducible from (r0, rc, a)") {
        auto rs = oracle::randomizer_chain(r0.value(), rc.value(), a, kp, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(out.cts[i] == k1.pub.encrypt(data.values[i], Randomizer(rs[i], kp)));
        }
    }
    SUBCASE("retained secrets are exactly (r0, rc, a)") {
        CHECK(alice.secrets().r0 == r0);
        CHECK(alice.secrets().rc == rc);
        CHECK(alice.secrets().multiplier == a);
    }
    SUBCASE("a second outsource on the same instance is rejected") {
        CHECK_THROWS_AS(alice.outsource(data, r0, rc, a), ProtocolError);
    }
    SUBCASE("outsource counters") {
        CHECK(alice.counters().encryptions == 4);
    }
}

TEST_CASE("single-value outsourcing has no chain steps") {
    PaillierKeyPair k1 = delegator_keys();
    Delegator alice(k1.pub);
    Randomizer r0(77, k1.pub.modulus()), rc(91, k1.pub.modulus());
    OutsourcedData out =
        alice.outsource(DataVector::flat({200}, 8), r0, rc, 16807, ExecMode::serial);
    REQUIRE(out.size() == 1);
    CHECK(out.cts[0] == k1.pub.encrypt(200, r0));
}

TEST_CASE("initiate_share") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    Delegator alice(k1.pub);
    Randomizer r0(101, k1.pub.modulus()), rc(217, k1.pub.modulus());
    alice.outsource(small_image(), r0, rc, 16807, ExecMode::serial);

    ShareAgreement agreement = make_share_agreement(k1.pub, k2.pub, 1234, 987, 16807);
    DelegatorShareMessage msg = alice.initiate_share(agreement);

    CHECK(k1.decrypt(msg.enc_seed) == 1234);
    CHECK(k1.decrypt(msg.enc_increment) == 987);
    CHECK(msg.enc_seed == k1.pub.encrypt(1234, r0));        // same r0 as pixel 0
    CHECK(msg.enc_increment == k1.pub.encrypt(987, rc));
    CHECK(msg.multiplier == 16807);

    SUBCASE("share message payload is two fixed-width ciphertexts plus the multiplier") {
        std::uint64_t bytes = share_message_payload_bytes(k1.pub.bit_length(), msg.multiplier);
        CHECK(bytes == 2 * ciphertext_wire_bytes(16) + length_prefixed_bytes(msg.multiplier));
    }
    SUBCASE("a different agreement on the same file is rejected") {
        ShareAgreement other = make_share_agreement(k1.pub, k2.pub, 4321, 987, 16807);
        CHECK_THROWS_AS(alice.initiate_share(other), ProtocolError);
        CHECK_NOTHROW(alice.initiate_share(agreement));  // idempotent re-send is fine
    }
    SUBCASE("multiplier must match the outsourcing chain") {
        Delegator fresh(k1.pub);
        Randomizer fr0(11, k1.pub.modulus()), frc(13, k1.pub.modulus());
        fresh.outsource(small_image(), fr0, frc, 16807, ExecMode::serial);
        ShareAgreement other = make_share_agreement(k1.pub, k2.pub, 1, 2, 3);
        CHECK_THROWS_AS(fresh.initiate_share(other), ProtocolError);
    }
    SUBCASE("initiating without retained secrets fails") {
        Delegator fresh(k1.pub);
        CHECK_THROWS_AS(fresh.initiate_share(agreement), ProtocolError);
    }
}

TEST_CASE("randomizer recovery from the private key and known plaintext") {
    PaillierKeyPair keys = keypair_from_primes(5, 7);
    const mpz_class kp = keys.pub.modulus();

    SUBCASE("identity randomizer") {
        Ciphertext c = keys.pub.encrypt(0, Randomizer(1, kp));
        CHECK(recover_randomizer(keys, c, 0).value() == 1);
    }
    SUBCASE("frozen example: E[5, 2] over Kp=35") {
        Ciphertext c = keys.pub.encrypt(5, Randomizer(2, kp));
        CHECK(recover_randomizer(keys, c, 5).value() == 2);
    }
    SUBCASE("exhaustive over Z*_35") {
        for (unsigned long r = 1; r < 35; ++r) {
            if (std::gcd(r, 35ul) != 1) {
                continue;
            }
            Ciphertext c = keys.pub.encrypt(17, Randomizer(r, kp));
            CHECK(recover_randomizer(keys, c, 17).value() == r);
        }
    }
    SUBCASE("wrong claimed plaintext is rejected") {
        Ciphertext c = keys.pub.encrypt(5, Randomizer(2, kp));
        CHECK_THROWS_AS(recover_randomizer(keys, c, 6), ProtocolError);
    }
    SUBCASE("recovery of both share randomizers") {
        PaillierKeyPair k1 = delegator_keys();
        Delegator alice(k1.pub);
        Randomizer r0(150, k1.pub.modulus()), rc(260, k1.pub.modulus());
        alice.outsource(small_image(), r0, rc, 16807, ExecMode::serial);
        ShareAgreement agreement =
            make_share_agreement(k1.pub, delegate_keys().pub, 500, 600, 16807);
        DelegatorShareMessage msg = alice.initiate_share(agreement);
        auto [rec0, recc] = recover_share_randomizers(k1, msg, 500, 600);
        CHECK(rec0 == r0);
        CHECK(recc == rc);
    }
}

TEST_CASE("randomizer recovery at 1024 bits, 100 trials") {
    Rng rng(51);
    PaillierKeyPair keys = keygen(1024, rng);
    for (int i = 0; i < 100; ++i) {
        mpz_class m = rng.below(keys.pub.modulus());
        Randomizer r = sample_randomizer(keys.pub, rng);
        Ciphertext c = keys.pub.encrypt(m, r);
        CHECK(recover_randomizer(keys, c, m) == r);
    }
}

TEST_CASE("proxy noise generation") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    const mpz_class kp = k1.pub.modulus();
    Delegator alice(k1.pub);
    Randomizer r0(101, kp), rc(217, kp);
    OutsourcedData data = alice.outsource(small_image(), r0, rc, 16807, ExecMode::serial);

    ShareAgreement agreement = make_share_agreement(k1.pub, k2.pub, 1234, 987, 16807);
    DelegatorShareMessage msg = alice.initiate_share(agreement);

    Proxy proxy(k1.pub);
    proxy.store(std::move(data));
    auto noise = proxy.generate_noise(msg, 4);
    REQUIRE(noise.size() == 4);

    CHECK(noise[0] == msg.enc_seed);  // term 0 unchanged
    auto xs = oracle::lcg_sequence(16807, 987, kp, 1234, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(k1.decrypt(noise[i]) == xs[i]);
    }
    CHECK(proxy.counters().secure_lcg_steps == 3);
    CHECK_THROWS_AS(proxy.generate_noise(msg, 5), ProtocolError);
}

TEST_CASE("proxy differences match the clear-domain oracle") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    const mpz_class kp = k1.pub.modulus();
    Delegator alice(k1.pub);
    Randomizer r0(101, kp), rc(217, kp);
    DataVector image = small_image();
    OutsourcedData data = alice.outsource(image, r0, rc, 16807, ExecMode::serial);

    ShareAgreement agreement = make_share_agreement(k1.pub, k2.pub, 1234, 987, 16807);
    DelegatorShareMessage msg = alice.initiate_share(agreement);

    Proxy proxy(k1.pub);
    proxy.store(std::move(data));
    auto noise = proxy.generate_noise(msg, 4);
    auto diffs = proxy.compute_differences(noise, ExecMode::serial);

    auto xs = oracle::lcg_sequence(16807, 987, kp, 1234, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        mpz_class expected = (xs[i] - image.values[i] + kp) % kp;
        CHECK(diffs[i] == expected);
    }
    CHECK(proxy.counters().differences == 4);
}

TEST_CASE("differences of identical values are zero") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    Delegator alice(k1.pub);
    Randomizer r0(101, k1.pub.modulus()), rc(217, k1.pub.modulus());
    // pixels equal to the LCG terms themselves: X_i - I_i = 0
    const mpz_class seed = 9, incr = 3, a = 2;
    auto xs = oracle::lcg_sequence(a, incr, k1.pub.modulus(), seed, 4);
    std::vector<std::uint64_t> vals;
    for (const auto& x : xs) vals.push_back(x.get_ui());
    OutsourcedData data =
        alice.outsource(DataVector::flat(vals, 16), r0, rc, a, ExecMode::serial);
    ShareAgreement agreement = make_share_agreement(k1.pub, k2.pub, seed, incr, a);
    DelegatorShareMessage msg = alice.initiate_share(agreement);
    Proxy proxy(k1.pub);
    proxy.store(std::move(data));
    auto diffs = proxy.compute_differences(proxy.generate_noise(msg, 4), ExecMode::serial);
    for (const auto& d : diffs) {
        CHECK(d == 0);
    }
}

TEST_CASE("delegate refresh message") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    Rng rng(52);
    ShareAgreement agreement = make_share_agreement(k1.pub, k2.pub, 1234, 987, 16807);
    Delegate bob(k2);

    const std::size_t n = 16;
    DelegateRefreshMessage msg =
        bob.prepare_refresh(agreement, n, 8, k1.pub, rng, ExecMode::serial);
    REQUIRE(msg.enc_betas.size() == n);
    REQUIRE(msg.alphas.size() == n);

    const mpz_class smaller =
        k1.pub.modulus() < k2.pub.modulus() ? k1.pub.modulus() : k2.pub.modulus();
    auto xs = oracle::lcg_sequence(16807, 987, k1.pub.modulus(), 1234, n);
    for (std::size_t i = 0; i < n; ++i) {
        mpz_class beta = k2.decrypt(msg.enc_betas[i]);
        CHECK(beta > 255);        // 2^8 - 1 < beta
        CHECK(beta < smaller);    // beta < min(Kp1, Kp2)
        CHECK((msg.alphas[i] + xs[i]) % k1.pub.modulus() == beta % k1.pub.modulus());
        CHECK(msg.alphas[i] >= 0);
        CHECK(msg.alphas[i] < k1.pub.modulus());
    }
    CHECK(bob.counters().encryptions == n);

    SUBCASE("no beta window when min(Kp1, Kp2) <= 2^b") {
        PaillierKeyPair tiny = keypair_from_primes(13, 17);  // Kp = 221 < 256
        ShareAgreement bad = make_share_agreement(tiny.pub, k2.pub, 7, 9, 16807);
        CHECK_THROWS_AS(bob.prepare_refresh(bad, 4, 8, tiny.pub, rng, ExecMode::serial),
                        ProtocolError);
    }
    SUBCASE("agreement must name this delegate") {
        ShareAgreement foreign = make_share_agreement(k1.pub, k1.pub, 1, 2, 3);
        CHECK_THROWS_AS(bob.prepare_refresh(foreign, 4, 8, k1.pub, rng, ExecMode::serial),
                        KeyMismatchError);
    }
}

TEST_CASE("full pipeline: 2x2 image with 16-bit test keys") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    Rng rng(53);
    DataVector image = small_image();
    ShareAgreement agreement = random_share_agreement(k1.pub, k2.pub, 16807, rng);

    ShareRun run = run_share_simulation(image, k1.pub, k2.pub, agreement, rng,
                                        SimulationOptions{ExecMode::serial});

    SUBCASE("the delegate decrypts the original image exactly") {
        Delegate bob(k2);
        DataVector out = bob.decrypt_result(run.result, ExecMode::serial);
        CHECK(out == image);
    }
    SUBCASE("exactly three inter-party messages") {
        CHECK(run.transcript.message_count() == 3);
    }
    SUBCASE("delegator is silent after the share message") {
        std::uint64_t share_seq = 0;
        for (const auto& rec : run.transcript.records()) {
            if (rec.kind == RecordKind::message && rec.sender == Role::delegator) {
                share_seq = rec.seq;
                break;
            }
        }
        REQUIRE(share_seq > 0);
        CHECK(run.transcript.messages_sent_after(Role::delegator, share_seq) == 0);
    }
    SUBCASE("counter laws for N = 4") {
        CHECK(run.counters.delegator_share_encryptions == 2);
        CHECK(run.counters.proxy_secure_steps == 3);
        CHECK(run.counters.proxy_differences == 4);
        CHECK(run.counters.proxy_encryptions == 4);
        CHECK(run.counters.proxy_ciphertext_inversions == 4);
        CHECK(run.counters.delegate_encryptions == 4);
    }
    SUBCASE("counters in the transcript only increase") {
        auto leq = [](const RoleCounters& a, const RoleCounters& b) {
            return a.encryptions <= b.encryptions && a.decryptions <= b.decryptions &&
                   a.homomorphic_mults <= b.homomorphic_mults &&
                   a.ciphertext_inversions <= b.ciphertext_inversions &&
                   a.modular_exponentiations <= b.modular_exponentiations &&
                   a.clear_additions <= b.clear_additions &&
                   a.secure_lcg_steps <= b.secure_lcg_steps &&
                   a.differences <= b.differences;
        };
        const auto& recs = run.transcript.records();
        for (std::size_t i = 1; i < recs.size(); ++i) {
            CHECK(leq(recs[i - 1].counters.delegator, recs[i].counters.delegator));
            CHECK(leq(recs[i - 1].counters.proxy, recs[i].counters.proxy));
            CHECK(leq(recs[i - 1].counters.delegate, recs[i].counters.delegate));
        }
    }
    SUBCASE("transcript serializes to parseable JSON lines") {
        std::ostringstream out;
        run.transcript.write_jsonl(out);
        std::istringstream in(out.str());
        std::string line;
        std::size_t lines = 0;
        while (std::getline(in, line)) {
            nlohmann::json rec = nlohmann::json::parse(line);
            CHECK(rec.contains("seq"));
            CHECK(rec.contains("phase"));
            CHECK(rec.contains("counters"));
            ++lines;
        }
        CHECK(lines == run.transcript.records().size());
        CHECK(lines >= 6);
    }
}

TEST_CASE("full pipeline restores every 8-bit value exhaustively") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    Rng rng(54);
    std::vector<std::uint64_t> all(256);
    for (std::size_t i = 0; i < 256; ++i) all[i] = i;
    DataVector image = DataVector::image(std::move(all), 8, 16, 16);
    ShareAgreement agreement = random_share_agreement(k1.pub, k2.pub, 16807, rng);

    ShareRun run = run_share_simulation(image, k1.pub, k2.pub, agreement, rng);
    Delegate bob(k2);
    CHECK(bob.decrypt_result(run.result) == image);
    CHECK(k2.decrypt(run.result.cts[0]) == 0);  // zero pixel stays zero
}

TEST_CASE("share from previously outsourced data matches the direct pipeline") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    Rng rng(55);
    DataVector image = small_image();

    Delegator alice(k1.pub);
    Randomizer r0 = sample_randomizer(k1.pub, rng);
    Randomizer rc = sample_randomizer(k1.pub, rng);
    OutsourcedData data = alice.outsource(image, r0, rc, 16807, ExecMode::serial);
    RetainedSecrets secrets = alice.secrets();

    ShareAgreement agreement = random_share_agreement(k1.pub, k2.pub, 16807, rng);
    ShareRun run = run_share_from_outsourced(std::move(data), secrets, k1.pub, k2.pub,
                                             agreement, rng);
    Delegate bob(k2);
    CHECK(bob.decrypt_result(run.result) == image);
    CHECK(run.counters.delegator_share_encryptions == 2);
}

TEST_CASE("mismatched agreement keys are rejected up front") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    Rng rng(56);
    ShareAgreement agreement = random_share_agreement(k2.pub, k1.pub, 16807, rng);
    CHECK_THROWS_AS(
        run_share_simulation(small_image(), k1.pub, k2.pub, agreement, rng),
        KeyMismatchError);
}

TEST_CASE("proxy rejects data under a foreign key") {
    PaillierKeyPair k1 = delegator_keys();
    PaillierKeyPair k2 = delegate_keys();
    Delegator alice(k2.pub);
    Randomizer r0(5001, k2.pub.modulus()), rc(7002, k2.pub.modulus());
    OutsourcedData data = alice.outsource(small_image(), r0, rc, 16807, ExecMode::serial);
    Proxy proxy(k1.pub);
    CHECK_THROWS_AS(proxy.store(std::move(data)), KeyMismatchError);
}

TEST_CASE("decrypt_result flags plaintexts exceeding the bit depth") {
    PaillierKeyPair k2 = delegate_keys();
    Rng rng(57);
    ReEncryptedData bogus;
    bogus.bit_depth = 8;
    bogus.width = 1;
    bogus.height = 1;
    bogus.key = k2.pub.fingerprint();
    bogus.cts.push_back(k2.pub.encrypt(300, sample_randomizer(k2.pub, rng)));
    Delegate bob(k2);
    CHECK_THROWS_AS(bob.decrypt_result(bogus), ProtocolError);
}
