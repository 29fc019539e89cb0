// Command-line front end: key generation, image outsourcing, sharing
// (proxy re-encryption), decryption and the benchmark harness.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "hpre/bench.hpp"
#include "hpre/errors.hpp"
#include "hpre/pgm.hpp"
#include "hpre/protocol.hpp"
#include "hpre/serialize.hpp"

namespace {

constexpr int kExitIo = 2;
constexpr int kExitKeyMismatch = 3;
constexpr int kExitProtocol = 4;
constexpr int kExitPolicy = 5;

hpre::Rng make_rng(const std::string& seed_material) {
    if (seed_material.empty()) {
        return hpre::Rng();
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_Digest(seed_material.data(), seed_material.size(), digest, &len, EVP_sha256(), nullptr);
    std::uint64_t seed = 0;
    for (int i = 0; i < 8; ++i) {
        seed = (seed << 8) | digest[i];
    }
    return hpre::Rng(seed);
}

hpre::ExecMode exec_mode(bool serial) {
    return serial ? hpre::ExecMode::serial : hpre::ExecMode::parallel;
}

hpre::CiphertextBlob to_blob(const hpre::OutsourcedData& data, unsigned key_bits) {
    hpre::CiphertextBlob blob;
    blob.key = data.key;
    blob.key_bits = key_bits;
    blob.bit_depth = data.bit_depth;
    blob.width = data.width;
    blob.height = data.height;
    blob.cts = data.cts;
    return blob;
}

hpre::CiphertextBlob to_blob(const hpre::ReEncryptedData& data, unsigned key_bits) {
    hpre::CiphertextBlob blob;
    blob.key = data.key;
    blob.key_bits = key_bits;
    blob.bit_depth = data.bit_depth;
    blob.width = data.width;
    blob.height = data.height;
    blob.cts = data.cts;
    return blob;
}

int run(int argc, char** argv) {
    CLI::App app{"Paillier-based homomorphic proxy re-encryption toolkit"};
    app.require_subcommand(1);

    // keygen
    auto* keygen_cmd = app.add_subcommand("keygen", "generate a Paillier key pair");
    unsigned kg_bits = 1024;
    std::string kg_public, kg_private;
    bool kg_test_mode = false;
    keygen_cmd->add_option("--bits", kg_bits, "modulus size in bits")->capture_default_str();
    keygen_cmd->add_option("--out-public", kg_public, "public key output path")->required();
    keygen_cmd->add_option("--out-private", kg_private, "private key output path")->required();
    keygen_cmd->add_flag("--test-mode", kg_test_mode, "allow tiny keys (>= 8 bits)")
        ->envname("HPRE_TEST_MODE");

    // encrypt
    auto* encrypt_cmd =
        app.add_subcommand("encrypt", "outsource a PGM image under a public key");
    std::string enc_image, enc_public, enc_out, enc_secrets, enc_seed_material;
    std::string enc_multiplier = "16807";
    bool enc_serial = false;
    encrypt_cmd->add_option("--image", enc_image, "input PGM (binary P5, maxval 255)")
        ->required();
    encrypt_cmd->add_option("--public-key", enc_public, "delegator public key file")->required();
    encrypt_cmd->add_option("--out", enc_out, "encrypted blob output path")->required();
    encrypt_cmd->add_option("--secrets-out", enc_secrets, "retained secrets output path")
        ->required();
    encrypt_cmd->add_option("--seed-material", enc_seed_material,
                            "deterministic seed material for the randomizers");
    encrypt_cmd->add_option("--multiplier", enc_multiplier,
                            "randomizer chain multiplier (decimal)")
        ->capture_default_str();
    encrypt_cmd->add_flag("--serial", enc_serial, "disable the OpenMP kernels");

    // share
    auto* share_cmd = app.add_subcommand(
        "share", "re-encrypt an outsourced blob to a delegate key via the proxy");
    std::string sh_blob, sh_secrets, sh_pk1, sh_pk2, sh_agreement, sh_out, sh_transcript;
    bool sh_serial = false;
    share_cmd->add_option("--blob", sh_blob, "outsourced blob")->required();
    share_cmd->add_option("--delegator-secrets", sh_secrets, "retained secrets file")
        ->required();
    share_cmd->add_option("--delegator-public-key", sh_pk1, "delegator public key file")
        ->required();
    share_cmd->add_option("--delegate-public-key", sh_pk2, "delegate public key file")
        ->required();
    share_cmd->add_option("--agreement-file", sh_agreement, "share agreement file")->required();
    share_cmd->add_option("--out", sh_out, "re-encrypted blob output path")->required();
    share_cmd->add_option("--transcript-out", sh_transcript, "transcript log output path (JSONL)");
    share_cmd->add_flag("--serial", sh_serial, "disable the OpenMP kernels");

    // decrypt
    auto* decrypt_cmd = app.add_subcommand("decrypt", "decrypt a blob back to a PGM image");
    std::string dec_blob, dec_private, dec_out;
    bool dec_serial = false;
    decrypt_cmd->add_option("--blob", dec_blob, "encrypted blob")->required();
    decrypt_cmd->add_option("--private-key", dec_private, "private key file")->required();
    decrypt_cmd->add_option("--out", dec_out, "output PGM path")->required();
    decrypt_cmd->add_flag("--serial", dec_serial, "disable the OpenMP kernels");

    // bench
    auto* bench_cmd =
        app.add_subcommand("bench", "full-share benchmark on a synthetic random image");
    hpre::BenchConfig cfg;
    std::string bench_multiplier, bench_report;
    bool bench_parallel = false;
    bench_cmd->add_option("--width", cfg.width, "image width")->capture_default_str();
    bench_cmd->add_option("--height", cfg.height, "image height")->capture_default_str();
    bench_cmd->add_option("--bits", cfg.key_bits, "key size in bits")->capture_default_str();
    bench_cmd->add_option("--trials", cfg.trials, "number of share runs")->capture_default_str();
    bench_cmd->add_option("--seed", cfg.seed, "RNG seed (0: system entropy)");
    bench_cmd->add_option("--multiplier", bench_multiplier,
                          "LCG multiplier (decimal; default: random of key size)");
    bench_cmd->add_option("--report", bench_report, "write the JSON report to this path");
    bench_cmd->add_flag("--parallel", bench_parallel,
                        "use the OpenMP kernels (role times then mix thread counts)");
    bench_cmd->add_flag("--test-mode", cfg.test_mode, "allow tiny keys")
        ->envname("HPRE_TEST_MODE");

    CLI11_PARSE(app, argc, argv);

    if (keygen_cmd->parsed()) {
        hpre::Rng rng;
        hpre::PaillierKeyPair keys = hpre::keygen(kg_bits, rng, kg_test_mode);
        hpre::write_public_key(kg_public, keys.pub);
        hpre::write_private_key(kg_private, keys);
        std::cout << "fingerprint: " << hpre::fingerprint_hex(keys.pub.fingerprint()) << "\n"
                  << "public:  " << kg_public << "\n"
                  << "private: " << kg_private << "\n";
        return 0;
    }

    if (encrypt_cmd->parsed()) {
        hpre::DataVector image = hpre::read_pgm(enc_image);
        hpre::PaillierPublicKey pk = hpre::read_public_key(enc_public);
        mpz_class multiplier(enc_multiplier);
        hpre::Rng rng = make_rng(enc_seed_material);

        hpre::Delegator alice(pk);
        hpre::Randomizer r0 = hpre::sample_randomizer(pk, rng);
        hpre::Randomizer rc = hpre::sample_randomizer(pk, rng);
        hpre::OutsourcedData data =
            alice.outsource(image, r0, rc, multiplier, exec_mode(enc_serial));

        hpre::write_blob(enc_out, to_blob(data, pk.bit_length()));
        hpre::write_secrets(enc_secrets, alice.secrets(), pk.fingerprint());
        std::cout << "encrypted " << data.size() << " pixels under "
                  << hpre::fingerprint_hex(pk.fingerprint()) << "\n"
                  << "blob:    " << enc_out << " ("
                  << hpre::blob_file_bytes(data.size(), pk.bit_length()) << " bytes)\n"
                  << "secrets: " << enc_secrets << "\n";
        return 0;
    }

    if (share_cmd->parsed()) {
        hpre::PaillierPublicKey pk1 = hpre::read_public_key(sh_pk1);
        hpre::PaillierPublicKey pk2 = hpre::read_public_key(sh_pk2);
        hpre::CiphertextBlob blob = hpre::read_blob(sh_blob);
        if (blob.key != pk1.fingerprint()) {
            throw hpre::KeyMismatchError("blob is not under the delegator public key");
        }
        hpre::RetainedSecrets secrets = hpre::read_secrets(sh_secrets, pk1);
        hpre::ShareAgreement agreement = hpre::read_agreement(sh_agreement, pk1, pk2);

        hpre::OutsourcedData data;
        data.cts = std::move(blob.cts);
        data.bit_depth = blob.bit_depth;
        data.width = blob.width;
        data.height = blob.height;
        data.key = blob.key;

        hpre::Rng rng;
        hpre::SimulationOptions opts;
        opts.exec = exec_mode(sh_serial);
        hpre::ShareRun run = hpre::run_share_from_outsourced(std::move(data), secrets, pk1,
                                                             pk2, agreement, rng, opts);

        hpre::write_blob(sh_out, to_blob(run.result, pk2.bit_length()));
        if (!sh_transcript.empty()) {
            std::ofstream log(sh_transcript, std::ios::trunc);
            if (!log) {
                throw hpre::IoError("cannot open for writing: " + sh_transcript);
            }
            run.transcript.write_jsonl(log);
        }
        std::cout << "re-encrypted " << run.result.size() << " pixels to "
                  << hpre::fingerprint_hex(pk2.fingerprint()) << "\n"
                  << "messages: " << run.transcript.message_count()
                  << ", proxy bytes held: "
                  << hpre::result_payload_bytes(run.result.size(), pk2.bit_length()) << "\n"
                  << "out: " << sh_out << "\n";
        return 0;
    }

    if (decrypt_cmd->parsed()) {
        hpre::PaillierKeyPair keys = hpre::read_private_key(dec_private);
        hpre::CiphertextBlob blob = hpre::read_blob(dec_blob);
        if (blob.key != keys.pub.fingerprint()) {
            throw hpre::KeyMismatchError("blob is not under this private key");
        }
        hpre::ReEncryptedData data;
        data.cts = std::move(blob.cts);
        data.bit_depth = blob.bit_depth;
        data.width = blob.width;
        data.height = blob.height;
        data.key = blob.key;

        hpre::Delegate owner(keys);
        hpre::DataVector image = owner.decrypt_result(data, exec_mode(dec_serial));
        hpre::write_pgm(dec_out, image);
        std::cout << "decrypted " << image.size() << " pixels to " << dec_out << "\n";
        return 0;
    }

    if (bench_cmd->parsed()) {
        if (!bench_multiplier.empty()) {
            cfg.multiplier = mpz_class(bench_multiplier);
        }
        cfg.exec = bench_parallel ? hpre::ExecMode::parallel : hpre::ExecMode::serial;
        hpre::BenchReport report = hpre::run_benchmark(cfg);

        std::printf("pixels            %zu (%ux%u), %u-bit keys, %s\n", report.pixel_count,
                    cfg.width, cfg.height, cfg.key_bits,
                    cfg.exec == hpre::ExecMode::serial ? "serial" : "parallel");
        std::printf("keygen            %8.3f s\n", report.keygen_s);
        std::printf("outsource         %8.3f s\n", report.outsource_s);
        std::printf("delegator share   %8.3f s\n", report.delegator_share_s);
        std::printf("proxy             %8.3f s\n", report.proxy_s);
        std::printf("delegate          %8.3f s\n", report.delegate_s);
        if (report.delegate_s > 0) {
            std::printf("proxy/delegate    %8.2f\n", report.proxy_s / report.delegate_s);
        }
        const auto& c = report.trials.front().counters;
        std::printf("counters          proxy: %llu lcg steps, %llu diffs, %llu enc; "
                    "delegate: %llu enc; delegator share: %llu enc\n",
                    static_cast<unsigned long long>(c.proxy_secure_steps),
                    static_cast<unsigned long long>(c.proxy_differences),
                    static_cast<unsigned long long>(c.proxy_encryptions),
                    static_cast<unsigned long long>(c.delegate_encryptions),
                    static_cast<unsigned long long>(c.delegator_share_encryptions));
        std::printf("payload           %llu bits held by the proxy, share msg %llu bytes\n",
                    static_cast<unsigned long long>(report.outsourced_payload_bits),
                    static_cast<unsigned long long>(report.share_message_bytes));
        std::printf("verified          %s\n", report.verified ? "yes" : "NO");

        if (!bench_report.empty()) {
            std::ofstream out(bench_report, std::ios::trunc);
            if (!out) {
                throw hpre::IoError("cannot open for writing: " + bench_report);
            }
            out << report.to_json().dump(2) << "\n";
        }
        return report.verified ? 0 : kExitProtocol;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const hpre::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const hpre::KeyMismatchError& e) {
        std::cerr << "key mismatch: " << e.what() << "\n";
        return kExitKeyMismatch;
    } catch (const hpre::PolicyError& e) {
        std::cerr << "policy error: " << e.what() << "\n";
        return kExitPolicy;
    } catch (const hpre::ProtocolError& e) {
        std::cerr << "protocol error: " << e.what() << "\n";
        return kExitProtocol;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
