#include "hpre/bench.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>

#include "hpre/errors.hpp"
#include "hpre/serialize.hpp"

namespace hpre {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
}

}  // namespace

nlohmann::json BenchReport::to_json() const {
    nlohmann::json trials_json = nlohmann::json::array();
    for (const BenchTrial& t : trials) {
        trials_json.push_back({
            {"outsource_s", t.timings.outsource_s},
            {"delegator_share_s", t.timings.delegator_share_s()},
            {"proxy_noise_s", t.timings.noise_s},
            {"proxy_differences_s", t.timings.differences_s},
            {"proxy_reencrypt_s", t.timings.reencrypt_s},
            {"proxy_s", t.timings.proxy_s()},
            {"delegate_s", t.timings.delegate_s()},
        });
    }
    return {
        {"width", config.width},
        {"height", config.height},
        {"pixels", pixel_count},
        {"key_bits", config.key_bits},
        {"multiplier_bits", multiplier_bits},
        {"exec", config.exec == ExecMode::serial ? "serial" : "parallel"},
        {"trials", trials_json},
        {"keygen_s", keygen_s},
        {"outsource_s", outsource_s},
        {"delegator_share_s", delegator_share_s},
        {"proxy_s", proxy_s},
        {"delegate_s", delegate_s},
        {"proxy_delegate_ratio", delegate_s > 0 ? proxy_s / delegate_s : 0.0},
        {"total_s", total_s},
        {"share_message_bytes", share_message_bytes},
        {"outsourced_payload_bits", outsourced_payload_bits},
        {"refresh_message_bytes", refresh_message_bytes},
        {"counters",
         trials.empty() ? nlohmann::json{}
                        : nlohmann::json{
                              {"delegator_share_encryptions",
                               trials.front().counters.delegator_share_encryptions},
                              {"proxy_secure_steps", trials.front().counters.proxy_secure_steps},
                              {"proxy_differences", trials.front().counters.proxy_differences},
                              {"proxy_encryptions", trials.front().counters.proxy_encryptions},
                              {"proxy_ciphertext_inversions",
                               trials.front().counters.proxy_ciphertext_inversions},
                              {"delegate_encryptions",
                               trials.front().counters.delegate_encryptions}}},
        {"verified", verified},
    };
}

BenchReport run_benchmark(const BenchConfig& config) {
    if (config.trials == 0) {
        throw ProtocolError("benchmark needs at least one trial");
    }
    const auto bench_start = Clock::now();
    Rng rng = config.seed ? Rng(config.seed) : Rng();

    BenchReport report;
    report.config = config;
    report.pixel_count = static_cast<std::size_t>(config.width) * config.height;

    auto t = Clock::now();
    PaillierKeyPair delegator_keys = keygen(config.key_bits, rng, config.test_mode);
    PaillierKeyPair delegate_keys = keygen(config.key_bits, rng, config.test_mode);
    report.keygen_s = seconds_since(t);

    mpz_class multiplier;
    if (config.multiplier) {
        multiplier = *config.multiplier;
    } else {
        do {
            multiplier = rng.below(delegator_keys.pub.modulus());
        } while (multiplier < 1);
    }
    report.multiplier_bits = static_cast<unsigned>(mpz_sizeinbase(multiplier.get_mpz_t(), 2));

    std::vector<std::uint64_t> pixels(report.pixel_count);
    for (auto& p : pixels) {
        p = rng.u64() & 0xff;
    }
    const DataVector image =
        DataVector::image(std::move(pixels), 8, config.width, config.height);

    std::vector<double> outsource_times, share_times, proxy_times, delegate_times;
    for (unsigned trial = 0; trial < config.trials; ++trial) {
        ShareAgreement agreement =
            random_share_agreement(delegator_keys.pub, delegate_keys.pub, multiplier, rng);
        SimulationOptions opts;
        opts.exec = config.exec;
        ShareRun run =
            run_share_simulation(image, delegator_keys.pub, delegate_keys.pub, agreement, rng, opts);

        outsource_times.push_back(run.timings.outsource_s);
        share_times.push_back(run.timings.delegator_share_s());
        proxy_times.push_back(run.timings.proxy_s());
        delegate_times.push_back(run.timings.delegate_s());
        report.trials.push_back(BenchTrial{run.timings, run.counters});

        if (trial == 0) {
            report.share_message_bytes =
                share_message_payload_bytes(delegator_keys.pub.bit_length(), multiplier);
            report.outsourced_payload_bits =
                static_cast<std::uint64_t>(run.outsourced.size()) * 8 *
                ciphertext_wire_bytes(delegator_keys.pub.bit_length());
            report.refresh_message_bytes = refresh_message_payload_bytes(
                run.outsourced.size(), delegator_keys.pub.bit_length(),
                delegate_keys.pub.bit_length());

            // Spot-check after the timers: a sample of pixels must decrypt
            // to the input exactly.
            report.verified = true;
            const std::size_t samples = std::min<std::size_t>(16, run.result.size());
            for (std::size_t s = 0; s < samples; ++s) {
                const std::size_t i = (s * 2654435761u) % run.result.size();
                mpz_class m = delegate_keys.decrypt(run.result.cts[i]);
                if (m != image.values[i]) {
                    report.verified = false;
                }
            }
        }
    }

    report.outsource_s = median(outsource_times);
    report.delegator_share_s = median(share_times);
    report.proxy_s = median(proxy_times);
    report.delegate_s = median(delegate_times);
    report.total_s = seconds_since(bench_start);
    return report;
}

}  // namespace hpre
