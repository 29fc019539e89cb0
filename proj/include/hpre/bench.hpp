#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>

#include "hpre/protocol.hpp"

namespace hpre {

struct BenchConfig {
    std::uint32_t width = 92;
    std::uint32_t height = 122;
    unsigned key_bits = 1024;
    unsigned trials = 1;
    ExecMode exec = ExecMode::serial;  // serial keeps role times comparable
    bool test_mode = false;
    std::uint64_t seed = 0;  // 0: system entropy
    // Chain/LCG multiplier; when unset a multiplier of key size is sampled so
    // every secure LCG step costs a full-size exponentiation.
    std::optional<mpz_class> multiplier;
};

struct BenchTrial {
    PhaseTimings timings;
    ShareCounterSummary counters;
};

struct BenchReport {
    BenchConfig config;
    std::size_t pixel_count = 0;
    unsigned multiplier_bits = 0;
    double keygen_s = 0;
    std::vector<BenchTrial> trials;
    // medians across trials
    double outsource_s = 0;
    double delegator_share_s = 0;
    double proxy_s = 0;
    double delegate_s = 0;
    double total_s = 0;  // wall time of the whole benchmark run
    std::uint64_t share_message_bytes = 0;
    std::uint64_t outsourced_payload_bits = 0;  // N * 2 * key_bits
    std::uint64_t refresh_message_bytes = 0;
    bool verified = false;  // sampled pixels decrypt to the input

    nlohmann::json to_json() const;
};

// Full share of a synthetic random image, timed per role.
BenchReport run_benchmark(const BenchConfig& config);

}  // namespace hpre
