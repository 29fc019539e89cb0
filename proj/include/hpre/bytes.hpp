#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hpre {

// Minimal big-endian magnitude of a non-negative integer (empty for zero).
std::vector<std::uint8_t> mpz_bytes_be(const mpz_class& value);

mpz_class mpz_from_bytes_be(std::span<const std::uint8_t> bytes);

// Left-padded big-endian encoding into exactly `width` bytes.
// Throws if the value does not fit.
void mpz_to_fixed_be(const mpz_class& value, std::uint8_t* out, std::size_t width);

}  // namespace hpre
