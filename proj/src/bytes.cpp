#include "hpre/bytes.hpp"

#include <cstring>

#include "hpre/errors.hpp"

namespace hpre {

std::vector<std::uint8_t> mpz_bytes_be(const mpz_class& value) {
    if (value < 0) {
        throw Error("cannot serialize negative integer");
    }
    if (value == 0) {
        return {};
    }
    std::size_t count = 0;
    std::vector<std::uint8_t> out((mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8);
    mpz_export(out.data(), &count, 1, 1, 0, 0, value.get_mpz_t());
    out.resize(count);
    return out;
}

mpz_class mpz_from_bytes_be(std::span<const std::uint8_t> bytes) {
    mpz_class out = 0;
    if (!bytes.empty()) {
        mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 0, 0, bytes.data());
    }
    return out;
}

void mpz_to_fixed_be(const mpz_class& value, std::uint8_t* out, std::size_t width) {
    std::vector<std::uint8_t> bytes = mpz_bytes_be(value);
    if (bytes.size() > width) {
        throw Error("integer does not fit the fixed-width field");
    }
    std::memset(out, 0, width);
    std::memcpy(out + (width - bytes.size()), bytes.data(), bytes.size());
}

}  // namespace hpre
