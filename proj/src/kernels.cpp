#include "hpre/kernels.hpp"

#include <atomic>
#include <exception>
#include <utility>

#include "hpre/enc_diff.hpp"
#include "hpre/errors.hpp"

namespace hpre {

namespace {

template <typename Fn>
void for_each_index(std::size_t n, ExecMode mode, Fn&& fn) {
    if (mode == ExecMode::serial) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    // Exceptions must not escape the parallel region; the first one is
    // captured and rethrown after the loop.
    std::atomic<bool> failed{false};
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        if (failed.load(std::memory_order_relaxed)) {
            continue;
        }
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(hpre_kernel_error)
            {
                if (!failed.load(std::memory_order_relaxed)) {
                    error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                }
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::vector<Ciphertext> wrap(std::vector<mpz_class>&& values, const Fingerprint& fp) {
    std::vector<Ciphertext> out;
    out.reserve(values.size());
    for (mpz_class& v : values) {
        out.emplace_back(std::move(v), fp);
    }
    return out;
}

}  // namespace

std::vector<Ciphertext> encrypt_batch(const PaillierPublicKey& pk,
                                      const std::vector<mpz_class>& values,
                                      const std::vector<Randomizer>& randomizers,
                                      ExecMode mode) {
    if (values.size() != randomizers.size()) {
        throw ProtocolError("encrypt_batch length mismatch");
    }
    std::vector<mpz_class> out(values.size());
    for_each_index(values.size(), mode, [&](std::size_t i) {
        out[i] = pk.encrypt(values[i], randomizers[i]).value();
    });
    return wrap(std::move(out), pk.fingerprint());
}

std::vector<mpz_class> decrypt_batch(const PaillierPrivateKey& sk,
                                     const PaillierPublicKey& pk,
                                     const std::vector<Ciphertext>& cts, ExecMode mode) {
    std::vector<mpz_class> out(cts.size());
    for_each_index(cts.size(), mode, [&](std::size_t i) { out[i] = sk.decrypt(pk, cts[i]); });
    return out;
}

std::vector<mpz_class> difference_batch(const PaillierPublicKey& pk,
                                        const std::vector<Ciphertext>& lhs,
                                        const std::vector<Ciphertext>& rhs, ExecMode mode) {
    if (lhs.size() != rhs.size()) {
        throw ProtocolError("difference_batch length mismatch");
    }
    std::vector<mpz_class> out(lhs.size());
    for_each_index(lhs.size(), mode,
                   [&](std::size_t i) { out[i] = encrypted_difference(pk, lhs[i], rhs[i]); });
    return out;
}

std::vector<Ciphertext> hom_sub_batch(const PaillierPublicKey& pk,
                                      const std::vector<Ciphertext>& lhs,
                                      const std::vector<Ciphertext>& rhs, ExecMode mode) {
    if (lhs.size() != rhs.size()) {
        throw ProtocolError("hom_sub_batch length mismatch");
    }
    std::vector<mpz_class> out(lhs.size());
    for_each_index(lhs.size(), mode, [&](std::size_t i) {
        out[i] = pk.add(lhs[i], pk.invert(rhs[i])).value();
    });
    return wrap(std::move(out), pk.fingerprint());
}

}  // namespace hpre
