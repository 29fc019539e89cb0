#pragma once

// Test-only oracles. Each one evaluates the defining formula directly with
// raw GMP calls, independent of the library paths it is used to check.

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace oracle {

inline mpz_class powm(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
    mpz_class out;
    mpz_powm(out.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return out;
}

inline mpz_class invm(const mpz_class& v, const mpz_class& m) {
    mpz_class out;
    if (mpz_invert(out.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t()) == 0) {
        throw std::runtime_error("oracle: not invertible");
    }
    return out;
}

// General-form encryption c = g^m * r^Kp mod Kp^2 with g = 1 + Kp, taking
// the g^m route rather than the fast (1 + m*Kp) shortcut.
inline mpz_class encrypt(const mpz_class& kp, const mpz_class& m, const mpz_class& r) {
    const mpz_class kp2 = kp * kp;
    const mpz_class g = kp + 1;
    return powm(g, m, kp2) * powm(r, kp, kp2) % kp2;
}

// m = ((c^Ks - 1 mod Kp^2) / Kp) * Ks^-1 mod Kp
inline mpz_class decrypt(const mpz_class& kp, const mpz_class& ks, const mpz_class& c) {
    const mpz_class kp2 = kp * kp;
    mpz_class u = powm(c, ks, kp2) - 1;
    mpz_class l = u / kp;
    return l * invm(ks, kp) % kp;
}

// X_0 .. X_{n-1} with X_{i+1} = a*X_i + c mod m.
inline std::vector<mpz_class> lcg_sequence(const mpz_class& a, const mpz_class& c,
                                           const mpz_class& m, const mpz_class& x0,
                                           std::size_t n) {
    std::vector<mpz_class> out;
    out.reserve(n);
    mpz_class x = x0;
    out.push_back(x);
    for (std::size_t i = 1; i < n; ++i) {
        x = (a * x + c) % m;
        out.push_back(x);
    }
    return out;
}

// r_0 .. r_{n-1} with r_{i+1} = r_i^a * r_c mod Kp.
inline std::vector<mpz_class> randomizer_chain(const mpz_class& r0, const mpz_class& rc,
                                               const mpz_class& a, const mpz_class& kp,
                                               std::size_t n) {
    std::vector<mpz_class> out;
    out.reserve(n);
    mpz_class r = r0;
    out.push_back(r);
    for (std::size_t i = 1; i < n; ++i) {
        r = powm(r, a, kp) * rc % kp;
        out.push_back(r);
    }
    return out;
}

}  // namespace oracle
