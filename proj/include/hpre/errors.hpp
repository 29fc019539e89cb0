#pragma once

#include <stdexcept>

namespace hpre {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File and format problems: missing files, bad magic, truncated data.
class IoError : public Error {
public:
    using Error::Error;
};

// Key/ciphertext fingerprint disagreement.
class KeyMismatchError : public Error {
public:
    using Error::Error;
};

// Violated protocol contract: broken randomizer chain, length mismatch,
// modulus window violation, out-of-range values.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Configuration rejected by policy (e.g. undersized keys outside test mode).
class PolicyError : public Error {
public:
    using Error::Error;
};

}  // namespace hpre
