#include "hpre/serialize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "hpre/bytes.hpp"
#include "hpre/errors.hpp"

namespace hpre {

namespace {

constexpr char kPublicMagic[4] = {'H', 'P', 'K', '1'};
constexpr char kPrivateMagic[4] = {'H', 'S', 'K', '1'};
constexpr char kBlobMagic[4] = {'H', 'C', 'B', '1'};
constexpr std::uint8_t kVersion = 1;

class Writer {
public:
    void magic(const char (&m)[4]) { buf_.insert(buf_.end(), m, m + 4); }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8) {
            buf_.push_back(static_cast<std::uint8_t>(v >> shift));
        }
    }
    void u64(std::uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8) {
            buf_.push_back(static_cast<std::uint8_t>(v >> shift));
        }
    }
    void bytes(const std::uint8_t* data, std::size_t n) { buf_.insert(buf_.end(), data, data + n); }
    void length_prefixed(const mpz_class& v) {
        std::vector<std::uint8_t> mag = mpz_bytes_be(v);
        u32(static_cast<std::uint32_t>(mag.size()));
        bytes(mag.data(), mag.size());
    }
    void fixed(const mpz_class& v, std::size_t width) {
        const std::size_t at = buf_.size();
        buf_.resize(at + width);
        mpz_to_fixed_be(v, buf_.data() + at, width);
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open for writing: " + path.string());
        }
        out.write(reinterpret_cast<const char*>(buf_.data()),
                  static_cast<std::streamsize>(buf_.size()));
        if (!out) {
            throw IoError("write failure: " + path.string());
        }
    }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : path_(path.string()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw IoError("cannot open: " + path_);
        }
        buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    void expect_magic(const char (&m)[4], const char* what) {
        if (remaining() < 4 || !std::equal(m, m + 4, buf_.begin() + static_cast<long>(pos_))) {
            throw IoError(std::string("not a ") + what + " file: " + path_);
        }
        pos_ += 4;
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<std::uint8_t>(buf_[pos_++]);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | static_cast<std::uint8_t>(buf_[pos_++]);
        return v;
    }
    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto out = std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(buf_.data()) + pos_, n);
        pos_ += n;
        return out;
    }
    mpz_class length_prefixed() { return mpz_from_bytes_be(bytes(u32())); }
    mpz_class fixed(std::size_t width) { return mpz_from_bytes_be(bytes(width)); }

    std::size_t remaining() const { return buf_.size() - pos_; }
    void expect_end() const {
        if (remaining() != 0) {
            throw IoError("trailing bytes in " + path_);
        }
    }

private:
    void need(std::size_t n) const {
        if (remaining() < n) {
            throw IoError("truncated file: " + path_);
        }
    }

    std::string path_;
    std::string buf_;
    std::size_t pos_ = 0;
};

Fingerprint read_fingerprint(Reader& r) {
    auto raw = r.bytes(16);
    Fingerprint fp;
    std::copy(raw.begin(), raw.end(), fp.begin());
    return fp;
}

std::map<std::string, std::string> read_kv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open: " + path.string());
    }
    std::map<std::string, std::string> out;
    std::string line;
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return std::string(s);
    };
    while (std::getline(in, line)) {
        std::string_view sv(line);
        auto hash = sv.find('#');
        if (hash != std::string_view::npos) sv = sv.substr(0, hash);
        auto eq = sv.find('=');
        if (eq == std::string_view::npos) continue;
        std::string key = trim(sv.substr(0, eq));
        std::string value = trim(sv.substr(eq + 1));
        if (!key.empty()) out[key] = value;
    }
    return out;
}

mpz_class parse_decimal(const std::map<std::string, std::string>& kv, const std::string& key,
                        const std::filesystem::path& path) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        throw IoError("missing '" + key + "' in " + path.string());
    }
    mpz_class out;
    if (mpz_set_str(out.get_mpz_t(), it->second.c_str(), 10) != 0) {
        throw IoError("invalid decimal for '" + key + "' in " + path.string());
    }
    return out;
}

}  // namespace

std::size_t ciphertext_wire_bytes(unsigned key_bits) {
    return (2 * static_cast<std::size_t>(key_bits) + 7) / 8;
}

std::size_t residue_wire_bytes(unsigned key_bits) {
    return (static_cast<std::size_t>(key_bits) + 7) / 8;
}

std::size_t length_prefixed_bytes(const mpz_class& value) {
    return 4 + (mpz_sgn(value.get_mpz_t()) == 0
                    ? 0
                    : (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8);
}

std::size_t blob_file_bytes(std::size_t count, unsigned key_bits) {
    return kBlobHeaderBytes + count * ciphertext_wire_bytes(key_bits);
}

void write_public_key(const std::filesystem::path& path, const PaillierPublicKey& pk) {
    Writer w;
    w.magic(kPublicMagic);
    w.u8(kVersion);
    w.u32(pk.bit_length());
    w.length_prefixed(pk.modulus());
    w.save(path);
}

PaillierPublicKey read_public_key(const std::filesystem::path& path) {
    Reader r(path);
    r.expect_magic(kPublicMagic, "public key");
    if (r.u8() != kVersion) {
        throw IoError("unsupported public key version: " + path.string());
    }
    const std::uint32_t bits = r.u32();
    PaillierPublicKey pk = PaillierPublicKey::from_modulus(r.length_prefixed());
    r.expect_end();
    if (pk.bit_length() != bits) {
        throw IoError("modulus bit length disagrees with header: " + path.string());
    }
    return pk;
}

void write_private_key(const std::filesystem::path& path, const PaillierKeyPair& keys) {
    Writer w;
    w.magic(kPrivateMagic);
    w.u8(kVersion);
    w.u32(keys.pub.bit_length());
    w.length_prefixed(keys.pub.modulus());
    w.length_prefixed(keys.priv.ks());
    w.length_prefixed(keys.priv.ks_inverse());
    w.save(path);
    std::filesystem::permissions(path, std::filesystem::perms::owner_read |
                                           std::filesystem::perms::owner_write);
}

PaillierKeyPair read_private_key(const std::filesystem::path& path) {
    Reader r(path);
    r.expect_magic(kPrivateMagic, "private key");
    if (r.u8() != kVersion) {
        throw IoError("unsupported private key version: " + path.string());
    }
    const std::uint32_t bits = r.u32();
    PaillierPublicKey pk = PaillierPublicKey::from_modulus(r.length_prefixed());
    mpz_class ks = r.length_prefixed();
    mpz_class ks_inv = r.length_prefixed();
    r.expect_end();
    if (pk.bit_length() != bits) {
        throw IoError("modulus bit length disagrees with header: " + path.string());
    }
    if (ks * ks_inv % pk.modulus() != 1) {
        throw IoError("inconsistent private key material: " + path.string());
    }
    Fingerprint fp = pk.fingerprint();
    return PaillierKeyPair{std::move(pk),
                           PaillierPrivateKey(std::move(ks), std::move(ks_inv), fp)};
}

void write_blob(const std::filesystem::path& path, const CiphertextBlob& blob) {
    const std::size_t width = ciphertext_wire_bytes(blob.key_bits);
    Writer w;
    w.magic(kBlobMagic);
    w.u8(kVersion);
    w.bytes(blob.key.data(), blob.key.size());
    w.u32(blob.key_bits);
    w.u8(static_cast<std::uint8_t>(blob.bit_depth));
    w.u32(blob.width);
    w.u32(blob.height);
    w.u64(blob.cts.size());
    for (const Ciphertext& ct : blob.cts) {
        if (ct.key_fingerprint() != blob.key) {
            throw KeyMismatchError("blob ciphertext under a different key");
        }
        w.fixed(ct.value(), width);
    }
    w.save(path);
}

CiphertextBlob read_blob(const std::filesystem::path& path) {
    Reader r(path);
    r.expect_magic(kBlobMagic, "ciphertext blob");
    if (r.u8() != kVersion) {
        throw IoError("unsupported blob version: " + path.string());
    }
    CiphertextBlob blob;
    blob.key = read_fingerprint(r);
    blob.key_bits = r.u32();
    blob.bit_depth = r.u8();
    blob.width = r.u32();
    blob.height = r.u32();
    const std::uint64_t count = r.u64();
    if (count != static_cast<std::uint64_t>(blob.width) * blob.height) {
        throw IoError("blob count does not match its shape: " + path.string());
    }
    const std::size_t width = ciphertext_wire_bytes(blob.key_bits);
    blob.cts.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        blob.cts.emplace_back(r.fixed(width), blob.key);
    }
    r.expect_end();
    return blob;
}

void write_agreement(const std::filesystem::path& path, const ShareAgreement& agreement) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << "# hpre share agreement (keep secret)\n";
    out << "seed = " << agreement.seed.get_str() << '\n';
    out << "increment = " << agreement.increment.get_str() << '\n';
    out << "multiplier = " << agreement.multiplier.get_str() << '\n';
    if (!out) {
        throw IoError("write failure: " + path.string());
    }
    std::filesystem::permissions(path, std::filesystem::perms::owner_read |
                                           std::filesystem::perms::owner_write);
}

ShareAgreement read_agreement(const std::filesystem::path& path,
                              const PaillierPublicKey& delegator_pk,
                              const PaillierPublicKey& delegate_pk) {
    auto kv = read_kv_file(path);
    return make_share_agreement(delegator_pk, delegate_pk, parse_decimal(kv, "seed", path),
                                parse_decimal(kv, "increment", path),
                                parse_decimal(kv, "multiplier", path));
}

void write_secrets(const std::filesystem::path& path, const RetainedSecrets& secrets,
                   const Fingerprint& key) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << "# hpre delegator retained secrets (keep secret)\n";
    out << "key = " << fingerprint_hex(key) << '\n';
    out << "r0 = " << secrets.r0.value().get_str() << '\n';
    out << "rc = " << secrets.rc.value().get_str() << '\n';
    out << "multiplier = " << secrets.multiplier.get_str() << '\n';
    if (!out) {
        throw IoError("write failure: " + path.string());
    }
    std::filesystem::permissions(path, std::filesystem::perms::owner_read |
                                           std::filesystem::perms::owner_write);
}

RetainedSecrets read_secrets(const std::filesystem::path& path, const PaillierPublicKey& pk) {
    auto kv = read_kv_file(path);
    auto key = kv.find("key");
    if (key == kv.end()) {
        throw IoError("missing 'key' in " + path.string());
    }
    if (key->second != fingerprint_hex(pk.fingerprint())) {
        throw KeyMismatchError("secrets file belongs to a different key: " + path.string());
    }
    return RetainedSecrets{Randomizer(parse_decimal(kv, "r0", path), pk.modulus()),
                           Randomizer(parse_decimal(kv, "rc", path), pk.modulus()),
                           parse_decimal(kv, "multiplier", path)};
}

}  // namespace hpre
