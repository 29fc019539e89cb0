#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "hpre/errors.hpp"
#include "hpre/pgm.hpp"
#include "hpre/serialize.hpp"

using namespace hpre;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hpre_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const char* name) const { return path / name; }
};

}  // namespace

TEST_CASE("key files round trip byte-exactly") {
    TempDir dir;
    Rng rng(61);
    PaillierKeyPair keys = keygen(128, rng);

    write_public_key(dir / "pub.hpk", keys.pub);
    PaillierPublicKey pub = read_public_key(dir / "pub.hpk");
    CHECK(pub == keys.pub);

    write_private_key(dir / "priv.hsk", keys);
    PaillierKeyPair loaded = read_private_key(dir / "priv.hsk");
    CHECK(loaded.pub == keys.pub);
    CHECK(loaded.priv.ks() == keys.priv.ks());
    CHECK(loaded.priv.ks_inverse() == keys.priv.ks_inverse());

    // serialize(parse(file)) reproduces the file bytes
    write_public_key(dir / "pub2.hpk", pub);
    std::ifstream a(dir / "pub.hpk", std::ios::binary), b(dir / "pub2.hpk", std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), {});
    std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
}

TEST_CASE("key files reject corruption") {
    TempDir dir;
    Rng rng(62);
    PaillierKeyPair keys = keygen(64, rng);
    write_public_key(dir / "pub.hpk", keys.pub);

    SUBCASE("wrong magic") {
        std::fstream f(dir / "pub.hpk", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
        f.close();
        CHECK_THROWS_AS(read_public_key(dir / "pub.hpk"), IoError);
    }
    SUBCASE("truncation") {
        auto size = fs::file_size(dir / "pub.hpk");
        fs::resize_file(dir / "pub.hpk", size - 3);
        CHECK_THROWS_AS(read_public_key(dir / "pub.hpk"), IoError);
    }
    SUBCASE("private key parsed as public") {
        write_private_key(dir / "priv.hsk", keys);
        CHECK_THROWS_AS(read_public_key(dir / "priv.hsk"), IoError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_public_key(dir / "nope.hpk"), IoError);
    }
}

TEST_CASE("blob files have the exact documented size") {
    TempDir dir;
    Rng rng(63);
    PaillierKeyPair keys = keygen(64, rng);

    CiphertextBlob blob;
    blob.key = keys.pub.fingerprint();
    blob.key_bits = keys.pub.bit_length();
    blob.bit_depth = 8;
    blob.width = 5;
    blob.height = 3;
    for (int i = 0; i < 15; ++i) {
        blob.cts.push_back(keys.pub.encrypt(i, sample_randomizer(keys.pub, rng)));
    }
    write_blob(dir / "img.hcb", blob);

    CHECK(fs::file_size(dir / "img.hcb") == blob_file_bytes(15, 64));
    CHECK(blob_file_bytes(15, 64) == kBlobHeaderBytes + 15 * (2 * 64 / 8));

    CiphertextBlob loaded = read_blob(dir / "img.hcb");
    CHECK(loaded.key == blob.key);
    CHECK(loaded.key_bits == blob.key_bits);
    CHECK(loaded.bit_depth == blob.bit_depth);
    CHECK(loaded.width == blob.width);
    CHECK(loaded.height == blob.height);
    REQUIRE(loaded.cts.size() == blob.cts.size());
    for (std::size_t i = 0; i < blob.cts.size(); ++i) {
        CHECK(loaded.cts[i] == blob.cts[i]);
    }

    SUBCASE("shape disagreement is rejected") {
        std::fstream f(dir / "img.hcb", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(26);  // width field
        const char bogus[4] = {0, 0, 0, 9};
        f.write(bogus, 4);
        f.close();
        CHECK_THROWS_AS(read_blob(dir / "img.hcb"), IoError);
    }
}

TEST_CASE("wire size helpers") {
    CHECK(ciphertext_wire_bytes(1024) == 256);  // 2048 bits per ciphertext
    CHECK(ciphertext_wire_bytes(16) == 4);
    CHECK(residue_wire_bytes(1024) == 128);
    CHECK(length_prefixed_bytes(0) == 4);
    CHECK(length_prefixed_bytes(16807) == 4 + 2);
    CHECK(blob_file_bytes(11224, 1024) == 42 + std::size_t{11224} * 256);
}

TEST_CASE("agreement file round trip") {
    TempDir dir;
    PaillierKeyPair k1 = keypair_from_primes(181, 233);
    PaillierKeyPair k2 = keypair_from_primes(239, 251);
    ShareAgreement agreement = make_share_agreement(k1.pub, k2.pub, 1234, 987, 16807);

    write_agreement(dir / "share.agreement", agreement);
    ShareAgreement loaded = read_agreement(dir / "share.agreement", k1.pub, k2.pub);
    CHECK(loaded == agreement);

    SUBCASE("comments and blank lines are tolerated") {
        std::ofstream out(dir / "hand.agreement");
        out << "# written by hand\n\nseed = 7\nincrement=9 # inline\nmultiplier =  3\n";
        out.close();
        ShareAgreement hand = read_agreement(dir / "hand.agreement", k1.pub, k2.pub);
        CHECK(hand.seed == 7);
        CHECK(hand.increment == 9);
        CHECK(hand.multiplier == 3);
    }
    SUBCASE("missing field") {
        std::ofstream out(dir / "bad.agreement");
        out << "seed = 7\n";
        out.close();
        CHECK_THROWS_AS(read_agreement(dir / "bad.agreement", k1.pub, k2.pub), IoError);
    }
    SUBCASE("out-of-range seed") {
        std::ofstream out(dir / "big.agreement");
        out << "seed = 99999999\nincrement = 1\nmultiplier = 3\n";
        out.close();
        CHECK_THROWS_AS(read_agreement(dir / "big.agreement", k1.pub, k2.pub), ProtocolError);
    }
}

TEST_CASE("secrets file round trip with owner-only permissions") {
    TempDir dir;
    PaillierKeyPair k1 = keypair_from_primes(181, 233);
    RetainedSecrets secrets{Randomizer(101, k1.pub.modulus()),
                            Randomizer(217, k1.pub.modulus()), 16807};

    write_secrets(dir / "img.secrets", secrets, k1.pub.fingerprint());
    RetainedSecrets loaded = read_secrets(dir / "img.secrets", k1.pub);
    CHECK(loaded.r0 == secrets.r0);
    CHECK(loaded.rc == secrets.rc);
    CHECK(loaded.multiplier == secrets.multiplier);

    auto perms = fs::status(dir / "img.secrets").permissions();
    CHECK((perms & fs::perms::group_all) == fs::perms::none);
    CHECK((perms & fs::perms::others_all) == fs::perms::none);

    SUBCASE("foreign key is rejected") {
        PaillierKeyPair k2 = keypair_from_primes(239, 251);
        CHECK_THROWS_AS(read_secrets(dir / "img.secrets", k2.pub), KeyMismatchError);
    }
}

TEST_CASE("PGM round trip") {
    TempDir dir;
    std::vector<std::uint64_t> pixels(12 * 7);
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = (i * 37) % 256;
    DataVector image = DataVector::image(std::move(pixels), 8, 12, 7);

    write_pgm(dir / "img.pgm", image);
    CHECK(read_pgm(dir / "img.pgm") == image);

    SUBCASE("header comments are accepted") {
        std::ofstream out(dir / "comment.pgm", std::ios::binary);
        out << "P5\n# a comment\n2 2\n# another\n255\n";
        out.write("\x01\x02\x03\x04", 4);
        out.close();
        DataVector img = read_pgm(dir / "comment.pgm");
        CHECK(img.width == 2);
        CHECK(img.values == std::vector<std::uint64_t>{1, 2, 3, 4});
    }
    SUBCASE("maxval other than 255 is rejected") {
        std::ofstream out(dir / "bad.pgm", std::ios::binary);
        out << "P5\n2 1\n65535\n";
        out.write("\x01\x02\x03\x04", 4);
        out.close();
        CHECK_THROWS_AS(read_pgm(dir / "bad.pgm"), IoError);
    }
    SUBCASE("P2 is rejected") {
        std::ofstream out(dir / "ascii.pgm", std::ios::binary);
        out << "P2\n1 1\n255\n7\n";
        out.close();
        CHECK_THROWS_AS(read_pgm(dir / "ascii.pgm"), IoError);
    }
    SUBCASE("truncated pixels are rejected") {
        std::ofstream out(dir / "short.pgm", std::ios::binary);
        out << "P5\n4 4\n255\n";
        out.write("\x01\x02", 2);
        out.close();
        CHECK_THROWS_AS(read_pgm(dir / "short.pgm"), IoError);
    }
}
