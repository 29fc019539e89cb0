#include "hpre/pgm.hpp"

#include <fstream>
#include <string>

#include "hpre/errors.hpp"

namespace hpre {

namespace {

// One whitespace-delimited token, skipping '#' comments to end of line.
std::string next_token(std::istream& in) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!token.empty()) {
                in.unget();
                break;
            }
            continue;
        }
        token.push_back(static_cast<char>(ch));
    }
    return token;
}

unsigned long parse_number(const std::string& token, const std::filesystem::path& path) {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
        throw IoError("malformed PGM header: " + path.string());
    }
    return std::stoul(token);
}

}  // namespace

DataVector read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open: " + path.string());
    }
    if (next_token(in) != "P5") {
        throw IoError("not a binary PGM (P5): " + path.string());
    }
    const unsigned long width = parse_number(next_token(in), path);
    const unsigned long height = parse_number(next_token(in), path);
    const unsigned long maxval = parse_number(next_token(in), path);
    if (width == 0 || height == 0) {
        throw IoError("empty PGM: " + path.string());
    }
    if (maxval != 255) {
        throw IoError("unsupported PGM maxval (must be 255): " + path.string());
    }
    in.get();  // single whitespace byte after maxval

    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::string pixels(n, '\0');
    in.read(pixels.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw IoError("truncated PGM pixel data: " + path.string());
    }

    std::vector<std::uint64_t> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = static_cast<std::uint8_t>(pixels[i]);
    }
    return DataVector::image(std::move(values), 8, static_cast<std::uint32_t>(width),
                             static_cast<std::uint32_t>(height));
}

void write_pgm(const std::filesystem::path& path, const DataVector& image) {
    if (image.bit_depth != 8) {
        throw ProtocolError("PGM output requires 8-bit data");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    std::string pixels(image.size(), '\0');
    for (std::size_t i = 0; i < image.size(); ++i) {
        pixels[i] = static_cast<char>(static_cast<std::uint8_t>(image.values[i]));
    }
    out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
    if (!out) {
        throw IoError("write failure: " + path.string());
    }
}

}  // namespace hpre
