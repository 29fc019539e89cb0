#pragma once

#include <filesystem>

#include "hpre/protocol.hpp"

namespace hpre {

// Binary PGM (P5), maxval 255 only. Comments in the header are accepted.
DataVector read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const DataVector& image);

}  // namespace hpre
