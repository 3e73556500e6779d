#pragma once

#include <filesystem>

#include "adl/descriptors.hpp"

namespace adl {

// Binary PPM (P6, maxval 255).
KeyFrameImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const KeyFrameImage& image);

}  // namespace adl
