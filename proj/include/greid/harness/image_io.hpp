#pragma once

#include <filesystem>

#include "greid/descriptors.hpp"

namespace greid::harness {

/// Decodes an image file to RGB. Throws "missing-image" when the file cannot be read and
/// "unsupported" when the build has no image decoder.
RgbImage load_image(const std::filesystem::path& path);

bool image_decoding_available();

}  // namespace greid::harness
