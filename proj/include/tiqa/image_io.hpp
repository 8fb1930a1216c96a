#pragma once

#include <filesystem>
#include <string>

#include "tiqa/image.hpp"

namespace tiqa {

/// Reads PNG (8/16-bit, gray or RGB; alpha dropped, palettes expanded) or
/// binary PGM/PPM (P5/P6, maxval up to 65535). Samples are normalized to
/// [0, 1]. The format is chosen from the file signature.
Image read_image(const std::filesystem::path& path);

/// Writes a PNG with the given bit depth (8 or 16).
void write_png(const std::filesystem::path& path, const Image& image,
               int bit_depth = 8);

/// Writes binary PGM (1 channel) or PPM (3 channels) with 8 or 16 bits.
void write_pnm(const std::filesystem::path& path, const Image& image,
               int bit_depth = 8);

/// Dispatches on the extension: .pgm/.ppm/.pnm write PNM, anything else PNG.
void write_image(const std::filesystem::path& path, const Image& image,
                 int bit_depth = 8);

/// "view_0007" for index 7; tangent-view dumps append ".png".
std::string view_file_stem(int index);

}  // namespace tiqa
