#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixgan/core/error.hpp"

namespace mixgan::data {

// Interleaved 8-bit pixels, row-major. channels is 1 (gray) or 3 (RGB) after
// decoding; the encoder accepts the same two layouts.
struct PngImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;
};

// Minimal PNG codec over zlib. Decodes non-interlaced 8-bit gray, RGB,
// palette, gray+alpha and RGBA (alpha is dropped, palette expanded to RGB).
// Anything else throws FormatError, which directory loading treats as an
// undecodable file.
PngImage decode_png(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_png(const PngImage& img);

PngImage read_png(const std::string& path);
void write_png(const std::string& path, const PngImage& img);

}  // namespace mixgan::data
