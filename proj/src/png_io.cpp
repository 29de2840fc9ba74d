#include "mixgan/data/png_io.hpp"

#include <zlib.h>

#include <array>
#include <cstdlib>
#include <cstring>
#include <fstream>

namespace mixgan::data {
namespace {

constexpr std::array<std::uint8_t, 8> kSignature = {0x89, 0x50, 0x4E, 0x47,
                                                    0x0D, 0x0A, 0x1A, 0x0A};

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

// Reverses the per-row filters in place. `spp` is samples per pixel of the
// raw (pre-expansion) scanlines; `stride` is width * spp.
void unfilter(std::vector<std::uint8_t>& raw, std::size_t height,
              std::size_t stride, std::size_t spp) {
  std::vector<std::uint8_t> prev(stride, 0);
  for (std::size_t y = 0; y < height; ++y) {
    std::uint8_t* row = raw.data() + y * (stride + 1);
    const std::uint8_t filter = row[0];
    std::uint8_t* cur = row + 1;
    switch (filter) {
      case 0:
        break;
      case 1:  // Sub
        for (std::size_t i = spp; i < stride; ++i)
          cur[i] = std::uint8_t(cur[i] + cur[i - spp]);
        break;
      case 2:  // Up
        for (std::size_t i = 0; i < stride; ++i)
          cur[i] = std::uint8_t(cur[i] + prev[i]);
        break;
      case 3:  // Average
        for (std::size_t i = 0; i < stride; ++i) {
          const int left = i >= spp ? cur[i - spp] : 0;
          cur[i] = std::uint8_t(cur[i] + (left + prev[i]) / 2);
        }
        break;
      case 4:  // Paeth
        for (std::size_t i = 0; i < stride; ++i) {
          const int left = i >= spp ? cur[i - spp] : 0;
          const int upleft = i >= spp ? prev[i - spp] : 0;
          cur[i] = std::uint8_t(cur[i] + paeth(left, prev[i], upleft));
        }
        break;
      default:
        throw FormatError("png: unknown row filter " +
                                std::to_string(int(filter)));
    }
    std::memcpy(prev.data(), cur, stride);
  }
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::uint8_t* data, std::size_t len) {
  write_be32(out, std::uint32_t(len));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  if (len > 0) out.insert(out.end(), data, data + len);
  const auto crc = std::uint32_t(
      crc32(0, out.data() + type_at, uInt(4 + len)));
  write_be32(out, crc);
}

}  // namespace

PngImage decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kSignature.size() ||
      !std::equal(kSignature.begin(), kSignature.end(), bytes.begin())) {
    throw FormatError("png: bad signature");
  }

  std::size_t width = 0, height = 0;
  int bit_depth = -1, color_type = -1;
  std::vector<std::uint8_t> palette;     // packed RGB triples
  std::vector<std::uint8_t> compressed;  // concatenated IDAT payloads
  bool saw_ihdr = false, saw_iend = false;

  std::size_t pos = kSignature.size();
  while (!saw_iend) {
    if (pos + 8 > bytes.size())
      throw FormatError("png: truncated chunk header at byte " +
                              std::to_string(pos));
    const std::uint32_t len = read_be32(bytes.data() + pos);
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    if (pos + 12 + std::size_t(len) > bytes.size())
      throw FormatError("png: truncated chunk body at byte " +
                              std::to_string(pos));
    const std::uint8_t* data = bytes.data() + pos + 8;
    const std::uint32_t want_crc = read_be32(data + len);
    const auto got_crc =
        std::uint32_t(crc32(0, bytes.data() + pos + 4, uInt(4 + len)));
    if (want_crc != got_crc)
      throw FormatError("png: bad chunk crc at byte " +
                              std::to_string(pos));

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw FormatError("png: bad IHDR length");
      width = read_be32(data);
      height = read_be32(data + 4);
      bit_depth = data[8];
      color_type = data[9];
      const int compression = data[10], filter = data[11], interlace = data[12];
      if (width == 0 || height == 0)
        throw FormatError("png: zero image dimension");
      if (bit_depth != 8)
        throw FormatError("png: unsupported bit depth " +
                                std::to_string(bit_depth));
      if (color_type != 0 && color_type != 2 && color_type != 3 &&
          color_type != 4 && color_type != 6)
        throw FormatError("png: unsupported color type " +
                                std::to_string(color_type));
      if (compression != 0 || filter != 0)
        throw FormatError("png: unsupported compression/filter method");
      if (interlace != 0)
        throw FormatError("png: interlaced images are not supported");
      saw_ihdr = true;
    } else if (std::memcmp(type, "PLTE", 4) == 0) {
      if (len == 0 || len % 3 != 0)
        throw FormatError("png: bad PLTE length");
      palette.assign(data, data + len);
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      compressed.insert(compressed.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_iend = true;
    }
    // Ancillary chunks (tRNS, gAMA, ...) are skipped.
    pos += 12 + std::size_t(len);
  }

  if (!saw_ihdr) throw FormatError("png: missing IHDR");
  if (compressed.empty()) throw FormatError("png: missing IDAT");
  if (color_type == 3 && palette.empty())
    throw FormatError("png: palette image without PLTE");

  const std::size_t spp =
      color_type == 0 ? 1 : color_type == 2 ? 3 : color_type == 3 ? 1
                        : color_type == 4 ? 2 : 4;
  const std::size_t stride = width * spp;
  const std::size_t raw_size = height * (stride + 1);

  std::vector<std::uint8_t> raw(raw_size);
  uLongf dest_len = uLongf(raw_size);
  const int zret = uncompress(raw.data(), &dest_len, compressed.data(),
                              uLong(compressed.size()));
  if (zret != Z_OK || dest_len != raw_size)
    throw FormatError("png: corrupt image data (zlib error " +
                            std::to_string(zret) + ")");

  unfilter(raw, height, stride, spp);

  PngImage img;
  img.width = width;
  img.height = height;
  img.channels = (color_type == 0 || color_type == 4) ? 1 : 3;
  img.pixels.resize(width * height * img.channels);

  for (std::size_t y = 0; y < height; ++y) {
    const std::uint8_t* src = raw.data() + y * (stride + 1) + 1;
    std::uint8_t* dst = img.pixels.data() + y * width * img.channels;
    switch (color_type) {
      case 0:  // gray
        std::memcpy(dst, src, width);
        break;
      case 2:  // RGB
        std::memcpy(dst, src, width * 3);
        break;
      case 3:  // palette
        for (std::size_t x = 0; x < width; ++x) {
          const std::size_t idx = src[x];
          if (idx * 3 + 2 >= palette.size())
            throw FormatError("png: palette index out of range");
          dst[x * 3 + 0] = palette[idx * 3 + 0];
          dst[x * 3 + 1] = palette[idx * 3 + 1];
          dst[x * 3 + 2] = palette[idx * 3 + 2];
        }
        break;
      case 4:  // gray + alpha -> gray
        for (std::size_t x = 0; x < width; ++x) dst[x] = src[x * 2];
        break;
      case 6:  // RGBA -> RGB
        for (std::size_t x = 0; x < width; ++x) {
          dst[x * 3 + 0] = src[x * 4 + 0];
          dst[x * 3 + 1] = src[x * 4 + 1];
          dst[x * 3 + 2] = src[x * 4 + 2];
        }
        break;
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_png(const PngImage& img) {
  if (img.channels != 1 && img.channels != 3)
    throw ArgumentError("png encoder expects 1 or 3 channels, got " +
                              std::to_string(img.channels));
  if (img.width == 0 || img.height == 0)
    throw ArgumentError("png encoder given empty image");
  if (img.pixels.size() != img.width * img.height * img.channels)
    throw ArgumentError("png encoder: pixel buffer size mismatch");

  const std::size_t stride = img.width * img.channels;
  std::vector<std::uint8_t> raw;
  raw.reserve(img.height * (stride + 1));
  for (std::size_t y = 0; y < img.height; ++y) {
    raw.push_back(0);  // filter type: none
    const std::uint8_t* row = img.pixels.data() + y * stride;
    raw.insert(raw.end(), row, row + stride);
  }

  std::vector<std::uint8_t> zdata(compressBound(uLong(raw.size())));
  uLongf zlen = uLongf(zdata.size());
  const int zret = compress2(zdata.data(), &zlen, raw.data(),
                             uLong(raw.size()), Z_DEFAULT_COMPRESSION);
  if (zret != Z_OK)
    throw IoError("png encoder: zlib error " + std::to_string(zret));
  zdata.resize(zlen);

  std::vector<std::uint8_t> out(kSignature.begin(), kSignature.end());
  std::uint8_t ihdr[13];
  const auto put32 = [](std::uint8_t* p, std::uint32_t v) {
    p[0] = std::uint8_t(v >> 24);
    p[1] = std::uint8_t(v >> 16);
    p[2] = std::uint8_t(v >> 8);
    p[3] = std::uint8_t(v);
  };
  put32(ihdr, std::uint32_t(img.width));
  put32(ihdr + 4, std::uint32_t(img.height));
  ihdr[8] = 8;                                  // bit depth
  ihdr[9] = img.channels == 1 ? 0 : 2;          // gray / RGB
  ihdr[10] = ihdr[11] = ihdr[12] = 0;           // deflate, adaptive, none
  append_chunk(out, "IHDR", ihdr, sizeof(ihdr));
  append_chunk(out, "IDAT", zdata.data(), zdata.size());
  append_chunk(out, "IEND", nullptr, 0);
  return out;
}

PngImage read_png(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

void write_png(const std::string& path, const PngImage& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw IoError("short write to " + path);
}

}  // namespace mixgan::data
