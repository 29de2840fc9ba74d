#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixgan/data/image_batch.hpp"

namespace mixgan::data {

// IDX container (big-endian): 4-byte magic, one u32 per dimension, then the
// row-major uint8 payload. 0x00000803 = rank-3 u8 images, 0x00000801 =
// rank-1 u8 labels.
inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols
};

struct IdxHeader {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
};

// Reads only the header (magic + dims); for inspecting large files cheaply.
IdxHeader read_idx_header(const std::string& path);

IdxImages load_idx_raw(const std::string& path);
void save_idx_raw(const std::string& path, const IdxImages& images);

std::vector<std::uint8_t> load_idx_labels(const std::string& path);
void save_idx_labels(const std::string& path,
                     const std::vector<std::uint8_t>& labels);

// Loads an image file and normalizes to [-1, 1] via v / 127.5 - 1.
ImageBatch load_idx(const std::string& path,
                    DomainTag tag = DomainTag::content);

// Quantizes a batch to u8 via round((v + 1) * 127.5). 3-channel batches are
// grayscaled first; IDX rank-3 stores single-channel images only.
IdxImages to_idx_images(const ImageBatch& batch);

}  // namespace mixgan::data
