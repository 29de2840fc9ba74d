#pragma once

#include <string>
#include <vector>

#include "mixgan/data/image_batch.hpp"
#include "mixgan/data/png_io.hpp"

namespace mixgan::data {

// Converts a 3-channel batch to single-channel luma (0.299 R + 0.587 G +
// 0.114 B, applied directly in [-1, 1] space). Throws ShapeError on
// single-channel input.
ImageBatch to_grayscale(const ImageBatch& batch);

// Copies a single-channel batch into three identical channels.
ImageBatch replicate_channels(const ImageBatch& batch);

// Bilinear resize to target_size x target_size using half-pixel centers.
// Returns a copy when the size already matches.
ImageBatch resize_bilinear(const ImageBatch& batch, std::size_t target_size);

// PngImage (interleaved u8) <-> single-image batch row ([-1, 1] planar).
Tensor<float> png_to_tensor(const PngImage& img);
PngImage image_to_png(const ImageBatch& batch, std::size_t index);

struct DirLoadResult {
  ImageBatch batch;
  std::vector<std::string> skipped;  // undecodable files, by name
};

// Loads every decodable PNG under `dir` (non-recursive, lexicographic
// filename order), resizes to target_size and unifies channels: grayscale
// true collapses RGB to luma, false replicates gray to RGB. Files that fail
// to decode are collected in `skipped`. Throws EmptyDatasetError when no
// image survives.
DirLoadResult load_image_dir(const std::string& dir, std::size_t target_size,
                             bool grayscale, DomainTag tag);

}  // namespace mixgan::data
