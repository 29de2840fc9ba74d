#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mixgan/data/image_batch.hpp"

namespace mixgan::data {

// Content domain: one bright shape per image on a dark ground, strictly
// binary (-1 or +1) grayscale. Class counts are exactly balanced and the
// whole corpus is a pure function of (seed, count, size).
inline constexpr std::array<const char*, 4> kShapeNames = {
    "circle", "square", "triangle", "cross"};

struct ShapeCorpus {
  ImageBatch batch;                  // (n, 1, size, size), values in {-1, +1}
  std::vector<std::uint8_t> labels;  // shape class per image, 0..3
};

ShapeCorpus make_shape_corpus(std::uint64_t seed, std::size_t count,
                              std::size_t size);

// Style domain: colored patterns (none of which is a content shape) drawn
// with palette() colors over a dark ground, with per-pixel color jitter.
// Pattern and color class counts are each exactly balanced.
inline constexpr std::array<const char*, 4> kStyleNames = {"ring", "bars",
                                                           "dots", "frame"};

struct StyleCorpus {
  ImageBatch batch;  // (n, 3, size, size)
  std::vector<std::uint8_t> pattern_labels;  // 0..3 into kStyleNames
  std::vector<std::uint8_t> color_labels;    // 0..3 into palette()
};

StyleCorpus make_style_corpus(std::uint64_t seed, std::size_t count,
                              std::size_t size);

}  // namespace mixgan::data
