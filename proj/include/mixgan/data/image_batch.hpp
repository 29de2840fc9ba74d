#pragma once

#include <string>

#include "mixgan/core/error.hpp"
#include "mixgan/core/tensor.hpp"

namespace mixgan::data {

enum class DomainTag { content, style, generated };

inline const char* to_string(DomainTag t) {
  switch (t) {
    case DomainTag::content: return "content";
    case DomainTag::style: return "style";
    case DomainTag::generated: return "generated";
  }
  return "?";
}

// Rank-4 (n, c, h, w) image batch with every element in [-1, 1].
struct ImageBatch {
  Tensor<float> data;
  DomainTag tag = DomainTag::content;

  std::size_t count() const { return data.dim(0); }
  std::size_t channels() const { return data.dim(1); }
  std::size_t height() const { return data.dim(2); }
  std::size_t width() const { return data.dim(3); }
};

// Validates the ImageBatch invariants and wraps the tensor.
inline ImageBatch make_image_batch(Tensor<float> t, DomainTag tag) {
  require_rank(t, 4, "ImageBatch");
  const std::size_t c = t.dim(1);
  if (c != 1 && c != 3)
    throw ShapeError("ImageBatch: channel count must be 1 or 3, got " +
                     std::to_string(c));
  if (t.dim(2) != t.dim(3))
    throw ShapeError("ImageBatch: images must be square, got " +
                     shape_str(t.shape()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const float v = t[i];
    if (!(v >= -1.0f && v <= 1.0f))
      throw ArgumentError("ImageBatch: element " + std::to_string(i) +
                          " out of [-1,1]: " + std::to_string(v));
  }
  return ImageBatch{std::move(t), tag};
}

// Returns the i-th image as a rank-4 single-image view copy.
inline Tensor<float> image_slice(const Tensor<float>& batch, std::size_t i) {
  const std::size_t c = batch.dim(1), h = batch.dim(2), w = batch.dim(3);
  Tensor<float> out({1, c, h, w});
  const std::size_t stride = c * h * w;
  for (std::size_t j = 0; j < stride; ++j) out[j] = batch[i * stride + j];
  return out;
}

}  // namespace mixgan::data
