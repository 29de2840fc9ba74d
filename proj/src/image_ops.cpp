#include "mixgan/data/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace mixgan::data {


namespace {

// Tensor-level kernels shared by the batch ops and the directory loader.
// The loader needs them before images are square, so they skip the
// ImageBatch invariants and work on any rank-4 (n, c, h, w) tensor.

Tensor<float> gray_t(const Tensor<float>& t) {
  const std::size_t n = t.dim(0), h = t.dim(2), w = t.dim(3);
  Tensor<float> out({n, 1, h, w});
  const std::size_t plane = h * w;
  for (std::size_t i = 0; i < n; ++i) {
    const float* r = &t[(i * 3 + 0) * plane];
    const float* g = &t[(i * 3 + 1) * plane];
    const float* b = &t[(i * 3 + 2) * plane];
    float* dst = &out[i * plane];
    for (std::size_t p = 0; p < plane; ++p)
      dst[p] = 0.299f * r[p] + 0.587f * g[p] + 0.114f * b[p];
  }
  return out;
}

Tensor<float> replicate_t(const Tensor<float>& t) {
  const std::size_t n = t.dim(0), h = t.dim(2), w = t.dim(3);
  Tensor<float> out({n, 3, h, w});
  const std::size_t plane = h * w;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t p = 0; p < plane; ++p)
        out[(i * 3 + c) * plane + p] = t[i * plane + p];
  return out;
}

Tensor<float> resize_t(const Tensor<float>& t, std::size_t ho,
                       std::size_t wo) {
  const std::size_t n = t.dim(0), c = t.dim(1);
  const std::size_t hin = t.dim(2), win = t.dim(3);
  if (hin == ho && win == wo) return t;

  const float sy = float(hin) / float(ho);
  const float sx = float(win) / float(wo);
  Tensor<float> out({n, c, ho, wo});
  for (std::size_t img = 0; img < n; ++img) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const float* src = &t[(img * c + ch) * hin * win];
      float* dst = &out[(img * c + ch) * ho * wo];
      for (std::size_t y = 0; y < ho; ++y) {
        // Half-pixel centers: sample at (y + 0.5) * scale - 0.5, clamped.
        float fy = (float(y) + 0.5f) * sy - 0.5f;
        fy = std::clamp(fy, 0.0f, float(hin - 1));
        const std::size_t y0 = std::size_t(fy);
        const std::size_t y1 = std::min(y0 + 1, hin - 1);
        const float wy = fy - float(y0);
        for (std::size_t x = 0; x < wo; ++x) {
          float fx = (float(x) + 0.5f) * sx - 0.5f;
          fx = std::clamp(fx, 0.0f, float(win - 1));
          const std::size_t x0 = std::size_t(fx);
          const std::size_t x1 = std::min(x0 + 1, win - 1);
          const float wx = fx - float(x0);
          const float top =
              src[y0 * win + x0] * (1.0f - wx) + src[y0 * win + x1] * wx;
          const float bot =
              src[y1 * win + x0] * (1.0f - wx) + src[y1 * win + x1] * wx;
          // Convex in exact arithmetic; clamp guards float round-off.
          dst[y * wo + x] =
              std::clamp(top * (1.0f - wy) + bot * wy, -1.0f, 1.0f);
        }
      }
    }
  }
  return out;
}

}  // namespace

ImageBatch to_grayscale(const ImageBatch& batch) {
  if (batch.channels() != 3)
    throw ShapeError("to_grayscale expects 3 channels, got " +
                     std::to_string(batch.channels()));
  return make_image_batch(gray_t(batch.data), batch.tag);
}

ImageBatch replicate_channels(const ImageBatch& batch) {
  if (batch.channels() != 1)
    throw ShapeError("replicate_channels expects 1 channel, got " +
                     std::to_string(batch.channels()));
  return make_image_batch(replicate_t(batch.data), batch.tag);
}

ImageBatch resize_bilinear(const ImageBatch& batch, std::size_t target_size) {
  if (target_size == 0)
    throw ArgumentError("resize_bilinear: target size must be positive");
  return make_image_batch(resize_t(batch.data, target_size, target_size),
                          batch.tag);
}

Tensor<float> png_to_tensor(const PngImage& img) {
  const std::size_t c = img.channels, h = img.height, w = img.width;
  Tensor<float> t({1, c, h, w});
  // Interleaved rows -> planar channels, u8 -> [-1, 1].
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t ch = 0; ch < c; ++ch)
        t[(ch * h + y) * w + x] =
            float(img.pixels[(y * w + x) * c + ch]) / 127.5f - 1.0f;
  return t;
}

PngImage image_to_png(const ImageBatch& batch, std::size_t index) {
  if (index >= batch.count())
    throw ArgumentError("image_to_png: index " + std::to_string(index) +
                              " out of range for batch of " +
                              std::to_string(batch.count()));
  const std::size_t c = batch.channels(), h = batch.height(),
                    w = batch.width();
  PngImage img;
  img.width = w;
  img.height = h;
  img.channels = c;
  img.pixels.resize(w * h * c);
  const float* base = &batch.data[index * c * h * w];
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t ch = 0; ch < c; ++ch) {
        const float v = (base[(ch * h + y) * w + x] + 1.0f) * 127.5f;
        const long q = std::lround(v);
        img.pixels[(y * w + x) * c + ch] =
            std::uint8_t(q < 0 ? 0 : (q > 255 ? 255 : q));
      }
  return img;
}

DirLoadResult load_image_dir(const std::string& dir, std::size_t target_size,
                             bool grayscale, DomainTag tag) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw IoError(dir + " is not a directory");
  if (target_size == 0)
    throw ArgumentError("load_image_dir: target size must be positive");

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) names.push_back(entry.path().string());
  std::sort(names.begin(), names.end());

  DirLoadResult result;
  const std::size_t c = grayscale ? 1 : 3;
  std::vector<Tensor<float>> rows;
  for (const auto& name : names) {
    PngImage png;
    try {
      png = read_png(name);
    } catch (const Error&) {
      result.skipped.push_back(name);
      continue;
    }
    Tensor<float> one = png_to_tensor(png);
    if (grayscale && one.dim(1) == 3) one = gray_t(one);
    if (!grayscale && one.dim(1) == 1) one = replicate_t(one);
    one = resize_t(one, target_size, target_size);
    rows.push_back(std::move(one));
  }
  if (rows.empty())
    throw EmptyDatasetError("no decodable images in " + dir);

  Tensor<float> stacked({rows.size(), c, target_size, target_size});
  const std::size_t stride = c * target_size * target_size;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < stride; ++j)
      stacked[i * stride + j] = rows[i][j];
  result.batch = make_image_batch(std::move(stacked), tag);
  return result;
}

}  // namespace mixgan::data
