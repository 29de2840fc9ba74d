#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mixgan/data/image_batch.hpp"

namespace mixgan::data {

// Colors in [0, 1] per channel (independent of the [-1, 1] image encoding).
struct Rgb {
  float r = 0, g = 0, b = 0;
};

// h in degrees [0, 360); s, v in [0, 1]. h is 0 when s is 0.
struct Hsv {
  float h = 0, s = 0, v = 0;
};

inline Hsv rgb_to_hsv(const Rgb& c) {
  const float mx = std::max(c.r, std::max(c.g, c.b));
  const float mn = std::min(c.r, std::min(c.g, c.b));
  const float d = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0 ? d / mx : 0.0f;
  if (d > 0) {
    if (mx == c.r)
      out.h = 60.0f * std::fmod((c.g - c.b) / d + 6.0f, 6.0f);
    else if (mx == c.g)
      out.h = 60.0f * ((c.b - c.r) / d + 2.0f);
    else
      out.h = 60.0f * ((c.r - c.g) / d + 4.0f);
  }
  return out;
}

inline float hue_distance(float a, float b) {
  const float d = std::fabs(a - b);
  return std::min(d, 360.0f - d);
}

// The style palette: saturated primaries whose hues are far apart, so that
// a nearest-hue vote is unambiguous even under per-pixel noise.
struct PaletteColor {
  const char* name;
  Rgb rgb;
  float hue;  // degrees
};

inline const std::array<PaletteColor, 4>& palette() {
  static const std::array<PaletteColor, 4> kPalette = {{
      {"red", {0.95f, 0.10f, 0.10f}, 0.0f},
      {"green", {0.10f, 0.85f, 0.15f}, 124.0f},
      {"blue", {0.15f, 0.25f, 0.95f}, 232.5f},
      {"yellow", {0.95f, 0.85f, 0.10f}, 52.9f},
  }};
  return kPalette;
}

inline int nearest_palette_hue(float hue) {
  int best = 0;
  float best_d = hue_distance(hue, palette()[0].hue);
  for (int i = 1; i < int(palette().size()); ++i) {
    const float d = hue_distance(hue, palette()[std::size_t(i)].hue);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Brightness in [0, 1] of one pixel of image `index`: the max channel
// mapped out of the [-1, 1] encoding. Single-channel images use the pixel
// value directly.
inline float value01(const ImageBatch& batch, std::size_t index,
                     std::size_t y, std::size_t x) {
  const std::size_t c = batch.channels(), h = batch.height(),
                    w = batch.width();
  float mx = -1.0f;
  for (std::size_t ch = 0; ch < c; ++ch)
    mx = std::max(mx, batch.data[((index * c + ch) * h + y) * w + x]);
  return (mx + 1.0f) * 0.5f;
}

// Foreground = pixels brighter than mid-gray, row-major h*w bytes of 0/1.
inline std::vector<std::uint8_t> foreground_mask(const ImageBatch& batch,
                                                 std::size_t index) {
  const std::size_t h = batch.height(), w = batch.width();
  std::vector<std::uint8_t> mask(h * w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      mask[y * w + x] = value01(batch, index, y, x) > 0.5f ? 1 : 0;
  return mask;
}

// Intersection-over-union of two equal-sized binary masks. Two empty masks
// count as perfectly overlapping.
inline double mask_iou(const std::vector<std::uint8_t>& a,
                       const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size())
    throw ShapeError("mask_iou: mask sizes differ");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]) ? 1 : 0;
    uni += (a[i] || b[i]) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : double(inter) / double(uni);
}

inline Rgb pixel_rgb(const ImageBatch& batch, std::size_t index,
                     std::size_t y, std::size_t x) {
  const std::size_t c = batch.channels(), h = batch.height(),
                    w = batch.width();
  const auto get = [&](std::size_t ch) {
    return (batch.data[((index * c + ch) * h + y) * w + x] + 1.0f) * 0.5f;
  };
  if (c == 1) {
    const float v = get(0);
    return Rgb{v, v, v};
  }
  return Rgb{get(0), get(1), get(2)};
}

// Majority palette color over saturated, bright foreground pixels of image
// `index`. Returns the palette slot, or -1 when no pixel qualifies (e.g. a
// grayscale image, whose pixels have zero saturation).
inline int dominant_palette_color(const ImageBatch& batch, std::size_t index,
                                  float min_saturation = 0.3f,
                                  float min_value = 0.3f) {
  const std::size_t h = batch.height(), w = batch.width();
  std::array<std::size_t, 4> votes = {0, 0, 0, 0};
  std::size_t total = 0;
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const Hsv hsv = rgb_to_hsv(pixel_rgb(batch, index, y, x));
      if (hsv.s < min_saturation || hsv.v < min_value) continue;
      ++votes[std::size_t(nearest_palette_hue(hsv.h))];
      ++total;
    }
  if (total == 0) return -1;
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (votes[std::size_t(i)] > votes[std::size_t(best)]) best = i;
  return best;
}

}  // namespace mixgan::data
