#include "mixgan/data/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "mixgan/core/rng.hpp"
#include "mixgan/data/color.hpp"

namespace mixgan::data {


namespace {

constexpr double kPi = 3.14159265358979323846;

// Balanced labels: i % 4 gives exact class counts, the seeded shuffle
// decorrelates label from corpus position.
std::vector<std::uint8_t> balanced_labels(std::uint64_t seed,
                                          std::size_t count) {
  std::vector<std::uint8_t> labels(count);
  for (std::size_t i = 0; i < count; ++i)
    labels[i] = std::uint8_t(i % 4);
  RandomEngine rng(seed);
  rng.shuffle(labels);
  return labels;
}

struct Pose {
  double cx, cy;     // center, pixels
  double r;          // characteristic radius, pixels
  double theta;      // rotation, radians
};

Pose sample_pose(RandomEngine& rng, std::size_t size) {
  Pose p;
  p.cx = rng.uniform(0.32, 0.68) * double(size);
  p.cy = rng.uniform(0.32, 0.68) * double(size);
  p.r = rng.uniform(0.22, 0.36) * double(size);
  p.theta = rng.uniform(0.0, 2.0 * kPi);
  return p;
}

// Rotates (x, y) into the shape frame: translated to the center and turned
// back by theta, scaled so the characteristic radius is 1.
void to_local(const Pose& p, double x, double y, double& lx, double& ly) {
  const double dx = x - p.cx, dy = y - p.cy;
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  lx = (c * dx + s * dy) / p.r;
  ly = (-s * dx + c * dy) / p.r;
}

bool inside_shape(int shape, const Pose& p, double x, double y) {
  double lx, ly;
  to_local(p, x, y, lx, ly);
  const double rad = std::sqrt(lx * lx + ly * ly);
  switch (shape) {
    case 0:  // circle
      return rad <= 1.0;
    case 1:  // square (inscribed so its area is comparable to the circle)
      return std::max(std::fabs(lx), std::fabs(ly)) <= 0.82;
    case 2: {  // equilateral triangle, circumradius 1
      // Half-plane tests against the three edges.
      for (int k = 0; k < 3; ++k) {
        const double a0 = 2.0 * kPi * k / 3.0;
        const double a1 = 2.0 * kPi * (k + 1) / 3.0;
        const double x0 = std::cos(a0), y0 = std::sin(a0);
        const double x1 = std::cos(a1), y1 = std::sin(a1);
        const double cross =
            (x1 - x0) * (ly - y0) - (y1 - y0) * (lx - x0);
        if (cross < 0) return false;
      }
      return true;
    }
    case 3:  // cross: two overlapping bars
      return (std::fabs(lx) <= 0.32 && std::fabs(ly) <= 1.0) ||
             (std::fabs(ly) <= 0.32 && std::fabs(lx) <= 1.0);
  }
  return false;
}

bool inside_pattern(int pattern, const Pose& p, double x, double y) {
  double lx, ly;
  to_local(p, x, y, lx, ly);
  const double rad = std::sqrt(lx * lx + ly * ly);
  switch (pattern) {
    case 0:  // ring
      return rad >= 0.55 && rad <= 1.0;
    case 1:  // three bars
      if (std::fabs(lx) > 0.95) return false;
      for (double yk : {-0.62, 0.0, 0.62})
        if (std::fabs(ly - yk) <= 0.14) return true;
      return false;
    case 2: {  // three dots on a circle
      for (int k = 0; k < 3; ++k) {
        const double a = 2.0 * kPi * k / 3.0;
        const double dx = lx - 0.58 * std::cos(a);
        const double dy = ly - 0.58 * std::sin(a);
        if (dx * dx + dy * dy <= 0.30 * 0.30) return true;
      }
      return false;
    }
    case 3:  // hollow square frame
      return std::max(std::fabs(lx), std::fabs(ly)) >= 0.58 &&
             std::max(std::fabs(lx), std::fabs(ly)) <= 1.0;
  }
  return false;
}

float to_signed(double v01) { return float(v01 * 2.0 - 1.0); }

}  // namespace

ShapeCorpus make_shape_corpus(std::uint64_t seed, std::size_t count,
                              std::size_t size) {
  if (count == 0) throw ArgumentError("shape corpus: count must be positive");
  if (size < 8) throw ArgumentError("shape corpus: size must be at least 8");

  ShapeCorpus corpus;
  corpus.labels = balanced_labels(derive_seed(seed, 0xC0, 1), count);
  Tensor<float> data({count, 1, size, size});
  for (std::size_t i = 0; i < count; ++i) {
    RandomEngine rng(derive_seed(seed, i, size));
    const Pose pose = sample_pose(rng, size);
    const int shape = corpus.labels[i];
    float* img = &data[i * size * size];
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x)
        img[y * size + x] =
            inside_shape(shape, pose, double(x) + 0.5, double(y) + 0.5)
                ? 1.0f
                : -1.0f;
  }
  corpus.batch = make_image_batch(std::move(data), DomainTag::content);
  return corpus;
}

StyleCorpus make_style_corpus(std::uint64_t seed, std::size_t count,
                              std::size_t size) {
  if (count == 0) throw ArgumentError("style corpus: count must be positive");
  if (size < 8) throw ArgumentError("style corpus: size must be at least 8");

  StyleCorpus corpus;
  corpus.pattern_labels =
      balanced_labels(derive_seed(seed, 0xC0, 2), count);
  corpus.color_labels =
      balanced_labels(derive_seed(seed, 0xC0, 3), count);
  Tensor<float> data({count, 3, size, size});
  const std::size_t plane = size * size;
  for (std::size_t i = 0; i < count; ++i) {
    RandomEngine rng(derive_seed(seed, i, size + 1));
    const Pose pose = sample_pose(rng, size);
    const int pattern = corpus.pattern_labels[i];
    const Rgb fg = palette()[corpus.color_labels[i]].rgb;
    float* img = &data[i * 3 * plane];
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x) {
        const std::size_t px = y * size + x;
        if (inside_pattern(pattern, pose, double(x) + 0.5, double(y) + 0.5)) {
          // Saturated palette color with mild per-pixel jitter.
          const double jr = rng.uniform(-0.05, 0.05);
          const double jg = rng.uniform(-0.05, 0.05);
          const double jb = rng.uniform(-0.05, 0.05);
          img[0 * plane + px] = to_signed(std::clamp(fg.r + jr, 0.0, 1.0));
          img[1 * plane + px] = to_signed(std::clamp(fg.g + jg, 0.0, 1.0));
          img[2 * plane + px] = to_signed(std::clamp(fg.b + jb, 0.0, 1.0));
        } else {
          // Near-black ground with a touch of gray noise.
          const double bg = rng.uniform(0.02, 0.07);
          img[0 * plane + px] = to_signed(bg);
          img[1 * plane + px] = to_signed(bg);
          img[2 * plane + px] = to_signed(bg);
        }
      }
  }
  corpus.batch = make_image_batch(std::move(data), DomainTag::style);
  return corpus;
}

}  // namespace mixgan::data
