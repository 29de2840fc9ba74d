#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "mixgan/core/error.hpp"

namespace mixgan::nets {

// How the mixture decoder combines its activations with pyramid features:
// channel concatenation, or elementwise addition (broadcast across channels
// when the feature level has a single channel).
enum class Fusion { concat, add };

inline const char* to_string(Fusion f) {
  return f == Fusion::concat ? "concat" : "add";
}

inline Fusion parse_fusion(const std::string& name) {
  if (name == "concat") return Fusion::concat;
  if (name == "add") return Fusion::add;
  throw ArgumentError("unknown fusion mode '" + name +
                      "' (expected concat or add)");
}

// The shared hyperparameters every network topology is derived from.
struct ArchSpec {
  std::size_t image_size = 32;
  std::size_t content_channels = 1;
  std::size_t style_channels = 3;
  std::size_t latent_dim = 64;
  std::size_t base_width = 32;
  Fusion fusion = Fusion::concat;

  void validate() const {
    if (image_size < 16 || (image_size & (image_size - 1)) != 0)
      throw ArgumentError("image_size must be a power of two >= 16, got " +
                          std::to_string(image_size));
    if (latent_dim < 2)
      throw ArgumentError("latent_dim must be >= 2, got " +
                          std::to_string(latent_dim));
    if (base_width < 8)
      throw ArgumentError("base_width must be >= 8, got " +
                          std::to_string(base_width));
    if (content_channels != 1 && content_channels != 3)
      throw ArgumentError("content_channels must be 1 or 3");
    if (style_channels != 1 && style_channels != 3)
      throw ArgumentError("style_channels must be 1 or 3");
  }

  // Spatial side of the grid the content decoder's FC block reshapes to.
  std::size_t fc_grid() const { return image_size / 8; }

  // The pyramid holds the post-activation outputs of the content decoder's
  // three transposed convolutions, coarse to fine.
  std::array<std::size_t, 3> pyramid_sizes() const {
    return {image_size / 4, image_size / 2, image_size};
  }
  std::array<std::size_t, 3> pyramid_channels() const {
    return {base_width * 2, base_width, content_channels};
  }

  // Patch discriminator: enough stride-2 stages to judge patches, never the
  // whole image (receptive field must stay below image_size).
  std::size_t patch_disc_depth() const { return image_size >= 32 ? 3 : 2; }

  // Analytic receptive field of one patch-discriminator output unit:
  // k4 s2 stages followed by the 1x1 head.
  std::size_t patch_receptive_field() const {
    std::size_t r = 1, jump = 1;
    for (std::size_t i = 0; i < patch_disc_depth(); ++i) {
      r += 3 * jump;  // (k - 1) * jump with k = 4
      jump *= 2;
    }
    return r;
  }

  std::size_t patch_map_size() const {
    std::size_t s = image_size;
    for (std::size_t i = 0; i < patch_disc_depth(); ++i) s /= 2;
    return s;
  }

  bool operator==(const ArchSpec&) const = default;
};

}  // namespace mixgan::nets
