#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixgan/core/tensor.hpp"
#include "mixgan/data/image_batch.hpp"
#include "mixgan/train/checkpoint.hpp"

namespace mixgan::gen {

// Latent draws with their seed kept as provenance.
struct LatentBatch {
  Tensor<float> data;  // (n, latent_dim)
  std::uint64_t seed = 0;

  std::size_t count() const { return data.dim(0); }
  std::size_t latent_dim() const { return data.dim(1); }
};

// i.i.d. standard normal draws; a pure function of (n, latent_dim, seed).
LatentBatch sample_latent(std::size_t n, std::size_t latent_dim,
                          std::uint64_t seed);

// Renders the content decoder alone (single-channel). Accepts a checkpoint
// from either stage; batch norm runs on the stored running statistics, so
// the output is independent of how the rows are batched.
data::ImageBatch generate_content(const train::ModelCheckpoint& ckpt,
                                  const LatentBatch& z);

// Renders the full pipeline — mixture decoder over the content decoder's
// pyramid — as a 3-channel batch. Requires a mixture-stage checkpoint.
data::ImageBatch generate_mixture(const train::ModelCheckpoint& ckpt,
                                  const LatentBatch& z);

// Writes the whole batch as one PNG grid with `cols` columns; a ragged last
// row is padded with black cells.
void export_images(const data::ImageBatch& batch, const std::string& path,
                   std::size_t cols);

// Writes one PNG per image as <dir>/<prefix><index>.png with zero-padded
// indices. Returns the paths written, in batch order.
std::vector<std::string> export_images(const data::ImageBatch& batch,
                                       const std::string& dir,
                                       const std::string& prefix);

}  // namespace mixgan::gen
