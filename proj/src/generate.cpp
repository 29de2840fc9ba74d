#include "mixgan/generate/generate.hpp"

#include <cstdio>
#include <filesystem>
#include <string>

#include "mixgan/core/error.hpp"
#include "mixgan/core/rng.hpp"
#include "mixgan/data/image_ops.hpp"
#include "mixgan/data/png_io.hpp"
#include "mixgan/nets/models.hpp"
#include "mixgan/train/trainer.hpp"

namespace mixgan::gen {

namespace {

nets::Networks<float> networks_from(const train::ModelCheckpoint& ckpt,
                                    const LatentBatch& z) {
  if (z.data.rank() != 2 || z.data.dim(1) != ckpt.arch.latent_dim)
    throw ShapeError("latent batch " + shape_str(z.data.shape()) +
                     " does not match checkpoint latent_dim " +
                     std::to_string(ckpt.arch.latent_dim));
  if (!z.data.all_finite())
    throw NonFiniteError("latent batch has non-finite entries");
  nets::Networks<float> networks(ckpt.arch);
  train::restore_networks(ckpt, networks);
  return networks;
}

}  // namespace

LatentBatch sample_latent(std::size_t n, std::size_t latent_dim,
                          std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sample_latent: n must be >= 1");
  if (latent_dim < 1)
    throw ArgumentError("sample_latent: latent_dim must be >= 1");
  LatentBatch out;
  out.seed = seed;
  out.data = Tensor<float>({n, latent_dim});
  RandomEngine rng(seed);
  rng.fill_normal(out.data.data(), out.data.size());
  return out;
}

data::ImageBatch generate_content(const train::ModelCheckpoint& ckpt,
                                  const LatentBatch& z) {
  nets::Networks<float> networks = networks_from(ckpt, z);
  Tensor<float> image =
      networks.content_decoder.forward(z.data, /*train=*/false).image;
  return data::ImageBatch{std::move(image), data::DomainTag::generated};
}

data::ImageBatch generate_mixture(const train::ModelCheckpoint& ckpt,
                                  const LatentBatch& z) {
  if (ckpt.stage != train::Stage::mixture)
    throw StageError(std::string("generate_mixture needs a mixture-stage "
                                 "checkpoint, got a ") +
                     to_string(ckpt.stage) + "-stage one");
  nets::Networks<float> networks = networks_from(ckpt, z);
  const auto pyramid =
      networks.content_decoder.forward(z.data, /*train=*/false);
  Tensor<float> image =
      networks.mixture_decoder.forward(pyramid.feats, /*train=*/false);
  return data::ImageBatch{std::move(image), data::DomainTag::generated};
}

void export_images(const data::ImageBatch& batch, const std::string& path,
                   std::size_t cols) {
  if (cols < 1) throw ArgumentError("export_images: cols must be >= 1");
  const std::size_t n = batch.count(), c = batch.channels(),
                    s = batch.height();
  const std::size_t rows = (n + cols - 1) / cols;
  data::PngImage grid;
  grid.width = cols * s;
  grid.height = rows * s;
  grid.channels = c;
  grid.pixels.assign(grid.width * grid.height * c, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const data::PngImage cell = data::image_to_png(batch, i);
    const std::size_t y0 = (i / cols) * s, x0 = (i % cols) * s;
    for (std::size_t y = 0; y < s; ++y)
      for (std::size_t x = 0; x < s * c; ++x)
        grid.pixels[((y0 + y) * grid.width + x0) * c + x] =
            cell.pixels[y * s * c + x];
  }
  data::write_png(path, grid);
}

std::vector<std::string> export_images(const data::ImageBatch& batch,
                                       const std::string& dir,
                                       const std::string& prefix) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("export_images: cannot create directory " + dir);
  // Wide enough indices that lexicographic order equals batch order.
  int width = 4;
  for (std::size_t v = batch.count(); v > 9999; v /= 10) ++width;
  std::vector<std::string> paths;
  paths.reserve(batch.count());
  char index[24];
  for (std::size_t i = 0; i < batch.count(); ++i) {
    std::snprintf(index, sizeof index, "%0*zu", width, i);
    std::string path =
        (std::filesystem::path(dir) / (prefix + index + ".png")).string();
    data::write_png(path, data::image_to_png(batch, i));
    paths.push_back(std::move(path));
  }
  return paths;
}

}  // namespace mixgan::gen
