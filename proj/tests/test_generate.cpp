#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mixgan/data/image_ops.hpp"
#include "mixgan/data/png_io.hpp"
#include "mixgan/data/synthetic.hpp"
#include "mixgan/generate/generate.hpp"
#include "mixgan/train/trainer.hpp"

using namespace mixgan;
namespace tr = mixgan::train;
namespace fs = std::filesystem;

namespace {

nets::ArchSpec tiny_arch() {
  nets::ArchSpec a;
  a.image_size = 16;
  a.latent_dim = 8;
  a.base_width = 8;
  return a;
}

tr::TrainConfig tiny_cfg(tr::Stage stage, std::size_t epochs) {
  tr::TrainConfig c = tr::TrainConfig::defaults(stage);
  c.epochs = epochs;
  c.batch_size = 8;
  c.latent_dim = 8;
  c.seed = 77;
  return c;
}

const tr::ModelCheckpoint& content_ckpt() {
  static tr::ModelCheckpoint ckpt = tr::train_content_stage(
      tiny_arch(), tiny_cfg(tr::Stage::content, 2),
      data::make_shape_corpus(5, 32, 16).batch);
  return ckpt;
}

tr::ModelCheckpoint run_mixture(bool freeze) {
  tr::TrainConfig cfg = tiny_cfg(tr::Stage::mixture, 1);
  cfg.freeze_content_decoder = freeze;
  return tr::train_mixture_stage(cfg, content_ckpt(),
                                 data::make_style_corpus(6, 16, 16).batch);
}

const tr::ModelCheckpoint& mixture_ckpt(bool freeze) {
  static tr::ModelCheckpoint tuned = run_mixture(false);
  static tr::ModelCheckpoint frozen = run_mixture(true);
  return freeze ? frozen : tuned;
}

bool same_bits(const Tensor<float>& a, const Tensor<float>& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("sample_latent is deterministic standard normal") {
  const gen::LatentBatch a = gen::sample_latent(64, 8, 123);
  CHECK(a.count() == 64);
  CHECK(a.latent_dim() == 8);
  CHECK(a.seed == 123);
  CHECK(a.data.all_finite());
  CHECK(same_bits(a.data, gen::sample_latent(64, 8, 123).data));
  CHECK_FALSE(same_bits(a.data, gen::sample_latent(64, 8, 124).data));

  CHECK_THROWS_AS(gen::sample_latent(0, 8, 1), ArgumentError);
  CHECK_THROWS_AS(gen::sample_latent(4, 0, 1), ArgumentError);

  // Law of large numbers at n = 1e5: per-dimension moments close to (0, 1).
  const std::size_t n = 100000, d = 8;
  const gen::LatentBatch big = gen::sample_latent(n, d, 20260822);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += big.data[i * d + j];
    mean /= double(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = big.data[i * d + j] - mean;
      var += c * c;
    }
    var /= double(n - 1);
    INFO("dimension ", j);
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.02);
  }
}

TEST_CASE("generate_content renders from either stage's checkpoint") {
  const gen::LatentBatch z = gen::sample_latent(6, 8, 9);
  const data::ImageBatch out = gen::generate_content(content_ckpt(), z);
  CHECK(out.tag == data::DomainTag::generated);
  REQUIRE(out.data.shape() == Shape{6, 1, 16, 16});
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    CHECK(out.data[i] >= -1.0f);
    CHECK(out.data[i] <= 1.0f);
  }

  // Pure function of (ckpt, z).
  CHECK(same_bits(out.data, gen::generate_content(content_ckpt(), z).data));

  // Identical latent rows give identical images.
  gen::LatentBatch twin = z;
  const std::size_t L = twin.latent_dim();
  for (std::size_t j = 0; j < L; ++j) twin.data[1 * L + j] = twin.data[j];
  const data::ImageBatch tw = gen::generate_content(content_ckpt(), twin);
  const std::size_t px = 16 * 16;
  CHECK(std::memcmp(tw.data.data(), tw.data.data() + px,
                    px * sizeof(float)) == 0);

  // Running-stats batch norm makes the output batch-size independent.
  gen::LatentBatch head;
  head.data = Tensor<float>({2, L});
  for (std::size_t i = 0; i < head.data.size(); ++i) head.data[i] = z.data[i];
  const data::ImageBatch small = gen::generate_content(content_ckpt(), head);
  CHECK(std::memcmp(small.data.data(), out.data.data(),
                    2 * px * sizeof(float)) == 0);

  // Mixture checkpoints still carry the content decoder.
  const data::ImageBatch from_mix =
      gen::generate_content(mixture_ckpt(false), z);
  CHECK(from_mix.data.shape() == Shape{6, 1, 16, 16});

  CHECK_THROWS_AS(gen::generate_content(content_ckpt(),
                                        gen::sample_latent(3, 16, 1)),
                  ShapeError);
  gen::LatentBatch poisoned = z;
  poisoned.data[0] = std::nanf("");
  CHECK_THROWS_AS(gen::generate_content(content_ckpt(), poisoned),
                  NonFiniteError);
}

TEST_CASE("generate_mixture requires a mixture checkpoint and shares z") {
  const gen::LatentBatch z = gen::sample_latent(5, 8, 31);
  const data::ImageBatch out = gen::generate_mixture(mixture_ckpt(false), z);
  CHECK(out.tag == data::DomainTag::generated);
  REQUIRE(out.data.shape() == Shape{5, 3, 16, 16});
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    CHECK(out.data[i] >= -1.0f);
    CHECK(out.data[i] <= 1.0f);
  }
  CHECK(same_bits(out.data,
                  gen::generate_mixture(mixture_ckpt(false), z).data));

  CHECK_THROWS_AS(gen::generate_mixture(content_ckpt(), z), StageError);
  CHECK_THROWS_AS(gen::generate_mixture(mixture_ckpt(false),
                                        gen::sample_latent(3, 16, 1)),
                  ShapeError);
}

TEST_CASE("a frozen mixture checkpoint renders content bit-for-bit") {
  const gen::LatentBatch z = gen::sample_latent(8, 8, 55);
  const data::ImageBatch from_stage1 = gen::generate_content(content_ckpt(), z);
  const data::ImageBatch from_frozen =
      gen::generate_content(mixture_ckpt(true), z);
  CHECK(same_bits(from_stage1.data, from_frozen.data));

  // Without the freeze the content decoder kept training, so it moved.
  const data::ImageBatch from_tuned =
      gen::generate_content(mixture_ckpt(false), z);
  CHECK_FALSE(same_bits(from_stage1.data, from_tuned.data));
}

TEST_CASE("export_images writes grids and individual files") {
  TempDir dir("tmp_generate_out");

  // A 3x3 grid of 4x4 grayscale ramps.
  Tensor<float> ramp({9, 1, 4, 4});
  for (std::size_t i = 0; i < ramp.size(); ++i)
    ramp[i] = -1.0f + 2.0f * float(i) / float(ramp.size() - 1);
  const data::ImageBatch batch{ramp, data::DomainTag::generated};
  const std::string grid_path = (dir.path / "grid.png").string();
  gen::export_images(batch, grid_path, 3);
  const data::PngImage grid = data::read_png(grid_path);
  CHECK(grid.width == 12);
  CHECK(grid.height == 12);
  CHECK(grid.channels == 1);
  // Top-left cell equals the first image's own quantization.
  const data::PngImage first = data::image_to_png(batch, 0);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 4; ++x)
      CHECK(grid.pixels[y * 12 + x] == first.pixels[y * 4 + x]);

  // All-(-1) batches quantize to all-zero bytes, and a ragged last row is
  // padded with the same black.
  Tensor<float> dark({5, 1, 4, 4});
  dark.fill(-1.0f);
  const std::string dark_path = (dir.path / "dark.png").string();
  gen::export_images({dark, data::DomainTag::generated}, dark_path, 3);
  const data::PngImage darkpng = data::read_png(dark_path);
  CHECK(darkpng.width == 12);
  CHECK(darkpng.height == 8);
  for (const std::uint8_t p : darkpng.pixels) CHECK(p == 0);

  // RGB batches stay RGB.
  const data::StyleCorpus style = data::make_style_corpus(2, 4, 16);
  const std::string rgb_path = (dir.path / "rgb.png").string();
  gen::export_images(style.batch, rgb_path, 2);
  const data::PngImage rgb = data::read_png(rgb_path);
  CHECK(rgb.channels == 3);
  CHECK(rgb.width == 32);
  CHECK(rgb.height == 32);

  // Individual export: one decodable file per image, quantization-exact
  // round trip through the loader.
  const auto paths =
      gen::export_images(batch, (dir.path / "singles").string(), "img");
  REQUIRE(paths.size() == 9);
  CHECK(fs::path(paths[0]).filename() == "img0000.png");
  CHECK(fs::path(paths[8]).filename() == "img0008.png");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const Tensor<float> back =
        data::png_to_tensor(data::read_png(paths[i]));
    REQUIRE(back.shape() == Shape{1, 1, 4, 4});
    for (std::size_t j = 0; j < back.size(); ++j)
      CHECK(std::abs(back[j] - ramp[i * 16 + j]) <= 1.0f / 127.5f);
  }

  CHECK_THROWS_AS(gen::export_images(batch, grid_path, 0), ArgumentError);
  CHECK_THROWS_AS(
      gen::export_images(batch, (dir.path / "missing" / "x.png").string(), 3),
      IoError);
  // A regular file where the directory should go.
  std::ofstream(dir.path / "blocked") << "x";
  CHECK_THROWS_AS(
      gen::export_images(batch, (dir.path / "blocked").string(), "img"),
      IoError);
}
