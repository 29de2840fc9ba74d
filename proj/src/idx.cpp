#include "mixgan/data/idx.hpp"

#include <cstdio>
#include <fstream>

#include "mixgan/data/image_ops.hpp"

namespace mixgan::data {

namespace {

std::uint32_t read_u32be(std::istream& in, const std::string& path,
                         std::size_t offset) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw FormatError(path + ": truncated while reading u32 at byte offset " +
                      std::to_string(offset));
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_u32be(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

}  // namespace

IdxHeader read_idx_header(const std::string& path) {
  std::ifstream in = open_input(path);
  IdxHeader h;
  h.magic = read_u32be(in, path, 0);
  // Rank is encoded in the magic's low byte.
  const unsigned rank = h.magic & 0xFF;
  if (rank == 0 || rank > 8)
    throw FormatError(path + ": implausible IDX magic 0x" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%08x", h.magic);
      return std::string(buf);
    }());
  for (unsigned i = 0; i < rank; ++i)
    h.dims.push_back(read_u32be(in, path, 4 + 4 * i));
  return h;
}

IdxImages load_idx_raw(const std::string& path) {
  std::ifstream in = open_input(path);
  const std::uint32_t magic = read_u32be(in, path, 0);
  if (magic != kIdxImagesMagic) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", magic);
    throw FormatError(path + ": bad IDX image magic 0x" + buf +
                      " (want 0x00000803)");
  }
  IdxImages img;
  img.count = read_u32be(in, path, 4);
  img.rows = read_u32be(in, path, 8);
  img.cols = read_u32be(in, path, 12);
  const std::size_t total = img.count * img.rows * img.cols;
  img.pixels.resize(total);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(total));
  const std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != total)
    throw FormatError(path + ": truncated payload at byte offset " +
                      std::to_string(16 + got) + " (expected " +
                      std::to_string(16 + total) + " bytes)");
  return img;
}

void save_idx_raw(const std::string& path, const IdxImages& images) {
  if (images.pixels.size() != images.count * images.rows * images.cols)
    throw ArgumentError("save_idx_raw: pixel buffer does not match dims");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  write_u32be(out, kIdxImagesMagic);
  write_u32be(out, static_cast<std::uint32_t>(images.count));
  write_u32be(out, static_cast<std::uint32_t>(images.rows));
  write_u32be(out, static_cast<std::uint32_t>(images.cols));
  out.write(reinterpret_cast<const char*>(images.pixels.data()),
            static_cast<std::streamsize>(images.pixels.size()));
  if (!out) throw IoError("write failed for " + path);
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
  std::ifstream in = open_input(path);
  const std::uint32_t magic = read_u32be(in, path, 0);
  if (magic != kIdxLabelsMagic)
    throw FormatError(path + ": bad IDX label magic");
  const std::size_t n = read_u32be(in, path, 4);
  std::vector<std::uint8_t> labels(n);
  in.read(reinterpret_cast<char*>(labels.data()),
          static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw FormatError(path + ": truncated label payload at byte offset " +
                      std::to_string(8 + in.gcount()));
  return labels;
}

void save_idx_labels(const std::string& path,
                     const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  write_u32be(out, kIdxLabelsMagic);
  write_u32be(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  if (!out) throw IoError("write failed for " + path);
}

ImageBatch load_idx(const std::string& path, DomainTag tag) {
  const IdxImages img = load_idx_raw(path);
  Tensor<float> t({img.count, 1, img.rows, img.cols});
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    t[i] = static_cast<float>(img.pixels[i]) / 127.5f - 1.0f;
  return make_image_batch(std::move(t), tag);
}

IdxImages to_idx_images(const ImageBatch& batch) {
  const ImageBatch* src = &batch;
  ImageBatch gray;
  if (batch.channels() == 3) {
    gray = to_grayscale(batch);
    src = &gray;
  }
  IdxImages img;
  img.count = src->count();
  img.rows = src->height();
  img.cols = src->width();
  img.pixels.resize(img.count * img.rows * img.cols);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const float v = (src->data[i] + 1.0f) * 127.5f;
    const long q = std::lround(v);
    img.pixels[i] = static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
  }
  return img;
}

}  // namespace mixgan::data
