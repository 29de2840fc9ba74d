#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "mixgan/core/rng.hpp"
#include "mixgan/nets/arch.hpp"
#include "mixgan/nets/layers.hpp"

namespace mixgan::nets {

template <typename T>
using ParamRegistry = std::vector<std::pair<std::string, Param<T>*>>;

namespace detail {

template <typename T>
void collect_into(Sequential<T>& seq, const std::string& prefix,
                  ParamRegistry<T>& params, ParamRegistry<T>& buffers) {
  std::vector<Param<T>*> p;
  seq.collect_params(p);
  for (auto* param : p) params.emplace_back(prefix + param->name, param);
  std::vector<Buffer<T>*> b;
  seq.collect_buffers(b);
  for (auto* buf : b) buffers.emplace_back(prefix + buf->name, buf);
}

}  // namespace detail

// Encoder E_n: mirror of the content decoder. Three stride-2 convolutions
// down to the (base_width*4, s, s) grid, then three fully connected layers
// to the unbounded latent code.
template <typename T>
class Encoder {
 public:
  explicit Encoder(const ArchSpec& a) : arch_(a) {
    const std::size_t s = a.fc_grid(), bw = a.base_width;
    body_.template add<Conv2d<T>>("conv1", a.content_channels, bw, 4, 2, 1);
    body_.template add<BatchNorm<T>>("bn1", bw);
    body_.template add<ReLU<T>>();
    body_.template add<Conv2d<T>>("conv2", bw, bw * 2, 4, 2, 1);
    body_.template add<BatchNorm<T>>("bn2", bw * 2);
    body_.template add<ReLU<T>>();
    body_.template add<Conv2d<T>>("conv3", bw * 2, bw * 4, 4, 2, 1);
    body_.template add<BatchNorm<T>>("bn3", bw * 4);
    body_.template add<ReLU<T>>();
    body_.template add<Reshape<T>>(Shape{bw * 4 * s * s});
    body_.template add<Dense<T>>("fc1", bw * 4 * s * s, 512);
    body_.template add<BatchNorm<T>>("bn4", 512);
    body_.template add<ReLU<T>>();
    body_.template add<Dense<T>>("fc2", 512, 256);
    body_.template add<BatchNorm<T>>("bn5", 256);
    body_.template add<ReLU<T>>();
    body_.template add<Dense<T>>("fc3", 256, a.latent_dim);
  }

  // (n, content_channels, S, S) -> (n, latent_dim), no output activation.
  Tensor<T> forward(const Tensor<T>& x, bool train) {
    require_rank(x, 4, "encoder input");
    if (x.dim(1) != arch_.content_channels || x.dim(2) != arch_.image_size ||
        x.dim(3) != arch_.image_size)
      throw ShapeError("encoder: expected (n," +
                       std::to_string(arch_.content_channels) + "," +
                       std::to_string(arch_.image_size) + "," +
                       std::to_string(arch_.image_size) + "), got " +
                       shape_str(x.shape()));
    return body_.forward(x, train);
  }

  Tensor<T> backward(const Tensor<T>& dz) { return body_.backward(dz); }

  void collect(const std::string& prefix, ParamRegistry<T>& params,
               ParamRegistry<T>& buffers) {
    detail::collect_into(body_, prefix, params, buffers);
  }

 private:
  ArchSpec arch_;
  Sequential<T> body_;
};

// Content decoder G_c: three FC layers up to a (base_width*4, s, s) grid,
// then three transposed convolutions to the content image. The pyramid is
// the post-activation output of each transposed convolution, coarse to
// fine — the last entry is the tanh image itself.
template <typename T>
class ContentDecoder {
 public:
  struct Output {
    Tensor<T> image;                  // (n, content_channels, S, S)
    std::array<Tensor<T>, 3> feats;   // sizes S/4, S/2, S
  };

  explicit ContentDecoder(const ArchSpec& a) : arch_(a) {
    const std::size_t s = a.fc_grid(), bw = a.base_width;
    fc_.template add<Dense<T>>("fc1", a.latent_dim, 256);
    fc_.template add<BatchNorm<T>>("bn1", 256);
    fc_.template add<ReLU<T>>();
    fc_.template add<Dense<T>>("fc2", 256, 512);
    fc_.template add<BatchNorm<T>>("bn2", 512);
    fc_.template add<ReLU<T>>();
    fc_.template add<Dense<T>>("fc3", 512, bw * 4 * s * s);
    fc_.template add<Reshape<T>>(Shape{bw * 4, s, s});
    fc_.template add<BatchNorm<T>>("bn3", bw * 4);
    fc_.template add<ReLU<T>>();
    block1_.template add<ConvT2d<T>>("tconv1", bw * 4, bw * 2, 4, 2, 1);
    block1_.template add<BatchNorm<T>>("tbn1", bw * 2);
    block1_.template add<ReLU<T>>();
    block2_.template add<ConvT2d<T>>("tconv2", bw * 2, bw, 4, 2, 1);
    block2_.template add<BatchNorm<T>>("tbn2", bw);
    block2_.template add<ReLU<T>>();
    block3_.template add<ConvT2d<T>>("tconv3", bw, a.content_channels, 4, 2,
                                     1);
    block3_.template add<Tanh<T>>();
  }

  Output forward(const Tensor<T>& z, bool train) {
    require_rank(z, 2, "content decoder input");
    if (z.dim(1) != arch_.latent_dim)
      throw ShapeError("content decoder: expected latent_dim " +
                       std::to_string(arch_.latent_dim) + ", got " +
                       std::to_string(z.dim(1)));
    const Tensor<T> h = fc_.forward(z, train);
    Output out;
    out.feats[0] = block1_.forward(h, train);
    out.feats[1] = block2_.forward(out.feats[0], train);
    out.feats[2] = block3_.forward(out.feats[1], train);
    out.image = out.feats[2];
    return out;
  }

  // dz from the image gradient plus optional per-level pyramid gradients
  // (empty tensors are treated as zero).
  Tensor<T> backward(const Tensor<T>& dimage,
                     const std::array<Tensor<T>, 3>* dfeats = nullptr) {
    Tensor<T> g2 = dimage;
    if (dfeats && !(*dfeats)[2].empty()) {
      for (std::size_t i = 0; i < g2.size(); ++i) g2[i] += (*dfeats)[2][i];
    }
    Tensor<T> g1 = block3_.backward(g2);
    if (dfeats && !(*dfeats)[1].empty()) {
      for (std::size_t i = 0; i < g1.size(); ++i) g1[i] += (*dfeats)[1][i];
    }
    Tensor<T> g0 = block2_.backward(g1);
    if (dfeats && !(*dfeats)[0].empty()) {
      for (std::size_t i = 0; i < g0.size(); ++i) g0[i] += (*dfeats)[0][i];
    }
    const Tensor<T> dh = block1_.backward(g0);
    return fc_.backward(dh);
  }

  void collect(const std::string& prefix, ParamRegistry<T>& params,
               ParamRegistry<T>& buffers) {
    detail::collect_into(fc_, prefix, params, buffers);
    detail::collect_into(block1_, prefix, params, buffers);
    detail::collect_into(block2_, prefix, params, buffers);
    detail::collect_into(block3_, prefix, params, buffers);
  }

 private:
  ArchSpec arch_;
  Sequential<T> fc_, block1_, block2_, block3_;
};

namespace detail {

// Channel fusion for the mixture decoder. concat stacks channels; add sums
// them, broadcasting a single-channel feature across all channels of h.
template <typename T>
Tensor<T> fuse(const Tensor<T>& h, const Tensor<T>& f, Fusion mode) {
  const std::size_t n = h.dim(0), ch = h.dim(1), cf = f.dim(1);
  const std::size_t sp = h.dim(2) * h.dim(3);
  if (f.dim(0) != n || f.dim(2) != h.dim(2) || f.dim(3) != h.dim(3))
    throw ShapeError("fuse: activation " + shape_str(h.shape()) +
                     " and feature " + shape_str(f.shape()) +
                     " do not align");
  if (mode == Fusion::concat) {
    Tensor<T> out({n, ch + cf, h.dim(2), h.dim(3)});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < ch; ++c)
        for (std::size_t j = 0; j < sp; ++j)
          out[((i * (ch + cf)) + c) * sp + j] = h[(i * ch + c) * sp + j];
      for (std::size_t c = 0; c < cf; ++c)
        for (std::size_t j = 0; j < sp; ++j)
          out[((i * (ch + cf)) + ch + c) * sp + j] = f[(i * cf + c) * sp + j];
    }
    return out;
  }
  if (cf != ch && cf != 1)
    throw ShapeError("fuse(add): feature channels " + std::to_string(cf) +
                     " incompatible with " + std::to_string(ch));
  Tensor<T> out(h.shape());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < ch; ++c) {
      const std::size_t fc = cf == 1 ? 0 : c;
      for (std::size_t j = 0; j < sp; ++j)
        out[(i * ch + c) * sp + j] =
            h[(i * ch + c) * sp + j] + f[(i * cf + fc) * sp + j];
    }
  return out;
}

// Gradient counterpart of fuse: splits d(fused) into dh and df.
template <typename T>
void unfuse(const Tensor<T>& du, std::size_t ch, std::size_t cf, Fusion mode,
            Tensor<T>& dh, Tensor<T>& df) {
  const std::size_t n = du.dim(0), sp = du.dim(2) * du.dim(3);
  dh = Tensor<T>({n, ch, du.dim(2), du.dim(3)});
  df = Tensor<T>({n, cf, du.dim(2), du.dim(3)});
  if (mode == Fusion::concat) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < ch; ++c)
        for (std::size_t j = 0; j < sp; ++j)
          dh[(i * ch + c) * sp + j] = du[(i * (ch + cf) + c) * sp + j];
      for (std::size_t c = 0; c < cf; ++c)
        for (std::size_t j = 0; j < sp; ++j)
          df[(i * cf + c) * sp + j] = du[(i * (ch + cf) + ch + c) * sp + j];
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < ch; ++c) {
      const std::size_t fc = cf == 1 ? 0 : c;
      for (std::size_t j = 0; j < sp; ++j) {
        const T g = du[(i * ch + c) * sp + j];
        dh[(i * ch + c) * sp + j] = g;
        df[(i * cf + fc) * sp + j] += g;
      }
    }
}

}  // namespace detail

// Mixture decoder G_m: three fused transposed-conv stages walking the
// pyramid up to full resolution, then one plain convolution to the style
// channel count. Stage i consumes its previous activation fused with
// feats[i]; the first stage consumes feats[0] alone.
template <typename T>
class MixtureDecoder {
 public:
  explicit MixtureDecoder(const ArchSpec& a) : arch_(a) {
    const std::size_t bw = a.base_width;
    const std::size_t cw = a.content_channels, sw = a.style_channels;
    const bool cat = a.fusion == Fusion::concat;
    const std::size_t in2 = cat ? bw + bw : bw;
    const std::size_t in3 = cat ? bw + cw : bw;
    block1_.template add<ConvT2d<T>>("tconv1", bw * 2, bw, 4, 2, 1);
    block1_.template add<BatchNorm<T>>("tbn1", bw);
    block1_.template add<ReLU<T>>();
    block2_.template add<ConvT2d<T>>("tconv2", in2, bw, 4, 2, 1);
    block2_.template add<BatchNorm<T>>("tbn2", bw);
    block2_.template add<ReLU<T>>();
    block3_.template add<ConvT2d<T>>("tconv3", in3, bw, 3, 1, 1);
    block3_.template add<BatchNorm<T>>("tbn3", bw);
    block3_.template add<ReLU<T>>();
    head_.template add<Conv2d<T>>("conv4", bw, sw, 3, 1, 1);
    head_.template add<Tanh<T>>();
  }

  Tensor<T> forward(const std::array<Tensor<T>, 3>& feats, bool train) {
    const auto sizes = arch_.pyramid_sizes();
    const auto chans = arch_.pyramid_channels();
    for (std::size_t i = 0; i < 3; ++i) {
      require_rank(feats[i], 4, "pyramid level");
      if (feats[i].dim(1) != chans[i] || feats[i].dim(2) != sizes[i] ||
          feats[i].dim(3) != sizes[i])
        throw ShapeError("mixture decoder: pyramid level " +
                         std::to_string(i) + " is " +
                         shape_str(feats[i].shape()) + ", expected (n," +
                         std::to_string(chans[i]) + "," +
                         std::to_string(sizes[i]) + "," +
                         std::to_string(sizes[i]) + ")");
    }
    const Tensor<T> h1 = block1_.forward(feats[0], train);
    const Tensor<T> h2 =
        block2_.forward(detail::fuse(h1, feats[1], arch_.fusion), train);
    const Tensor<T> h3 =
        block3_.forward(detail::fuse(h2, feats[2], arch_.fusion), train);
    return head_.forward(h3, train);
  }

  std::array<Tensor<T>, 3> backward(const Tensor<T>& dy) {
    const std::size_t bw = arch_.base_width;
    std::array<Tensor<T>, 3> df;
    Tensor<T> dh;
    const Tensor<T> dh3 = head_.backward(dy);
    detail::unfuse(block3_.backward(dh3), bw, arch_.content_channels,
                   arch_.fusion, dh, df[2]);
    detail::unfuse(block2_.backward(dh), bw, bw, arch_.fusion, dh, df[1]);
    df[0] = block1_.backward(dh);
    return df;
  }

  void collect(const std::string& prefix, ParamRegistry<T>& params,
               ParamRegistry<T>& buffers) {
    detail::collect_into(block1_, prefix, params, buffers);
    detail::collect_into(block2_, prefix, params, buffers);
    detail::collect_into(block3_, prefix, params, buffers);
    detail::collect_into(head_, prefix, params, buffers);
  }

 private:
  ArchSpec arch_;
  Sequential<T> block1_, block2_, block3_, head_;
};

// Latent discriminator D_z: plain MLP on codes, raw scores (least-squares
// losses need no sigmoid), no batch norm.
template <typename T>
class LatentDisc {
 public:
  explicit LatentDisc(const ArchSpec& a) : arch_(a) {
    body_.template add<Dense<T>>("fc1", a.latent_dim, 256);
    body_.template add<LeakyReLU<T>>(T(0.2));
    body_.template add<Dense<T>>("fc2", 256, 256);
    body_.template add<LeakyReLU<T>>(T(0.2));
    body_.template add<Dense<T>>("fc3", 256, 1);
  }

  // (n, latent_dim) -> (n,)
  Tensor<T> forward(const Tensor<T>& z, bool train) {
    require_rank(z, 2, "latent disc input");
    if (z.dim(1) != arch_.latent_dim)
      throw ShapeError("latent disc: expected latent_dim " +
                       std::to_string(arch_.latent_dim) + ", got " +
                       std::to_string(z.dim(1)));
    Tensor<T> s = body_.forward(z, train);
    s.reshape({s.dim(0)});
    return s;
  }

  Tensor<T> backward(const Tensor<T>& dscores) {
    return body_.backward(dscores.reshaped({dscores.dim(0), 1}));
  }

  void collect(const std::string& prefix, ParamRegistry<T>& params,
               ParamRegistry<T>& buffers) {
    detail::collect_into(body_, prefix, params, buffers);
  }

 private:
  ArchSpec arch_;
  Sequential<T> body_;
};

// Patch discriminator D_p: stride-2 convolution stack plus a 1x1 head, so
// every output unit judges a sub-image patch (receptive field < image
// size). No batch norm on the first layer.
template <typename T>
class PatchDisc {
 public:
  explicit PatchDisc(const ArchSpec& a) : arch_(a) {
    const std::size_t depth = a.patch_disc_depth();
    std::size_t width = a.base_width;
    body_.template add<Conv2d<T>>("conv1", a.style_channels, width, 4, 2, 1);
    body_.template add<LeakyReLU<T>>(T(0.2));
    for (std::size_t i = 2; i <= depth; ++i) {
      body_.template add<Conv2d<T>>("conv" + std::to_string(i), width,
                                    width * 2, 4, 2, 1);
      body_.template add<BatchNorm<T>>("bn" + std::to_string(i), width * 2);
      body_.template add<LeakyReLU<T>>(T(0.2));
      width *= 2;
    }
    body_.template add<Conv2d<T>>("head", width, 1, 1, 1, 0);
  }

  // (n, style_channels, S, S) -> (n, 1, S/2^depth, S/2^depth)
  Tensor<T> forward(const Tensor<T>& x, bool train) {
    require_rank(x, 4, "patch disc input");
    if (x.dim(1) != arch_.style_channels || x.dim(2) != arch_.image_size ||
        x.dim(3) != arch_.image_size)
      throw ShapeError("patch disc: expected (n," +
                       std::to_string(arch_.style_channels) + "," +
                       std::to_string(arch_.image_size) + "," +
                       std::to_string(arch_.image_size) + "), got " +
                       shape_str(x.shape()));
    return body_.forward(x, train);
  }

  Tensor<T> backward(const Tensor<T>& dmap) { return body_.backward(dmap); }

  void collect(const std::string& prefix, ParamRegistry<T>& params,
               ParamRegistry<T>& buffers) {
    detail::collect_into(body_, prefix, params, buffers);
  }

 private:
  ArchSpec arch_;
  Sequential<T> body_;
};

// The five networks plus the parameter registry used by the optimizer and
// the checkpoint writer. Registry order is construction order and therefore
// stable across runs.
template <typename T>
struct Networks {
  ArchSpec arch;
  Encoder<T> encoder;
  ContentDecoder<T> content_decoder;
  MixtureDecoder<T> mixture_decoder;
  LatentDisc<T> latent_disc;
  PatchDisc<T> patch_disc;

  explicit Networks(const ArchSpec& a)
      : arch((a.validate(), a)),
        encoder(a),
        content_decoder(a),
        mixture_decoder(a),
        latent_disc(a),
        patch_disc(a) {}

  ParamRegistry<T> params() {
    ParamRegistry<T> p, b;
    collect_all(p, b);
    return p;
  }
  ParamRegistry<T> buffers() {
    ParamRegistry<T> p, b;
    collect_all(p, b);
    return b;
  }
  // Checkpoint order: all learnables, then all running-stat buffers.
  ParamRegistry<T> all_state() {
    ParamRegistry<T> p, b;
    collect_all(p, b);
    p.insert(p.end(), b.begin(), b.end());
    return p;
  }

  // Deterministic initialization: N(0, 0.02) for every weight matrix/kernel
  // in registry order from one seeded stream; biases and batch-norm shifts
  // zero, batch-norm scales one, running stats (0, 1).
  void init_params(std::uint64_t seed) {
    RandomEngine rng(seed);
    ParamRegistry<T> p, b;
    collect_all(p, b);
    for (auto& [name, param] : p) {
      if (name.ends_with(".w")) {
        rng.fill_normal(param->value.data(), param->value.size());
        for (std::size_t i = 0; i < param->value.size(); ++i)
          param->value[i] = T(param->value[i] * T(0.02));
      } else if (name.ends_with(".gamma")) {
        param->value.fill(T(1));
      } else {
        param->value.fill(T(0));
      }
      param->grad.zero();
    }
    for (auto& [name, buf] : b) {
      buf->value.fill(name.ends_with(".running_var") ? T(1) : T(0));
      buf->grad.zero();
    }
  }

  void zero_grad() {
    for (auto& kv : all_state()) kv.second->grad.zero();
  }

 private:
  void collect_all(ParamRegistry<T>& p, ParamRegistry<T>& b) {
    encoder.collect("enc.", p, b);
    content_decoder.collect("gc.", p, b);
    mixture_decoder.collect("gm.", p, b);
    latent_disc.collect("dz.", p, b);
    patch_disc.collect("dp.", p, b);
  }
};

}  // namespace mixgan::nets
