#include "mixgan/train/trainer.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <ostream>
#include <utility>
#include <vector>

#include "mixgan/core/error.hpp"
#include "mixgan/core/rng.hpp"
#include "mixgan/losses/adam.hpp"
#include "mixgan/losses/losses.hpp"

namespace mixgan::train {
namespace {

using losses::AdamOptimizer;
using nets::Networks;

// Seed-stream tags: every independent consumer of randomness hangs off the
// run seed under its own tag, so adding a consumer never shifts the draws
// of another.
constexpr std::uint64_t kInitTag = 0x11;
constexpr std::uint64_t kContentPriorTag = 0x21;
constexpr std::uint64_t kMixturePriorTag = 0x22;
constexpr std::uint64_t kContentShuffleTag = 0x31;
constexpr std::uint64_t kMixtureShuffleTag = 0x32;

std::vector<std::size_t> epoch_order(std::uint64_t seed, std::uint64_t tag,
                                     std::uint64_t epoch, std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  RandomEngine rng(derive_seed(seed, tag, epoch));
  rng.shuffle(idx);
  return idx;
}

// Copies `count` images of the shuffled order starting at `start`.
Tensor<float> gather(const Tensor<float>& data,
                     const std::vector<std::size_t>& order, std::size_t start,
                     std::size_t count) {
  const std::size_t stride = data.size() / data.dim(0);
  Shape shape = data.shape();
  shape[0] = count;
  Tensor<float> out(shape);
  for (std::size_t i = 0; i < count; ++i)
    std::memcpy(out.data() + i * stride,
                data.data() + order[start + i] * stride,
                stride * sizeof(float));
  return out;
}

Tensor<float> sample_prior(RandomEngine& rng, std::size_t n,
                           std::size_t latent_dim) {
  Tensor<float> z({n, latent_dim});
  rng.fill_normal(z.data(), z.size());
  return z;
}

nets::ParamRegistry<float> group_params(
    Networks<float>& networks, std::initializer_list<const char*> prefixes) {
  nets::ParamRegistry<float> out;
  for (auto& kv : networks.params())
    for (const char* prefix : prefixes)
      if (kv.first.rfind(prefix, 0) == 0) {
        out.push_back(kv);
        break;
      }
  return out;
}

void zero_grads(nets::ParamRegistry<float>& group) {
  for (auto& kv : group) kv.second->grad.zero();
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value))
    throw NonFiniteError(std::string(what) + " became non-finite");
}

std::size_t steps_per_epoch(std::size_t n, const TrainConfig& cfg) {
  const std::size_t steps = n / cfg.batch_size;
  if (steps == 0)
    throw ArgumentError("dataset of " + std::to_string(n) +
                        " images is smaller than one batch of " +
                        std::to_string(cfg.batch_size));
  return steps;
}

using OptimizerList =
    std::vector<std::pair<std::string, AdamOptimizer<float>*>>;

ModelCheckpoint snapshot(Networks<float>& networks, const TrainConfig& cfg,
                         Stage stage, std::uint64_t epoch,
                         const RandomEngine& prior_rng,
                         const std::vector<LossRecord>& history,
                         const OptimizerList& optimizers) {
  ModelCheckpoint ckpt;
  ckpt.arch = networks.arch;
  ckpt.config = cfg;
  ckpt.stage = stage;
  ckpt.epoch = epoch;
  ckpt.rng_state = prior_rng.state();
  for (auto& kv : networks.all_state())
    ckpt.arrays.emplace_back(kv.first, kv.second->value);
  for (const auto& [group, opt] : optimizers) {
    ckpt.adam_steps.emplace_back(group, opt->steps());
    for (const auto& slot : opt->slots()) {
      ckpt.arrays.emplace_back("adam." + group + "." + slot.name + ".m",
                               slot.m);
      ckpt.arrays.emplace_back("adam." + group + "." + slot.name + ".v",
                               slot.v);
    }
  }
  ckpt.history = history;
  return ckpt;
}

void restore_optimizer(const ModelCheckpoint& ckpt, const std::string& group,
                       AdamOptimizer<float>& opt) {
  bool found = false;
  for (const auto& kv : ckpt.adam_steps)
    if (kv.first == group) {
      opt.set_steps(kv.second);
      found = true;
    }
  if (!found)
    throw FormatError("checkpoint has no optimizer group '" + group + "'");
  for (auto& slot : opt.slots()) {
    const std::string base = "adam." + group + "." + slot.name;
    const Tensor<float>* m = ckpt.find(base + ".m");
    const Tensor<float>* v = ckpt.find(base + ".v");
    if (!m || !v)
      throw FormatError("checkpoint is missing optimizer state " + base);
    if (m->shape() != slot.m.shape() || v->shape() != slot.v.shape())
      throw FormatError("optimizer state " + base + " has shape " +
                        shape_str(m->shape()) + ", expected " +
                        shape_str(slot.m.shape()));
    slot.m = *m;
    slot.v = *v;
  }
}

void check_resume(const ModelCheckpoint& resume, Stage stage,
                  const nets::ArchSpec& arch, const TrainConfig& cfg) {
  if (resume.stage != stage)
    throw StageError(std::string("resume checkpoint is a ") +
                     to_string(resume.stage) + "-stage checkpoint, not " +
                     to_string(stage));
  if (!(resume.arch == arch))
    throw ArgumentError("resume checkpoint was trained with a different "
                        "architecture");
  if (!cfg.resumable_with(resume.config))
    throw ArgumentError("resume checkpoint was trained with a different "
                        "config (only the epoch target may change)");
  if (resume.epoch > cfg.epochs)
    throw ArgumentError("resume checkpoint already has " +
                        std::to_string(resume.epoch) +
                        " epochs, target is " + std::to_string(cfg.epochs));
}

}  // namespace

void restore_networks(const ModelCheckpoint& ckpt,
                      nets::Networks<float>& networks) {
  for (auto& kv : networks.all_state()) {
    const Tensor<float>* src = ckpt.find(kv.first);
    if (!src)
      throw FormatError("checkpoint has no array '" + kv.first + "'");
    if (src->shape() != kv.second->value.shape())
      throw FormatError("checkpoint array '" + kv.first + "' has shape " +
                        shape_str(src->shape()) + ", networks expect " +
                        shape_str(kv.second->value.shape()));
    kv.second->value = *src;
  }
}

ModelCheckpoint train_content_stage(const nets::ArchSpec& arch,
                                    const TrainConfig& cfg,
                                    const data::ImageBatch& content_data,
                                    const TrainOptions& options) {
  arch.validate();
  cfg.validate();
  if (cfg.stage != Stage::content)
    throw ArgumentError("train_content_stage: config stage is " +
                        std::string(to_string(cfg.stage)));
  if (cfg.latent_dim != arch.latent_dim)
    throw ArgumentError("config latent_dim " + std::to_string(cfg.latent_dim) +
                        " disagrees with architecture latent_dim " +
                        std::to_string(arch.latent_dim));
  if (content_data.channels() != arch.content_channels ||
      content_data.height() != arch.image_size ||
      content_data.width() != arch.image_size)
    throw ShapeError("content data " + shape_str(content_data.data.shape()) +
                     " does not match the architecture's content domain");
  const std::size_t n = content_data.count();
  const std::size_t steps = steps_per_epoch(n, cfg);

  Networks<float> networks(arch);
  // One optimizer per adversarial faction: the latent discriminator against
  // the encoder/decoder pair.
  auto d_group = group_params(networks, {"dz."});
  auto g_group = group_params(networks, {"enc.", "gc."});
  AdamOptimizer<float> d_opt(d_group, float(cfg.lr), float(cfg.beta1),
                             float(cfg.beta2));
  AdamOptimizer<float> g_opt(g_group, float(cfg.lr), float(cfg.beta1),
                             float(cfg.beta2));
  RandomEngine prior_rng(derive_seed(cfg.seed, kContentPriorTag));
  std::vector<LossRecord> history;
  std::uint64_t start_epoch = 0;

  if (options.resume) {
    const ModelCheckpoint& resume = *options.resume;
    check_resume(resume, Stage::content, arch, cfg);
    restore_networks(resume, networks);
    restore_optimizer(resume, "dz", d_opt);
    restore_optimizer(resume, "eg", g_opt);
    prior_rng.set_state(resume.rng_state);
    history = resume.history;
    start_epoch = resume.epoch;
  } else {
    networks.init_params(derive_seed(cfg.seed, kInitTag));
  }

  const OptimizerList optimizers{{"dz", &d_opt}, {"eg", &g_opt}};
  for (std::uint64_t epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    const auto order = epoch_order(cfg.seed, kContentShuffleTag, epoch, n);
    for (std::size_t step = 0; step < steps; ++step) {
      const Tensor<float> x =
          gather(content_data.data, order, step * cfg.batch_size,
                 cfg.batch_size);
      const Tensor<float> codes = networks.encoder.forward(x, true);

      // (a) latent discriminator: prior draws are real, codes are fake.
      double d_value = 0.0;
      for (std::size_t d = 0; d < cfg.d_steps_per_g_step; ++d) {
        const Tensor<float> z =
            sample_prior(prior_rng, cfg.batch_size, arch.latent_dim);
        const Tensor<float> s_real = networks.latent_disc.forward(z, true);
        const Tensor<float> s_fake =
            networks.latent_disc.forward(codes, true);
        const auto dl = losses::lsgan_disc_loss(s_real, s_fake);
        require_finite(dl.value, "latent discriminator loss");
        zero_grads(d_group);
        networks.latent_disc.backward(dl.dfake);  // caches hold the codes
        networks.latent_disc.forward(z, true);
        networks.latent_disc.backward(dl.dreal);
        d_opt.step();
        d_value = dl.value;
      }

      // (b) encoder + content decoder: fool the discriminator while
      // reconstructing. The encoder's caches still match `codes` (only
      // discriminator parameters moved), so one encoder backward suffices.
      const Tensor<float> s_adv = networks.latent_disc.forward(codes, true);
      const auto adv = losses::encoder_adv_loss(s_adv);
      const auto decoded = networks.content_decoder.forward(codes, true);
      const auto rec = losses::l1_reconstruction(x, decoded.image);
      require_finite(adv.value + cfg.lambda * rec.value, "content objective");

      zero_grads(g_group);
      Tensor<float> dimage(decoded.image.shape());
      for (std::size_t i = 0; i < dimage.size(); ++i)
        dimage[i] = float(cfg.lambda) * rec.dx_hat[i];
      const Tensor<float> dcodes_rec =
          networks.content_decoder.backward(dimage);
      const Tensor<float> dcodes_adv =
          networks.latent_disc.backward(adv.dscores);
      Tensor<float> dcodes(codes.shape());
      for (std::size_t i = 0; i < dcodes.size(); ++i)
        dcodes[i] = dcodes_rec[i] + dcodes_adv[i];
      networks.encoder.backward(dcodes);
      g_opt.step();

      history.push_back({epoch, step, "d_latent", d_value});
      history.push_back({epoch, step, "g_adv", adv.value});
      history.push_back({epoch, step, "l1_recon", rec.value});
      if (options.log && step % cfg.log_every == 0)
        (*options.log) << "content epoch " << epoch << " step " << step
                       << "  d_latent " << d_value << "  g_adv " << adv.value
                       << "  l1_recon " << rec.value << "\n";
    }
    if (!options.autosave_path.empty())
      save_checkpoint(snapshot(networks, cfg, Stage::content, epoch + 1,
                               prior_rng, history, optimizers),
                      options.autosave_path);
  }
  return snapshot(networks, cfg, Stage::content, cfg.epochs, prior_rng,
                  history, optimizers);
}

ModelCheckpoint train_mixture_stage(const TrainConfig& cfg,
                                    const ModelCheckpoint& content_ckpt,
                                    const data::ImageBatch& style_data,
                                    const TrainOptions& options) {
  cfg.validate();
  if (cfg.stage != Stage::mixture)
    throw ArgumentError("train_mixture_stage: config stage is " +
                        std::string(to_string(cfg.stage)));
  if (content_ckpt.stage != Stage::content)
    throw StageError(std::string("mixture stage needs a content-stage "
                                 "checkpoint, got a ") +
                     to_string(content_ckpt.stage) + "-stage one");
  const nets::ArchSpec arch = content_ckpt.arch;
  arch.validate();
  if (cfg.latent_dim != arch.latent_dim)
    throw ArgumentError("config latent_dim " + std::to_string(cfg.latent_dim) +
                        " disagrees with architecture latent_dim " +
                        std::to_string(arch.latent_dim));
  if (style_data.channels() != arch.style_channels ||
      style_data.height() != arch.image_size ||
      style_data.width() != arch.image_size)
    throw ShapeError("style data " + shape_str(style_data.data.shape()) +
                     " does not match the architecture's style domain");
  const std::size_t n = style_data.count();
  const std::size_t steps = steps_per_epoch(n, cfg);

  Networks<float> networks(arch);
  // The generator faction here is the mixture decoder, plus the content
  // decoder when it keeps training through the pyramid. The encoder and
  // latent discriminator exist but are never forwarded or updated.
  auto d_group = group_params(networks, {"dp."});
  auto g_group = cfg.freeze_content_decoder
                     ? group_params(networks, {"gm."})
                     : group_params(networks, {"gm.", "gc."});
  AdamOptimizer<float> d_opt(d_group, float(cfg.lr), float(cfg.beta1),
                             float(cfg.beta2));
  AdamOptimizer<float> g_opt(g_group, float(cfg.lr), float(cfg.beta1),
                             float(cfg.beta2));
  RandomEngine prior_rng(derive_seed(cfg.seed, kMixturePriorTag));
  std::vector<LossRecord> history;
  std::uint64_t start_epoch = 0;

  if (options.resume) {
    const ModelCheckpoint& resume = *options.resume;
    check_resume(resume, Stage::mixture, arch, cfg);
    restore_networks(resume, networks);
    restore_optimizer(resume, "dp", d_opt);
    restore_optimizer(resume, "g", g_opt);
    prior_rng.set_state(resume.rng_state);
    history = resume.history;
    start_epoch = resume.epoch;
  } else {
    restore_networks(content_ckpt, networks);
  }

  // A frozen content decoder runs in eval mode so its running stats stay
  // put too — its bytes must not change at all.
  const bool gc_train = !cfg.freeze_content_decoder;

  const OptimizerList optimizers{{"dp", &d_opt}, {"g", &g_opt}};
  for (std::uint64_t epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    const auto order = epoch_order(cfg.seed, kMixtureShuffleTag, epoch, n);
    for (std::size_t step = 0; step < steps; ++step) {
      const Tensor<float> y_real =
          gather(style_data.data, order, step * cfg.batch_size,
                 cfg.batch_size);

      // (a) patch discriminator: style images are real, mixtures are fake.
      double d_value = 0.0;
      for (std::size_t d = 0; d < cfg.d_steps_per_g_step; ++d) {
        const Tensor<float> z =
            sample_prior(prior_rng, cfg.batch_size, arch.latent_dim);
        const auto pyramid = networks.content_decoder.forward(z, gc_train);
        const Tensor<float> y_fake =
            networks.mixture_decoder.forward(pyramid.feats, true);
        const Tensor<float> s_real =
            networks.patch_disc.forward(y_real, true);
        const Tensor<float> s_fake =
            networks.patch_disc.forward(y_fake, true);
        const auto dl = losses::lsgan_disc_loss(s_real, s_fake);
        require_finite(dl.value, "patch discriminator loss");
        zero_grads(d_group);
        networks.patch_disc.backward(dl.dfake);  // caches hold the fake pass
        networks.patch_disc.forward(y_real, true);
        networks.patch_disc.backward(dl.dreal);
        d_opt.step();
        d_value = dl.value;
      }

      // (b) generator: a fresh draw, pushed to look real patch by patch.
      const Tensor<float> z =
          sample_prior(prior_rng, cfg.batch_size, arch.latent_dim);
      const auto pyramid = networks.content_decoder.forward(z, gc_train);
      const Tensor<float> y_fake =
          networks.mixture_decoder.forward(pyramid.feats, true);
      const Tensor<float> s_fake = networks.patch_disc.forward(y_fake, true);
      const auto g = losses::lsgan_gen_loss(s_fake);
      require_finite(g.value, "mixture generator loss");

      zero_grads(g_group);
      // The patch discriminator picks up stray gradients here; the next
      // discriminator step zeroes them before they can matter.
      const Tensor<float> dy = networks.patch_disc.backward(g.dscores);
      const auto dfeats = networks.mixture_decoder.backward(dy);
      if (!cfg.freeze_content_decoder) {
        const Tensor<float> dimage(pyramid.image.shape());
        networks.content_decoder.backward(dimage, &dfeats);
      }
      g_opt.step();

      history.push_back({epoch, step, "d_patch", d_value});
      history.push_back({epoch, step, "g_patch", g.value});
      if (options.log && step % cfg.log_every == 0)
        (*options.log) << "mixture epoch " << epoch << " step " << step
                       << "  d_patch " << d_value << "  g_patch " << g.value
                       << "\n";
    }
    if (!options.autosave_path.empty())
      save_checkpoint(snapshot(networks, cfg, Stage::mixture, epoch + 1,
                               prior_rng, history, optimizers),
                      options.autosave_path);
  }
  return snapshot(networks, cfg, Stage::mixture, cfg.epochs, prior_rng,
                  history, optimizers);
}

}  // namespace mixgan::train
