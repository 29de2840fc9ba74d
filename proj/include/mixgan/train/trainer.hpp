#pragma once

#include <iosfwd>
#include <string>

#include "mixgan/data/image_batch.hpp"
#include "mixgan/nets/models.hpp"
#include "mixgan/train/checkpoint.hpp"

namespace mixgan::train {

struct TrainOptions {
  // Continue this exact run (same config apart from the epoch target) from
  // a checkpoint instead of initializing fresh.
  const ModelCheckpoint* resume = nullptr;
  // When nonempty, the full state is saved here after every epoch, so an
  // aborted run always leaves its last completed epoch behind.
  std::string autosave_path;
  // Progress lines every config.log_every steps.
  std::ostream* log = nullptr;
};

// Copies a checkpoint's arrays into freshly built networks (parameters and
// running stats; optimizer moments are ignored here).
void restore_networks(const ModelCheckpoint& ckpt,
                      nets::Networks<float>& networks);

// Stage 1: adversarial autoencoder on the content domain. Per minibatch the
// latent discriminator learns to tell prior draws from codes, then the
// encoder/decoder pair is updated on the adversarial term plus
// lambda * L1 reconstruction.
ModelCheckpoint train_content_stage(const nets::ArchSpec& arch,
                                    const TrainConfig& cfg,
                                    const data::ImageBatch& content_data,
                                    const TrainOptions& options = {});

// Stage 2: the mixture decoder against the patch discriminator on the style
// domain, starting from a finished content-stage checkpoint. The content
// decoder keeps training through the pyramid unless frozen; the encoder and
// latent discriminator are never touched.
ModelCheckpoint train_mixture_stage(const TrainConfig& cfg,
                                    const ModelCheckpoint& content_ckpt,
                                    const data::ImageBatch& style_data,
                                    const TrainOptions& options = {});

}  // namespace mixgan::train
