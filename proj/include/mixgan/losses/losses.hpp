#pragma once

// Scalar training objectives with hand-derived gradients. Every loss
// accumulates its value in double and returns the gradient with respect to
// the tensor a trainer backpropagates through; least-squares scores use the
// real label 1 and the fake label 0.

#include <cmath>
#include <cstddef>

#include "mixgan/core/error.hpp"
#include "mixgan/core/tensor.hpp"

namespace mixgan::losses {

template <typename T>
struct DiscLoss {
  double value = 0.0;
  Tensor<T> dreal;  // d(value)/d(real_scores)
  Tensor<T> dfake;  // d(value)/d(fake_scores)
};

template <typename T>
struct GenLoss {
  double value = 0.0;
  Tensor<T> dscores;
};

template <typename T>
struct ReconLoss {
  double value = 0.0;
  Tensor<T> dx_hat;
};

// mean((real - 1)^2) + mean(fake^2): the discriminator drives real scores
// to 1 and generated scores to 0.
template <typename T>
DiscLoss<T> lsgan_disc_loss(const Tensor<T>& real_scores,
                            const Tensor<T>& fake_scores) {
  if (real_scores.size() == 0 || fake_scores.size() == 0)
    throw ArgumentError("lsgan_disc_loss: empty score array");
  DiscLoss<T> out;
  out.dreal = Tensor<T>(real_scores.shape());
  out.dfake = Tensor<T>(fake_scores.shape());
  const double nr = double(real_scores.size());
  const double nf = double(fake_scores.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < real_scores.size(); ++i) {
    const double d = double(real_scores[i]) - 1.0;
    acc += d * d / nr;
    out.dreal[i] = T(2.0 * d / nr);
  }
  for (std::size_t i = 0; i < fake_scores.size(); ++i) {
    const double s = double(fake_scores[i]);
    acc += s * s / nf;
    out.dfake[i] = T(2.0 * s / nf);
  }
  out.value = acc;
  return out;
}

// mean((scores - 1)^2): a generator (or the encoder against the latent
// discriminator) pushes its scores toward the real label.
template <typename T>
GenLoss<T> lsgan_gen_loss(const Tensor<T>& fake_scores) {
  if (fake_scores.size() == 0)
    throw ArgumentError("lsgan_gen_loss: empty score array");
  GenLoss<T> out;
  out.dscores = Tensor<T>(fake_scores.shape());
  const double n = double(fake_scores.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < fake_scores.size(); ++i) {
    const double d = double(fake_scores[i]) - 1.0;
    acc += d * d / n;
    out.dscores[i] = T(2.0 * d / n);
  }
  out.value = acc;
  return out;
}

template <typename T>
GenLoss<T> encoder_adv_loss(const Tensor<T>& latent_scores) {
  if (latent_scores.size() == 0)
    throw ArgumentError("encoder_adv_loss: empty score array");
  return lsgan_gen_loss(latent_scores);
}

// Mean absolute difference, so the weight in front of it is independent of
// image resolution. Gradient is taken with respect to the reconstruction.
template <typename T>
ReconLoss<T> l1_reconstruction(const Tensor<T>& x, const Tensor<T>& x_hat) {
  if (x.shape() != x_hat.shape())
    throw ShapeError("l1_reconstruction: " + shape_str(x.shape()) + " vs " +
                     shape_str(x_hat.shape()));
  ReconLoss<T> out;
  out.dx_hat = Tensor<T>(x_hat.shape());
  const double n = double(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = double(x_hat[i]) - double(x[i]);
    acc += std::abs(d) / n;
    out.dx_hat[i] = T((d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0) / n);
  }
  out.value = acc;
  return out;
}

}  // namespace mixgan::losses
