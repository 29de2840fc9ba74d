#pragma once

// Adam with bias correction over a registry of named parameters. Each
// optimizer owns the first/second moment arrays for its parameter group;
// the trainer owns one optimizer per adversarial faction so discriminator
// steps never disturb generator moments.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mixgan/core/backend.hpp"
#include "mixgan/core/error.hpp"
#include "mixgan/core/tensor.hpp"
#include "mixgan/nets/layers.hpp"
#include "mixgan/nets/models.hpp"

namespace mixgan::losses {

template <typename T>
class AdamOptimizer {
 public:
  struct Slot {
    std::string name;
    nets::Param<T>* param;
    Tensor<T> m;
    Tensor<T> v;
  };

  AdamOptimizer(nets::ParamRegistry<T> params, T lr, T beta1, T beta2,
                T eps = T(1e-8))
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (!(lr > T(0)) || !(beta1 > T(0)) || beta1 >= T(1) || !(beta2 > T(0)) ||
        beta2 >= T(1))
      throw ArgumentError("AdamOptimizer: rates must be positive and betas "
                          "in (0, 1)");
    for (auto& kv : params)
      slots_.push_back(Slot{kv.first, kv.second,
                            Tensor<T>(kv.second->value.shape()),
                            Tensor<T>(kv.second->value.shape())});
  }

  // One update from the gradients currently accumulated in the registry.
  void step() {
    ++t_;
    const T bc1 = T(1.0 - std::pow(double(beta1_), double(t_)));
    const T bc2 = T(1.0 - std::pow(double(beta2_), double(t_)));
    for (auto& s : slots_) {
      if (!s.param->grad.all_finite())
        throw NonFiniteError("non-finite gradient in " + s.name);
      kern::adam_update_t<T>(s.param->value.size(), s.param->value.data(),
                             s.param->grad.data(), s.m.data(), s.v.data(),
                             lr_, beta1_, beta2_, eps_, bc1, bc2);
    }
  }

  std::uint64_t steps() const { return t_; }
  void set_steps(std::uint64_t t) { t_ = t; }
  std::vector<Slot>& slots() { return slots_; }
  const std::vector<Slot>& slots() const { return slots_; }

 private:
  T lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<Slot> slots_;
};

}  // namespace mixgan::losses
