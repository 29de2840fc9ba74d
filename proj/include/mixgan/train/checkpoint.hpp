#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mixgan/core/tensor.hpp"
#include "mixgan/nets/arch.hpp"
#include "mixgan/train/config.hpp"

namespace mixgan::train {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct LossRecord {
  std::uint64_t epoch = 0;
  std::uint64_t step = 0;
  std::string name;
  double value = 0.0;
  bool operator==(const LossRecord&) const = default;
};

// Full training state: everything needed to continue a run bit-for-bit or
// to generate from the trained networks. Arrays hold the network parameters
// and running stats under their registry names plus the optimizer moments
// under "adam.<group>.<param>.{m,v}".
struct ModelCheckpoint {
  nets::ArchSpec arch;
  TrainConfig config;
  Stage stage = Stage::content;
  std::uint64_t epoch = 0;
  std::array<std::uint64_t, 4> rng_state{};
  std::vector<std::pair<std::string, std::uint64_t>> adam_steps;
  std::vector<std::pair<std::string, Tensor<float>>> arrays;
  std::vector<LossRecord> history;

  const Tensor<float>* find(const std::string& name) const {
    for (const auto& kv : arrays)
      if (kv.first == name) return &kv.second;
    return nullptr;
  }
};

// Binary container plus a "<path>.losses.csv" sidecar for the history.
void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

void save_loss_history(const std::vector<LossRecord>& history,
                       const std::string& path);
std::vector<LossRecord> load_loss_history(const std::string& path);

}  // namespace mixgan::train
