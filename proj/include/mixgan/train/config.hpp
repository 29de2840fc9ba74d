#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>

#include "json.hpp"
#include "mixgan/core/error.hpp"
#include "mixgan/nets/arch.hpp"

namespace mixgan::train {

enum class Stage { content, mixture };

inline const char* to_string(Stage s) {
  return s == Stage::content ? "content" : "mixture";
}

inline Stage parse_stage(const std::string& name) {
  if (name == "content") return Stage::content;
  if (name == "mixture") return Stage::mixture;
  throw ArgumentError("unknown stage '" + name +
                      "' (expected content or mixture)");
}

struct TrainConfig {
  Stage stage = Stage::content;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double lambda = 10.0;  // weight of the L1 reconstruction term
  std::size_t latent_dim = 64;
  std::uint64_t seed = 0;
  bool freeze_content_decoder = false;
  std::size_t d_steps_per_g_step = 1;
  std::size_t log_every = 50;

  // Stage-appropriate defaults: the mixture stage typically needs three
  // times the epochs of the content stage.
  static TrainConfig defaults(Stage s) {
    TrainConfig c;
    c.stage = s;
    c.epochs = s == Stage::content ? 100 : 300;
    return c;
  }

  void validate() const {
    if (epochs < 1) throw ArgumentError("epochs must be >= 1");
    if (batch_size < 2)
      throw ArgumentError("batch_size must be >= 2 (batch norm)");
    if (!(lr > 0.0)) throw ArgumentError("lr must be positive");
    if (!(beta1 > 0.0) || beta1 >= 1.0 || !(beta2 > 0.0) || beta2 >= 1.0)
      throw ArgumentError("betas must lie in (0, 1)");
    if (lambda < 0.0) throw ArgumentError("lambda must be nonnegative");
    if (latent_dim < 2) throw ArgumentError("latent_dim must be >= 2");
    if (d_steps_per_g_step < 1)
      throw ArgumentError("d_steps_per_g_step must be >= 1");
    if (log_every < 1) throw ArgumentError("log_every must be >= 1");
  }

  // Two runs are continuations of one another only when everything except
  // the target epoch count matches.
  bool resumable_with(const TrainConfig& other) const {
    return stage == other.stage && batch_size == other.batch_size &&
           lr == other.lr && beta1 == other.beta1 && beta2 == other.beta2 &&
           lambda == other.lambda && latent_dim == other.latent_dim &&
           seed == other.seed &&
           freeze_content_decoder == other.freeze_content_decoder &&
           d_steps_per_g_step == other.d_steps_per_g_step;
  }

  bool operator==(const TrainConfig&) const = default;
};

namespace detail {

inline void require_known_keys(const nlohmann::json& j,
                               std::initializer_list<const char*> allowed,
                               const char* what) {
  if (!j.is_object())
    throw ArgumentError(std::string(what) + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ArgumentError(std::string(what) + ": unknown key '" + it.key() +
                          "'");
  }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad value for '") + key +
                        "': " + e.what());
  }
}

}  // namespace detail

inline nlohmann::json to_json(const TrainConfig& c) {
  return nlohmann::json{{"stage", to_string(c.stage)},
                        {"epochs", c.epochs},
                        {"batch_size", c.batch_size},
                        {"lr", c.lr},
                        {"beta1", c.beta1},
                        {"beta2", c.beta2},
                        {"lambda", c.lambda},
                        {"latent_dim", c.latent_dim},
                        {"seed", c.seed},
                        {"freeze_content_decoder", c.freeze_content_decoder},
                        {"d_steps_per_g_step", c.d_steps_per_g_step},
                        {"log_every", c.log_every}};
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
  detail::require_known_keys(
      j,
      {"stage", "epochs", "batch_size", "lr", "beta1", "beta2", "lambda",
       "latent_dim", "seed", "freeze_content_decoder", "d_steps_per_g_step",
       "log_every"},
      "train config");
  TrainConfig c;
  if (j.contains("stage")) {
    try {
      c.stage = parse_stage(j.at("stage").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError(std::string("bad value for 'stage': ") + e.what());
    }
    c = TrainConfig::defaults(c.stage);
  }
  c.epochs = detail::get_or(j, "epochs", c.epochs);
  c.batch_size = detail::get_or(j, "batch_size", c.batch_size);
  c.lr = detail::get_or(j, "lr", c.lr);
  c.beta1 = detail::get_or(j, "beta1", c.beta1);
  c.beta2 = detail::get_or(j, "beta2", c.beta2);
  c.lambda = detail::get_or(j, "lambda", c.lambda);
  c.latent_dim = detail::get_or(j, "latent_dim", c.latent_dim);
  c.seed = detail::get_or(j, "seed", c.seed);
  c.freeze_content_decoder =
      detail::get_or(j, "freeze_content_decoder", c.freeze_content_decoder);
  c.d_steps_per_g_step =
      detail::get_or(j, "d_steps_per_g_step", c.d_steps_per_g_step);
  c.log_every = detail::get_or(j, "log_every", c.log_every);
  c.validate();
  return c;
}

inline nlohmann::json to_json(const nets::ArchSpec& a) {
  return nlohmann::json{{"image_size", a.image_size},
                        {"content_channels", a.content_channels},
                        {"style_channels", a.style_channels},
                        {"latent_dim", a.latent_dim},
                        {"base_width", a.base_width},
                        {"fusion", nets::to_string(a.fusion)}};
}

inline nets::ArchSpec arch_from_json(const nlohmann::json& j) {
  detail::require_known_keys(j,
                             {"image_size", "content_channels",
                              "style_channels", "latent_dim", "base_width",
                              "fusion"},
                             "arch spec");
  nets::ArchSpec a;
  a.image_size = detail::get_or(j, "image_size", a.image_size);
  a.content_channels =
      detail::get_or(j, "content_channels", a.content_channels);
  a.style_channels = detail::get_or(j, "style_channels", a.style_channels);
  a.latent_dim = detail::get_or(j, "latent_dim", a.latent_dim);
  a.base_width = detail::get_or(j, "base_width", a.base_width);
  if (j.contains("fusion")) {
    try {
      a.fusion = nets::parse_fusion(j.at("fusion").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError(std::string("bad value for 'fusion': ") + e.what());
    }
  }
  a.validate();
  return a;
}

}  // namespace mixgan::train
