#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixgan/core/tensor.hpp"
#include "mixgan/data/image_batch.hpp"

namespace mixgan::eval {

// A trained K-way image classifier: three stride-2 convolutions, one hidden
// dense layer whose activations are the feature embedding, and a K-way
// logit head. Stored as named parameter arrays plus the metadata needed to
// rebuild the network.
struct ClassifierCheckpoint {
  std::size_t image_size = 0;
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;
  double holdout_accuracy = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, Tensor<float>>> arrays;
};

// Trains the classifier on explicit labels (90/10 train/holdout split,
// holdout accuracy recorded). Grayscale batches are replicated to three
// channels first. Labels must cover at least two classes.
ClassifierCheckpoint train_classifier(const data::ImageBatch& images,
                                      const std::vector<std::uint8_t>& labels,
                                      std::size_t num_classes,
                                      std::uint64_t seed);

// Binary domain discriminator: dsA is class 0, dsB is class 1.
ClassifierCheckpoint train_domain_classifier(const data::ImageBatch& ds_a,
                                             const data::ImageBatch& ds_b,
                                             std::uint64_t seed);

struct DomainAssignment {
  std::vector<std::uint8_t> labels;  // 0 = domain A, 1 = domain B
  double fraction_a = 0.0;           // fraction_b is 1 - fraction_a
};

// Routes each sample to the domain the classifier finds more likely; an
// exact tie goes to domain A.
DomainAssignment assign_domain(const ClassifierCheckpoint& clf,
                               const data::ImageBatch& samples);

// Last-hidden-layer activations, inference mode: (n, feature_dim).
Tensor<float> extract_features(const ClassifierCheckpoint& clf,
                               const data::ImageBatch& samples);

// Square root of the biased squared-MMD estimator under a Gaussian kernel.
// The two-argument form picks the bandwidth by the median heuristic over
// the pooled pairwise distances (>= 2 rows per side required); the sigma
// form uses the given bandwidth (singletons allowed).
double mmd(const Tensor<float>& x, const Tensor<float>& y);
double mmd(const Tensor<float>& x, const Tensor<float>& y, double sigma);

struct EvalReport {
  // Absent when the assigned subgroup (or its matched training sample) has
  // fewer than two members.
  std::optional<double> mmd_to_domain_a;
  std::optional<double> mmd_to_domain_b;
  std::optional<double> bandwidth_a;  // median-heuristic sigma actually used
  std::optional<double> bandwidth_b;
  double assignment_fraction_a = 0.0;
  std::optional<double> success_proxy_rate;  // filled by callers that run it
  std::size_t n_generated = 0;
  std::size_t n_assigned_a = 0;
  std::size_t n_assigned_b = 0;
  std::size_t n_domain_a = 0;  // matched-size training samples compared
  std::size_t n_domain_b = 0;
};

// Table-style protocol: assign every generated sample to its nearer domain,
// then measure feature-space MMD between each assigned subgroup and a
// matched-size subsample of that domain's training set.
EvalReport mmd_report(const data::ImageBatch& generated,
                      const data::ImageBatch& ds_a,
                      const data::ImageBatch& ds_b,
                      const ClassifierCheckpoint& clf,
                      std::uint64_t seed = 0);

// Automated stand-in for a human success judgment: the foreground mask must
// read as a content shape with confidence >= 0.8, and the foreground's
// dominant hue must sit within hue_tolerance degrees of a palette color.
double success_proxy(const data::ImageBatch& generated,
                     const ClassifierCheckpoint& shape_clf,
                     float hue_tolerance = 30.0f);

// Projection onto the top-2 principal components of the feature covariance
// (deterministic sign: each component's largest-magnitude loading is made
// positive). Input (n, d) with n >= 2, d >= 2; output (n, 2).
Tensor<float> pca_2d(const Tensor<float>& features);

// CSV with header "label,f1,...,fd"; one row per sample.
void export_features_csv(const Tensor<float>& features,
                         const std::vector<std::uint8_t>& labels,
                         const std::string& path);

nlohmann::json to_json(const EvalReport& report);

}  // namespace mixgan::eval
