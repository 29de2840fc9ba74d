#include "mixgan/eval/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "mixgan/core/error.hpp"
#include "mixgan/core/rng.hpp"
#include "mixgan/data/color.hpp"
#include "mixgan/data/image_ops.hpp"
#include "mixgan/losses/adam.hpp"
#include "mixgan/nets/layers.hpp"

namespace mixgan::eval {

namespace {

constexpr std::size_t kFeatureDim = 128;

// Three stride-2 convolutions, a dense feature layer, and a logit head.
// The feature embedding is the ReLU output of the dense layer.
struct ClassifierNet {
  nets::Sequential<float> body;
  nets::Sequential<float> head;
  std::size_t image_size;
  std::size_t num_classes;

  ClassifierNet(std::size_t size, std::size_t classes)
      : image_size(size), num_classes(classes) {
    if (size < 8 || size % 8 != 0)
      throw ArgumentError("classifier image size must be a multiple of 8, "
                          "got " +
                          std::to_string(size));
    if (classes < 2)
      throw ArgumentError("classifier needs at least two classes");
    const std::size_t g = size / 8;
    body.add<nets::Conv2d<float>>("conv1", 3, 32, 4, 2, 1);
    body.add<nets::ReLU<float>>();
    body.add<nets::Conv2d<float>>("conv2", 32, 64, 4, 2, 1);
    body.add<nets::ReLU<float>>();
    body.add<nets::Conv2d<float>>("conv3", 64, 128, 4, 2, 1);
    body.add<nets::ReLU<float>>();
    body.add<nets::Reshape<float>>(Shape{128 * g * g});
    body.add<nets::Dense<float>>("fc1", 128 * g * g, kFeatureDim);
    body.add<nets::ReLU<float>>();
    head.add<nets::Dense<float>>("fc2", kFeatureDim, classes);
  }

  nets::ParamRegistry<float> params() {
    std::vector<nets::Param<float>*> flat;
    body.collect_params(flat);
    head.collect_params(flat);
    nets::ParamRegistry<float> out;
    for (auto* p : flat) out.emplace_back(p->name, p);
    return out;
  }

  void init(std::uint64_t seed) {
    RandomEngine rng(seed);
    for (auto& kv : params()) {
      if (kv.first.size() > 2 &&
          kv.first.compare(kv.first.size() - 2, 2, ".w") == 0) {
        rng.fill_normal(kv.second->value.data(), kv.second->value.size());
        for (std::size_t i = 0; i < kv.second->value.size(); ++i)
          kv.second->value[i] *= 0.02f;
      } else {
        kv.second->value.zero();
      }
    }
  }

  Tensor<float> forward_logits(const Tensor<float>& x, bool train) {
    return head.forward(body.forward(x, train), train);
  }
};

ClassifierNet net_from(const ClassifierCheckpoint& clf) {
  if (clf.image_size == 0 || clf.num_classes < 2)
    throw ArgumentError("classifier checkpoint is untrained");
  ClassifierNet net(clf.image_size, clf.num_classes);
  for (auto& kv : net.params()) {
    const Tensor<float>* src = nullptr;
    for (const auto& stored : clf.arrays)
      if (stored.first == kv.first) {
        src = &stored.second;
        break;
      }
    if (!src)
      throw FormatError("classifier checkpoint has no array '" + kv.first +
                        "'");
    if (src->shape() != kv.second->value.shape())
      throw FormatError("classifier array '" + kv.first +
                        "' has the wrong shape");
    kv.second->value = *src;
  }
  return net;
}

// Inputs to the classifier are always three-channel.
data::ImageBatch to_rgb(const data::ImageBatch& batch) {
  if (batch.channels() == 3) return batch;
  return data::replicate_channels(batch);
}

void require_samples(const ClassifierCheckpoint& clf,
                     const data::ImageBatch& samples, const char* what) {
  if (samples.count() == 0)
    throw ArgumentError(std::string(what) + ": empty sample set");
  if (samples.height() != clf.image_size ||
      samples.width() != clf.image_size)
    throw ShapeError(std::string(what) + ": samples are " +
                     shape_str(samples.data.shape()) +
                     ", classifier expects " +
                     std::to_string(clf.image_size) + "x" +
                     std::to_string(clf.image_size));
}

Tensor<float> gather_rows(const Tensor<float>& data,
                          const std::vector<std::size_t>& order,
                          std::size_t start, std::size_t count) {
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

Tensor<float> softmax_rows(const Tensor<float>& logits) {
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  Tensor<float> p(logits.shape());
  for (std::size_t i = 0; i < n; ++i) {
    float mx = logits[i * k];
    for (std::size_t j = 1; j < k; ++j)
      mx = std::max(mx, logits[i * k + j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      p[i * k + j] = std::exp(logits[i * k + j] - mx);
      sum += p[i * k + j];
    }
    for (std::size_t j = 0; j < k; ++j)
      p[i * k + j] = float(p[i * k + j] / sum);
  }
  return p;
}

double cross_entropy(const Tensor<float>& logits,
                     const std::vector<std::uint8_t>& labels,
                     Tensor<float>& dlogits) {
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  const Tensor<float> p = softmax_rows(logits);
  dlogits = p;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t y = labels[i];
    loss -= std::log(std::max(double(p[i * k + y]), 1e-12));
    dlogits[i * k + y] -= 1.0f;
  }
  for (std::size_t i = 0; i < dlogits.size(); ++i) dlogits[i] /= float(n);
  return loss / double(n);
}

double squared_distance(const float* a, const float* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double c = double(a[i]) - double(b[i]);
    s += c * c;
  }
  return s;
}

void require_feature_pair(const Tensor<float>& x, const Tensor<float>& y) {
  require_rank(x, 2, "mmd features");
  require_rank(y, 2, "mmd features");
  if (x.dim(1) != y.dim(1))
    throw ShapeError("mmd: feature dimensions differ: " +
                     shape_str(x.shape()) + " vs " + shape_str(y.shape()));
  if (x.dim(0) == 0 || y.dim(0) == 0)
    throw ArgumentError("mmd: empty feature set");
}

double mmd_given_sigma(const Tensor<float>& x, const Tensor<float>& y,
                       double sigma) {
  const std::size_t n = x.dim(0), m = y.dim(0), d = x.dim(1);
  const double inv = -1.0 / (2.0 * sigma * sigma);
  double kxx = 0.0, kyy = 0.0, kxy = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      kxx += std::exp(inv * squared_distance(&x[i * d], &x[j * d], d));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      kyy += std::exp(inv * squared_distance(&y[i * d], &y[j * d], d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      kxy += std::exp(inv * squared_distance(&x[i * d], &y[j * d], d));
  const double mmd2 = kxx / double(n * n) + kyy / double(m * m) -
                      2.0 * kxy / double(n * m);
  return std::sqrt(std::max(0.0, mmd2));
}

// Lower median of all pairwise distances over the pooled rows.
double median_bandwidth(const Tensor<float>& x, const Tensor<float>& y) {
  const std::size_t n = x.dim(0), m = y.dim(0), d = x.dim(1);
  std::vector<const float*> rows;
  rows.reserve(n + m);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(&x[i * d]);
  for (std::size_t i = 0; i < m; ++i) rows.push_back(&y[i * d]);
  std::vector<double> dist;
  dist.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      dist.push_back(std::sqrt(squared_distance(rows[i], rows[j], d)));
  const std::size_t mid = (dist.size() - 1) / 2;
  std::nth_element(dist.begin(), dist.begin() + std::ptrdiff_t(mid),
                   dist.end());
  return dist[mid];
}

double mmd_median(const Tensor<float>& x, const Tensor<float>& y,
                  double& sigma_out) {
  require_feature_pair(x, y);
  if (x.dim(0) < 2 || y.dim(0) < 2)
    throw ArgumentError("mmd: median-heuristic form needs >= 2 rows per "
                        "side");
  sigma_out = median_bandwidth(x, y);
  if (!(sigma_out > 0.0))
    throw DegenerateKernelError("mmd: all pooled points coincide, median "
                                "bandwidth is zero");
  return mmd_given_sigma(x, y, sigma_out);
}

}  // namespace

ClassifierCheckpoint train_classifier(const data::ImageBatch& images,
                                      const std::vector<std::uint8_t>& labels,
                                      std::size_t num_classes,
                                      std::uint64_t seed) {
  const std::size_t n = images.count();
  if (n < 2) throw ArgumentError("train_classifier: need at least 2 images");
  if (labels.size() != n)
    throw ArgumentError("train_classifier: " + std::to_string(n) +
                        " images but " + std::to_string(labels.size()) +
                        " labels");
  if (num_classes < 2)
    throw ArgumentError("train_classifier: need at least 2 classes");
  std::vector<std::size_t> class_count(num_classes, 0);
  for (const std::uint8_t y : labels) {
    if (y >= num_classes)
      throw ArgumentError("train_classifier: label " + std::to_string(y) +
                          " out of range");
    ++class_count[y];
  }
  if (std::count_if(class_count.begin(), class_count.end(),
                    [](std::size_t c) { return c > 0; }) < 2)
    throw ArgumentError("train_classifier: all samples carry one class");

  const data::ImageBatch rgb = to_rgb(images);
  ClassifierNet net(rgb.height(), num_classes);
  net.init(derive_seed(seed, 0x41));

  // 90/10 split off a seeded shuffle; the holdout never trains.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomEngine split_rng(derive_seed(seed, 0x42));
  split_rng.shuffle(order);
  const std::size_t n_hold = std::max<std::size_t>(1, n / 10);
  const std::size_t n_train = n - n_hold;
  std::vector<std::size_t> train_idx(order.begin(),
                                     order.begin() + std::ptrdiff_t(n_train));
  const std::vector<std::size_t> hold_idx(
      order.begin() + std::ptrdiff_t(n_train), order.end());

  auto registry = net.params();
  losses::AdamOptimizer<float> opt(registry, 1e-3f, 0.9f, 0.999f);
  const std::size_t batch = std::min<std::size_t>(32, n_train);
  const std::size_t steps = n_train / batch;
  const std::size_t epochs = 8;
  RandomEngine epoch_rng(derive_seed(seed, 0x43));
  Tensor<float> dlogits;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    epoch_rng.shuffle(train_idx);
    for (std::size_t step = 0; step < steps; ++step) {
      std::vector<std::uint8_t> yb(batch);
      for (std::size_t i = 0; i < batch; ++i)
        yb[i] = labels[train_idx[step * batch + i]];
      const Tensor<float> xb =
          gather_rows(rgb.data, train_idx, step * batch, batch);
      const Tensor<float> logits = net.forward_logits(xb, true);
      cross_entropy(logits, yb, dlogits);
      for (auto& kv : registry) kv.second->grad.zero();
      net.body.backward(net.head.backward(dlogits));
      opt.step();
    }
  }

  // Holdout accuracy, inference mode.
  const Tensor<float> hx = gather_rows(rgb.data, hold_idx, 0, n_hold);
  const Tensor<float> hl = net.forward_logits(hx, false);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_hold; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < num_classes; ++j)
      if (hl[i * num_classes + j] > hl[i * num_classes + best]) best = j;
    hits += best == labels[hold_idx[i]];
  }

  ClassifierCheckpoint ckpt;
  ckpt.image_size = rgb.height();
  ckpt.num_classes = num_classes;
  ckpt.feature_dim = kFeatureDim;
  ckpt.holdout_accuracy = double(hits) / double(n_hold);
  ckpt.seed = seed;
  for (auto& kv : net.params())
    ckpt.arrays.emplace_back(kv.first, kv.second->value);
  return ckpt;
}

ClassifierCheckpoint train_domain_classifier(const data::ImageBatch& ds_a,
                                             const data::ImageBatch& ds_b,
                                             std::uint64_t seed) {
  if (ds_a.count() == 0 || ds_b.count() == 0)
    throw ArgumentError("train_domain_classifier: one domain is empty — "
                        "both classes are required");
  if (ds_a.height() != ds_b.height())
    throw ShapeError("train_domain_classifier: image sizes differ");
  const data::ImageBatch a = to_rgb(ds_a), b = to_rgb(ds_b);
  const std::size_t na = a.count(), nb = b.count();
  Shape shape = a.data.shape();
  shape[0] = na + nb;
  Tensor<float> pooled(shape);
  std::memcpy(pooled.data(), a.data.data(),
              a.data.size() * sizeof(float));
  std::memcpy(pooled.data() + a.data.size(), b.data.data(),
              b.data.size() * sizeof(float));
  std::vector<std::uint8_t> labels(na + nb, 0);
  std::fill(labels.begin() + std::ptrdiff_t(na), labels.end(),
            std::uint8_t{1});
  return train_classifier(
      data::ImageBatch{std::move(pooled), data::DomainTag::content}, labels,
      2, seed);
}

DomainAssignment assign_domain(const ClassifierCheckpoint& clf,
                               const data::ImageBatch& samples) {
  if (clf.num_classes != 2)
    throw ArgumentError("assign_domain needs a binary classifier, got " +
                        std::to_string(clf.num_classes) + " classes");
  require_samples(clf, samples, "assign_domain");
  ClassifierNet net = net_from(clf);
  const Tensor<float> logits =
      net.forward_logits(to_rgb(samples).data, false);
  DomainAssignment out;
  out.labels.resize(samples.count());
  std::size_t a = 0;
  for (std::size_t i = 0; i < samples.count(); ++i) {
    // Strict comparison: an exact tie stays with domain A.
    out.labels[i] = logits[i * 2 + 1] > logits[i * 2] ? 1 : 0;
    a += out.labels[i] == 0;
  }
  out.fraction_a = double(a) / double(samples.count());
  return out;
}

Tensor<float> extract_features(const ClassifierCheckpoint& clf,
                               const data::ImageBatch& samples) {
  require_samples(clf, samples, "extract_features");
  ClassifierNet net = net_from(clf);
  return net.body.forward(to_rgb(samples).data, false);
}

double mmd(const Tensor<float>& x, const Tensor<float>& y) {
  double sigma = 0.0;
  return mmd_median(x, y, sigma);
}

double mmd(const Tensor<float>& x, const Tensor<float>& y, double sigma) {
  require_feature_pair(x, y);
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ArgumentError("mmd: bandwidth must be positive and finite");
  return mmd_given_sigma(x, y, sigma);
}

EvalReport mmd_report(const data::ImageBatch& generated,
                      const data::ImageBatch& ds_a,
                      const data::ImageBatch& ds_b,
                      const ClassifierCheckpoint& clf, std::uint64_t seed) {
  const DomainAssignment assignment = assign_domain(clf, generated);
  const Tensor<float> gen_features = extract_features(clf, generated);

  EvalReport report;
  report.n_generated = generated.count();
  report.assignment_fraction_a = assignment.fraction_a;

  for (int side = 0; side < 2; ++side) {
    std::vector<std::size_t> mine;
    for (std::size_t i = 0; i < assignment.labels.size(); ++i)
      if (assignment.labels[i] == side) mine.push_back(i);
    (side == 0 ? report.n_assigned_a : report.n_assigned_b) = mine.size();
    if (mine.size() < 2) continue;

    // Matched sizes: as many training images as assigned samples, trimming
    // the assigned group when the training set is the smaller side.
    const data::ImageBatch& ds = side == 0 ? ds_a : ds_b;
    const std::size_t take = std::min(mine.size(), ds.count());
    if (take < 2) continue;
    mine.resize(take);
    std::vector<std::size_t> pick(ds.count());
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    RandomEngine rng(derive_seed(seed, 0x51 + std::uint64_t(side)));
    rng.shuffle(pick);
    const data::ImageBatch sample{gather_rows(ds.data, pick, 0, take),
                                  ds.tag};
    const Tensor<float> ds_features = extract_features(clf, sample);
    const Tensor<float> side_features =
        gather_rows(gen_features, mine, 0, take);

    double sigma = 0.0;
    const double value = mmd_median(side_features, ds_features, sigma);
    (side == 0 ? report.mmd_to_domain_a : report.mmd_to_domain_b) = value;
    (side == 0 ? report.bandwidth_a : report.bandwidth_b) = sigma;
    (side == 0 ? report.n_domain_a : report.n_domain_b) = take;
  }
  return report;
}

double success_proxy(const data::ImageBatch& generated,
                     const ClassifierCheckpoint& shape_clf,
                     float hue_tolerance) {
  if (generated.count() == 0)
    throw ArgumentError("success_proxy: empty sample set");
  if (!(hue_tolerance > 0.0f))
    throw ArgumentError("success_proxy: hue tolerance must be positive");
  const std::size_t n = generated.count(), s = generated.height();

  // The shape test runs on the binarized foreground rendering.
  Tensor<float> masks({n, 1, s, s});
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::uint8_t> mask = data::foreground_mask(generated, i);
    for (std::size_t j = 0; j < mask.size(); ++j)
      masks[i * s * s + j] = mask[j] ? 1.0f : -1.0f;
  }
  const data::ImageBatch mask_batch{std::move(masks),
                                    data::DomainTag::generated};
  require_samples(shape_clf, mask_batch, "success_proxy");
  ClassifierNet net = net_from(shape_clf);
  const Tensor<float> probs = softmax_rows(
      net.forward_logits(to_rgb(mask_batch).data, false));
  // Classes beyond the first four are rejection classes ("not a shape"),
  // present when the classifier was trained with negatives.
  const std::size_t k = shape_clf.num_classes;
  const std::size_t shape_classes = std::min<std::size_t>(k, 4);

  std::size_t successes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j)
      if (probs[i * k + j] > probs[i * k + best]) best = j;
    const bool shape_ok =
        best < shape_classes && probs[i * k + best] >= 0.8f;
    if (!shape_ok) continue;

    // Hue test: the saturated, bright pixels must mostly sit within the
    // tolerance of their nearest palette hue.
    std::size_t qualifying = 0, on_palette = 0;
    for (std::size_t y = 0; y < s; ++y)
      for (std::size_t x = 0; x < s; ++x) {
        const data::Hsv hsv =
            data::rgb_to_hsv(data::pixel_rgb(generated, i, y, x));
        if (hsv.s < 0.3f || hsv.v < 0.3f) continue;
        ++qualifying;
        const int slot = data::nearest_palette_hue(hsv.h);
        if (data::hue_distance(hsv.h, data::palette()[std::size_t(slot)].hue) <=
            hue_tolerance)
          ++on_palette;
      }
    if (qualifying > 0 && 2 * on_palette >= qualifying) ++successes;
  }
  return double(successes) / double(n);
}

Tensor<float> pca_2d(const Tensor<float>& features) {
  require_rank(features, 2, "pca_2d input");
  const std::size_t n = features.dim(0), d = features.dim(1);
  if (n < 2) throw ArgumentError("pca_2d: need at least 2 samples");
  if (d < 2) throw ArgumentError("pca_2d: need at least 2 feature columns");

  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += features[i * d + j];
  for (double& m : mean) m /= double(n);

  std::vector<double> cov(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) {
      const double ca = features[i * d + a] - mean[a];
      for (std::size_t b = a; b < d; ++b)
        cov[a * d + b] += ca * (features[i * d + b] - mean[b]);
    }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov[a * d + b] /= double(n - 1);
      cov[b * d + a] = cov[a * d + b];
    }

  // Cyclic Jacobi eigen-decomposition of the symmetric covariance.
  std::vector<double> vec(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) vec[i * d + i] = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q)
        off += cov[p * d + q] * cov[p * d + q];
    if (off < 1e-22) break;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = cov[p * d + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (cov[q * d + q] - cov[p * d + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (std::size_t i = 0; i < d; ++i) {
          const double aip = cov[i * d + p], aiq = cov[i * d + q];
          cov[i * d + p] = c * aip - sn * aiq;
          cov[i * d + q] = sn * aip + c * aiq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double api = cov[p * d + i], aqi = cov[q * d + i];
          cov[p * d + i] = c * api - sn * aqi;
          cov[q * d + i] = sn * api + c * aqi;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vip = vec[i * d + p], viq = vec[i * d + q];
          vec[i * d + p] = c * vip - sn * viq;
          vec[i * d + q] = sn * vip + c * viq;
        }
      }
  }

  // Two leading eigenvectors, sign-fixed by their largest loading.
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return cov[a * d + a] > cov[b * d + b];
  });
  Tensor<float> out({n, 2});
  for (std::size_t comp = 0; comp < 2; ++comp) {
    const std::size_t e = idx[comp];
    std::size_t peak = 0;
    for (std::size_t i = 1; i < d; ++i)
      if (std::abs(vec[i * d + e]) > std::abs(vec[peak * d + e])) peak = i;
    const double flip = vec[peak * d + e] < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        dot += (features[i * d + j] - mean[j]) * vec[j * d + e];
      out[i * 2 + comp] = float(flip * dot);
    }
  }
  return out;
}

void export_features_csv(const Tensor<float>& features,
                         const std::vector<std::uint8_t>& labels,
                         const std::string& path) {
  require_rank(features, 2, "export_features_csv input");
  const std::size_t n = features.dim(0), d = features.dim(1);
  if (labels.size() != n)
    throw ArgumentError("export_features_csv: " + std::to_string(n) +
                        " rows but " + std::to_string(labels.size()) +
                        " labels");
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write features to " + path);
  f << "label";
  for (std::size_t j = 1; j <= d; ++j) f << ",f" << j;
  f << "\n";
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    f << unsigned(labels[i]);
    for (std::size_t j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", double(features[i * d + j]));
      f << ',' << buf;
    }
    f << "\n";
  }
  if (!f) throw IoError("short write to " + path);
}

nlohmann::json to_json(const EvalReport& report) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return nlohmann::json{
      {"mmd_to_domain_a", opt(report.mmd_to_domain_a)},
      {"mmd_to_domain_b", opt(report.mmd_to_domain_b)},
      {"bandwidth_a", opt(report.bandwidth_a)},
      {"bandwidth_b", opt(report.bandwidth_b)},
      {"assignment_fraction_a", report.assignment_fraction_a},
      {"success_proxy_rate", opt(report.success_proxy_rate)},
      {"n_generated", report.n_generated},
      {"n_assigned_a", report.n_assigned_a},
      {"n_assigned_b", report.n_assigned_b},
      {"n_domain_a", report.n_domain_a},
      {"n_domain_b", report.n_domain_b},
  };
}

}  // namespace mixgan::eval
